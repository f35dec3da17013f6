#pragma once

#include <map>
#include <string>
#include <utility>

#include "sofic/blockcode.hpp"

namespace sofic {

// A routing certificate for an image word: every preimage of w can be
// rerouted, keeping its endpoints, so that it passes through a symbol of
// `routing` at position n. Valid positions are interior: 0 < n < |w|-1.
struct TransitionBlock {
  Word w;
  int n = 0;
  std::vector<SymbolId> routing;  // increasing subset of the fiber of w[n]

  std::size_t depth() const { return routing.size(); }
};

// For a fixed (w, n): which symbols each realizable endpoint pair of the
// fiber can be routed through. Routability depends on the endpoints only.
struct RoutingTable {
  Word w;
  int n = 0;
  std::map<std::pair<SymbolId, SymbolId>, std::vector<SymbolId>> routes;
};

// All operations expect a normalized pair (X a 1-step vertex shift, pi a
// 1-block code on it); image words are over pi's codomain alphabet.

std::vector<Word> preimage_words(const SlidingBlockCode& pi, const Word& w,
                                 const AnalysisConfig& cfg = {});

RoutingTable routing_table(const SlidingBlockCode& pi, const Word& w, int n,
                           const AnalysisConfig& cfg = {});

// can u be replaced by a preimage with the same endpoints passing through a
// at position n? decided by reachability inside the fiber, not enumeration
bool routable_through(const SlidingBlockCode& pi, const Word& w, int n, const Word& u,
                      SymbolId a, const AnalysisConfig& cfg = {});

bool is_transition_block(const SlidingBlockCode& pi, const Word& w, int n,
                         const std::vector<SymbolId>& routing, const AnalysisConfig& cfg = {});

// minimal-depth routing set over all interior positions of w; exact hitting
// set over the distinct endpoint routing sets, ties by smallest n then
// lexicographic routing set
TransitionBlock minimal_depth_for_word(const SlidingBlockCode& pi, const Word& w,
                                       const AnalysisConfig& cfg = {});

struct ClassDegreeReport {
  std::size_t upper = 0;  // min depth over the words swept: class degree once stabilized
  TransitionBlock witness;
  std::vector<std::size_t> trace;  // cumulative minimum for word lengths 3, 4, ...
  bool stabilized = false;
  int stabilized_at = -1;  // word length at which the certificate fired
  std::string method;      // "depth-floor", "degree-match", "plateau", or "cap"
};

// Sweep image words of length 3..max_len for the minimal transition-block
// depth. The value is an upper bound for the class degree in general and is
// flagged stabilized when a certificate applies: depth 1 is an absolute
// floor, for finite-to-one codes the class degree equals the degree, and
// otherwise a plateau of (symbol count)^2 consecutive lengths is accepted.
ClassDegreeReport class_degree_upper(const SlidingBlockCode& pi, int max_len,
                                     const AnalysisConfig& cfg = {});

// The symbol of a minimal block's routing set the preimage u routes through.
// Minimality forces uniqueness; finding none or several raises NotMinimal.
SymbolId unique_routing_symbol(const SlidingBlockCode& pi, const TransitionBlock& tb,
                               const Word& u, const AnalysisConfig& cfg = {});

}  // namespace sofic
