#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sofic/config.hpp"
#include "sofic/error.hpp"

namespace sofic {

using SymbolId = std::uint32_t;
using StateId = std::uint32_t;
using Word = std::vector<SymbolId>;

struct Alphabet {
  std::vector<std::string> display;

  std::size_t size() const { return display.size(); }
  bool operator==(const Alphabet&) const = default;

  // Words print as plain concatenation when every display is a single
  // character, otherwise symbols are joined with '.'.
  bool dotted() const;
  std::string format(SymbolId s) const;
  std::string format(const Word& w) const;
  std::optional<SymbolId> find(const std::string& d) const;
  Word parse_word(const std::string& text) const;

  void validate() const;  // nonempty, distinct displays
};

enum class Kind { vertex_sft, edge_sft, sofic };

const char* kind_name(Kind k);
Kind kind_from_name(const std::string& s);

struct Edge {
  StateId src;
  StateId dst;
  SymbolId label;
  bool operator==(const Edge&) const = default;
};

// Labeled directed multigraph presenting a shift space. Immutable after
// construction; all analyses take it by const reference.
//
// kind == vertex_sft means states are in bijection with symbols (state i
// carries symbol i) and every edge is labeled by its destination, so the
// presented shift is the 1-step SFT of the underlying graph.
// kind == edge_sft means symbols are in bijection with edges (edge i is
// labeled i). kind == sofic is an arbitrary labeled graph.
class Presentation {
public:
  Presentation(Alphabet alphabet, std::vector<std::string> state_names,
               std::vector<Edge> edges, Kind kind, bool right_resolving = false);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t symbol_count() const { return alphabet_.size(); }
  std::size_t state_count() const { return state_names_.size(); }
  const std::vector<std::string>& state_names() const { return state_names_; }
  const std::vector<Edge>& edges() const { return edges_; }
  Kind kind() const { return kind_; }
  bool right_resolving() const { return right_resolving_; }
  bool is_essential() const { return essential_; }

  const std::vector<std::uint32_t>& out_edges(StateId s) const { return out_[s]; }
  const std::vector<std::uint32_t>& in_edges(StateId s) const { return in_[s]; }

  // vertex-SFT fast paths (symbols are states)
  bool allows(SymbolId u, SymbolId v) const;
  const std::vector<SymbolId>& successors(SymbolId u) const;
  const std::vector<SymbolId>& predecessors(SymbolId u) const;

  bool contains_word(const Word& w) const;
  void check_essential(const char* who) const;

  bool operator==(const Presentation&) const = default;

private:
  Alphabet alphabet_;
  std::vector<std::string> state_names_;
  std::vector<Edge> edges_;
  Kind kind_;
  bool right_resolving_;
  bool essential_;
  std::vector<std::vector<std::uint32_t>> out_, in_;
  std::vector<std::vector<SymbolId>> succ_, pred_;  // vertex-SFT only
};

// Build a vertex-SFT from a successor table; symbol i may be followed by
// every symbol in succ[i].
Presentation make_vertex_sft(Alphabet a, const std::vector<std::vector<SymbolId>>& succ);

// Remove states that do not lie on a bi-infinite path. The presented shift
// is unchanged; raises empty_shift if nothing survives.
Presentation trim_essential(const Presentation& p);

bool is_irreducible(const Presentation& p);

// gcd of cycle lengths of the underlying graph; requires irreducibility.
int period(const Presentation& p);

// All length-`length` words of the presented shift, sorted; exact, not
// sampled. Deduplication runs over reachable state sets.
std::vector<Word> enumerate_words(const Presentation& p, int length,
                                  const AnalysisConfig& cfg = {});
std::size_t count_words(const Presentation& p, int length, const AnalysisConfig& cfg = {});

}  // namespace sofic
