#pragma once

#include <map>

#include "sofic/shiftspace.hpp"

namespace sofic {

// Sliding block code with memory m and anticipation a: output symbol i is a
// function of the input window [i-m, i+a]. The block map table is total on
// the domain's window-length language and the declared codomain alphabet is
// exactly the set of attained symbols; both are checked at construction.
class SlidingBlockCode {
public:
  SlidingBlockCode(Presentation domain, Alphabet codomain, int memory, int anticipation,
                   std::map<Word, SymbolId> table, const AnalysisConfig& cfg = {});

  const Presentation& domain() const { return domain_; }
  const Alphabet& codomain() const { return codomain_; }
  int memory() const { return memory_; }
  int anticipation() const { return anticipation_; }
  int window() const { return memory_ + 1 + anticipation_; }
  bool one_block() const { return window() == 1; }
  const std::map<Word, SymbolId>& table() const { return table_; }

  SymbolId map_window(const Word& w) const;
  SymbolId map_symbol(SymbolId s) const;  // one-block fast path

  // image of a word; |w| must be at least the window length
  Word apply(const Word& w) const;

private:
  Presentation domain_;
  Alphabet codomain_;
  int memory_, anticipation_;
  std::map<Word, SymbolId> table_;
};

SlidingBlockCode identity_code(const Presentation& p, const AnalysisConfig& cfg = {});

// outer after inner; memories and anticipations add
SlidingBlockCode compose(const SlidingBlockCode& outer, const SlidingBlockCode& inner,
                         const AnalysisConfig& cfg = {});

// same point map presented on a larger window (memory/anticipation only grow)
SlidingBlockCode extend_window(const SlidingBlockCode& c, int memory, int anticipation,
                               const AnalysisConfig& cfg = {});

// equality as maps on points of the common domain
bool codes_equal(const SlidingBlockCode& a, const SlidingBlockCode& b,
                 const AnalysisConfig& cfg = {});

struct FactorTriple {
  Presentation x;
  SlidingBlockCode pi;
  Presentation y;
};

// checks Y's language equals the image language up to cfg.length_cap
void validate_triple(const FactorTriple& t, const AnalysisConfig& cfg = {});

struct HigherBlock {
  Presentation image;            // presentation on block symbols
  SlidingBlockCode to_blocks;    // conjugacy onto the block presentation
  SlidingBlockCode from_blocks;  // one-block inverse
};

// N-th higher block presentation; symbols of the result are length-N words.
// offset sets the conjugacy's memory (window [i-offset, i-offset+N-1]).
HigherBlock higher_block(const Presentation& p, int window, const AnalysisConfig& cfg = {});
HigherBlock higher_block_at(const Presentation& p, int window, int offset,
                            const AnalysisConfig& cfg = {});

struct NormalizedTriple {
  FactorTriple triple;            // x is a 1-step vertex-SFT, pi is 1-block
  SlidingBlockCode conj;          // original X -> recoded X
  SlidingBlockCode conj_inverse;  // recoded X -> original X
};

// Recode so the domain is a 1-step vertex-SFT and the code is 1-block.
NormalizedTriple normalize(const FactorTriple& t, const AnalysisConfig& cfg = {});

// Right-resolving irreducible presentation of the image shift pi(X),
// obtained by relabeling X's graph through pi and determinizing.
Presentation image_presentation(const Presentation& x, const SlidingBlockCode& pi,
                                const AnalysisConfig& cfg = {});

struct RightResolvingCover {
  Presentation cover;           // minimal right-resolving presentation
  Presentation cover_edge_sft;  // vertex-SFT on the cover's edges
  SlidingBlockCode projection;  // 1-block: edge symbol -> its label
};

// Minimal right-resolving presentation of an irreducible sofic shift plus
// the degree-one projection from its edge SFT.
RightResolvingCover minimal_right_resolving(const Presentation& p,
                                            const AnalysisConfig& cfg = {});

// vertex-SFT whose symbols are the edges of a labeled graph
Presentation edge_sft_of(const Presentation& labeled);

// compare presented sofic shifts via canonical minimal covers
bool same_sofic_shift(const Presentation& a, const Presentation& b,
                      const AnalysisConfig& cfg = {});

}  // namespace sofic
