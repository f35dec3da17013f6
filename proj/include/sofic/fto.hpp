#pragma once

#include <optional>

#include "sofic/blockcode.hpp"

namespace sofic {

// two distinct equal-endpoint domain paths with the same image
struct Diamond {
  Word image;
  Word left;
  Word right;
};

struct DegreeTrace {
  std::vector<std::size_t> per_length;  // m_L for L = 1, 2, ...
  int stabilized_at = -1;               // first length attaining the closure minimum
  int plateau = 0;                      // plateau width the stabilization certifies
};

struct DegreeReport {
  bool finite_to_one = false;
  std::optional<std::size_t> degree;
  Word witness;               // image word attaining the minimum
  int witness_position = -1;  // position inside the witness
  std::optional<Diamond> diamond;
  DegreeTrace trace;
};

// All operations expect a normalized pair: X a 1-step vertex-SFT presentation
// and pi a 1-block code on it (run normalize first).

std::optional<Diamond> find_diamond(const Presentation& x, const SlidingBlockCode& pi,
                                    const AnalysisConfig& cfg = {});

bool is_finite_to_one(const Presentation& x, const SlidingBlockCode& pi,
                      const AnalysisConfig& cfg = {});

// Degree of a finite-to-one code: the minimum over image words w and
// positions i of the number of symbols preimages of w show at i. Computed
// exactly from the fiber's forward/backward subset automata; the trace and
// stabilization length are reported for auditability. Raises NotFiniteToOne
// on a diamond.
DegreeReport degree(const Presentation& x, const SlidingBlockCode& pi,
                    const AnalysisConfig& cfg = {});

// like degree, but reports a diamond instead of throwing
DegreeReport fto_report(const Presentation& x, const SlidingBlockCode& pi,
                        const AnalysisConfig& cfg = {});

// exact number of points in the fiber of the periodic point w^inf (all of
// them are periodic when the code is finite-to-one)
std::size_t periodic_fiber_count(const Presentation& x, const SlidingBlockCode& pi,
                                 const Word& y, const AnalysisConfig& cfg = {});

}  // namespace sofic
