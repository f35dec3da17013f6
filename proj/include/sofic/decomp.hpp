#pragma once

#include "sofic/classdeg.hpp"
#include "sofic/fto.hpp"

namespace sofic {

struct DecompositionReport {
  bool composition_ok = false;   // pi2 after pi1 equals the original code
  DegreeReport pi2_degree;       // computed through the cover of ytilde
  bool pi2_degree_equals_class_degree = false;
  ClassDegreeReport pi1_class_degree;
  bool pi1_class_degree_one = false;
  bool class_degree_stabilized = false;  // the input code's class degree certificate
  std::string notes;                     // why a check could not be completed, if any

  bool ok() const {
    return composition_ok && class_degree_stabilized && pi2_degree_equals_class_degree &&
           pi1_class_degree_one;
  }
};

// Factorization pi = pi2 . pi1 through a decorated image shift: pi1 marks, at
// every occurrence of the transition block's word, the routing symbol its
// local preimage rides; pi2 forgets the marks.
struct Decomposition {
  NormalizedTriple normalized;  // pi1/pi2 factor the normalized code
  ClassDegreeReport class_degree;
  TransitionBlock tb;
  Presentation ytilde;    // image of pi1, over pairs (image symbol, mark)
  SlidingBlockCode pi1;   // normalized domain -> ytilde
  SlidingBlockCode pi2;   // ytilde -> Y, first-coordinate projection
  DecompositionReport verification;
};

// First leg of the factorization for a certified-minimal transition block:
// memory tb.n, anticipation |w|-1-n; first coordinate is pi, second is 0 off
// occurrences of tb.w and the unique routing symbol on them. Pair symbols
// display as "<image>|<mark>" with "_" for the null mark.
SlidingBlockCode build_pi1(const Presentation& x, const SlidingBlockCode& pi,
                           const TransitionBlock& tb, const AnalysisConfig& cfg = {});

// Run the whole pipeline: normalize, certify a minimal transition block,
// build pi1/ytilde/pi2, verify. When the class-degree sweep does not
// stabilize, the factorization is still attempted for the witnessed upper
// bound; if its unique-routing premise then fails, raises
// StabilizationInconclusive.
Decomposition build_decomposition(const FactorTriple& t, const AnalysisConfig& cfg = {});

// Re-run the three checks: composition equality, degree(pi2) vs class
// degree, class degree of pi1 stabilizing at 1. Failures are recorded in the
// report, never thrown.
DecompositionReport verify_decomposition(const Decomposition& d,
                                         const AnalysisConfig& cfg = {});

// Degree of a 1-block code on an irreducible sofic presentation, computed on
// the minimal right-resolving cover (the cover projection has degree one, so
// the composite's degree is the code's).
DegreeReport degree_via_cover(const Presentation& domain, const SlidingBlockCode& pi,
                              const AnalysisConfig& cfg = {});

}  // namespace sofic
