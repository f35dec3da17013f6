#pragma once

#include <cstddef>
#include <cstdint>

namespace sofic {

// Every cap and tolerance used by the library. Reports embed the config they
// ran under so results can be reproduced bit for bit.
struct AnalysisConfig {
  std::size_t word_cap = 1'000'000;   // max words per enumeration
  std::size_t state_cap = 10'000;     // max states per constructed presentation
  int length_cap = 12;                // word length for semantic equality checks
  int trace_cap = 64;                 // max word length explored by degree/class-degree traces
  int plateau = 0;                    // stabilization plateau; 0 = (#symbols)^2

  int power_iter_cap = 100'000;       // power iteration steps
  double power_tol = 1e-14;           // relative Collatz bracket width

  double tol_pressure = 1e-12;
  double tol_measure = 1e-10;         // measure identities (rows, level sums)
  double tol_push = 1e-9;             // lift/pushforward agreement
  double tol_residual = 1e-8;         // relaxation constraint residual
  double tol_seeds = 1e-6;            // seed-to-seed total variation
  double support_floor = 1e-12;

  int solver_iter_cap = 100'000;
  double solver_improve_eps = 1e-12;
  int solver_seeds = 10;

  std::uint64_t seed = 1;
};

}  // namespace sofic
