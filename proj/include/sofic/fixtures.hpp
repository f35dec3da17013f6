#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sofic/blockcode.hpp"

namespace sofic {
namespace fixtures {

// full shift on n symbols "0".."n-1"
Presentation full_shift(std::size_t n);

// binary vertex-SFT forbidding "11"
Presentation golden_mean();

// even shift: runs of 0 between successive 1s have even length
Presentation even_shift();

// 1-block merge of the full 3-shift {a,b,c} onto the full 2-shift (b,c -> 1);
// infinite-to-one
FactorTriple merge_triple(const AnalysisConfig& cfg = {});

// 2-block parity map of the full 2-shift onto itself; constant 2-to-one
FactorTriple xor_triple(const AnalysisConfig& cfg = {});

// golden mean onto the even shift via the complemented 2-block parity map
FactorTriple gm_even_triple(const AnalysisConfig& cfg = {});

// edge SFT of the even shift's minimal cover, projected onto the even shift
FactorTriple even_cover_triple(const AnalysisConfig& cfg = {});

// registry used by the command line tool
std::vector<std::string> presentation_names();
std::vector<std::string> triple_names();
Presentation presentation_by_name(const std::string& name);
FactorTriple triple_by_name(const std::string& name, const AnalysisConfig& cfg = {});

// random irreducible vertex-SFT: a Hamiltonian cycle plus `extra` random edges
Presentation random_irreducible(std::uint64_t seed, std::size_t states, std::size_t extra);

// random 1-block factor triple: random irreducible domain merged onto a
// smaller alphabet, image presented right-resolving
FactorTriple random_onto_triple(std::uint64_t seed, std::size_t states,
                                std::size_t target_symbols, const AnalysisConfig& cfg = {});

// random constant-to-one lift: permutation extension of a random irreducible
// base by `sheets` layers, projected back down; finite-to-one by construction
FactorTriple random_lift_triple(std::uint64_t seed, std::size_t base_states,
                                std::size_t sheets, const AnalysisConfig& cfg = {});

}  // namespace fixtures
}  // namespace sofic
