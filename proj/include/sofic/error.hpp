#pragma once

#include <stdexcept>
#include <string>

namespace sofic {

enum class Errc {
  invalid_argument,    // malformed input, broken invariant
  empty_shift,         // trimming removed every state
  not_irreducible,     // operation requires a strongly connected graph
  resource_limit,      // configured cap exceeded
  word_too_short,      // shorter than the code window
  not_in_language,     // word is not a block of the shift
  alphabet_mismatch,   // codomain/domain alphabets do not line up
  not_finite_to_one,   // degree asked for an infinite-to-one code
  bad_position,        // routing position outside (0, |w|-1)
  not_a_preimage,      // word does not map to the given image word
  not_minimal,         // transition block is not certified minimal
  stabilization_inconclusive,
  window_mismatch,     // potential/measure windows incompatible
  infeasible,          // relaxation constraints have no solution
  solver_stalled,
  parse_error,
  numeric,             // iteration failed to converge
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg), code_(code) {}

  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, Errc code, const std::string& msg) {
  if (!cond) raise(code, msg);
}

}  // namespace sofic
