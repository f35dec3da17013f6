#pragma once

#include <map>
#include <optional>
#include <vector>

#include "sofic/blockcode.hpp"
#include "sofic/shiftspace.hpp"

namespace sofic {

// locally constant potential: a total table on the length-`window` language,
// in natural-log units
struct Potential {
  int window = 1;
  std::map<Word, double> values;

  double at(const Word& w) const;
};

Potential zero_potential(const Presentation& x, int window = 1, const AnalysisConfig& cfg = {});

// beta * [word starts with w]; total on the length-|w| language
Potential indicator_potential(const Presentation& x, const Word& w, double beta,
                              const AnalysisConfig& cfg = {});

// raises InvalidArgument unless the table is total on the language and finite
void validate_potential(const Presentation& x, const Potential& phi,
                        const AnalysisConfig& cfg = {});

// phi + phi∘shift + ... (m terms); window grows to window+m-1
Potential cocycle_sum(const Presentation& x, const Potential& phi, int m,
                      const AnalysisConfig& cfg = {});

// stationary Markov measure of a fixed order: contexts are the length-`order`
// words of the shift, rows give next-symbol probabilities
struct MarkovMeasure {
  int order = 1;
  std::vector<Word> contexts;  // sorted
  std::vector<std::map<SymbolId, double>> transitions;
  std::vector<double> stationary;

  std::optional<std::size_t> context_index(const Word& w) const;
};

// checks row sums, stationarity, and support containment
void validate_measure(const Presentation& x, const MarkovMeasure& mu,
                      const AnalysisConfig& cfg = {});

// independent symbol draws expressed as an order-1 measure
MarkovMeasure bernoulli_measure(const Presentation& x, const std::vector<double>& probs,
                                const AnalysisConfig& cfg = {});

// completes a transition table to a measure by solving for the stationary
// vector of the context chain
MarkovMeasure make_markov(const Presentation& x, int order,
                          const std::vector<std::map<SymbolId, double>>& transitions,
                          const AnalysisConfig& cfg = {});

// cylinder probability; handles words shorter or longer than the order
double word_probability(const MarkovMeasure& mu, const Word& w);

// all positive-probability words of each length 1..max_len; every length
// level sums to 1
std::map<Word, double> measure_words(const MarkovMeasure& mu, int max_len,
                                     const AnalysisConfig& cfg = {});

struct PressureValue {
  double value = 0;      // log of the Perron root, nats
  double root = 0;       // the Perron root itself
  int block_len = 1;     // the recoding order; vectors are indexed by blocks
  std::vector<Word> blocks;
  std::vector<double> right;
  std::vector<double> left;  // normalized so that left·right = 1
  int iterations = 0;
};

// topological pressure of a locally constant potential. Vertex shifts go
// through the transfer matrix directly; sofic presentations are lifted
// through the minimal right-resolving cover, whose degree-1 projection
// preserves pressure.
PressureValue pressure(const Presentation& x, const Potential& phi,
                       const AnalysisConfig& cfg = {});

// the Gibbs/Parry Markov measure built from the Perron eigendata; its
// measure_pressure equals pressure(x, phi). Requires a vertex shift.
MarkovMeasure equilibrium_state(const Presentation& x, const Potential& phi,
                                const AnalysisConfig& cfg = {});

double entropy(const MarkovMeasure& mu);

// entropy(mu) + mu(phi); raises WindowMismatch when phi is not defined on
// some positive-probability word
double measure_pressure(const MarkovMeasure& mu, const Potential& phi,
                        const AnalysisConfig& cfg = {});

// image word probabilities under a 1-block code, lengths 1..max_len
std::map<Word, double> pushforward_words(const MarkovMeasure& mu, const SlidingBlockCode& pi,
                                         int max_len, const AnalysisConfig& cfg = {});

// unique lift of the equilibrium state of psi through a finite-to-one code:
// the equilibrium state of the pulled-back potential upstairs
struct TuncelLift {
  Potential pulled;             // psi ∘ pi on the domain
  MarkovMeasure lift;           // equilibrium state of the pulled potential
  double pressure_domain = 0;   // pressure upstairs
  double pressure_image = 0;    // pressure downstairs; equal for finite-to-one
  double word_gap = 0;          // max |pushforward - image equilibrium| over words
  int word_len = 0;             // length up to which the gap was checked
  bool pushforward_ok = false;
  bool pressure_ok = false;
};

TuncelLift tuncel_lift(const Presentation& x, const SlidingBlockCode& pi, const Presentation& y,
                       const Potential& psi, int word_len = 0, const AnalysisConfig& cfg = {});

// certified bracket for h(mu) - h(image measure). The image of a Markov
// measure under a 1-block code has no closed-form entropy; the image entropy
// is bracketed by conditional word entropies instead (upper: H_L - H_{L-1};
// lower: conditioning additionally on the hidden start context).
struct EntropyBounds {
  double lower = 0;        // lower bound on h(mu) - h(image)
  double upper = 0;        // upper bound
  double h_domain = 0;     // entropy of mu, exact
  double image_lower = 0;  // bracket for the image entropy itself
  double image_upper = 0;
  int length = 0;

  double width() const { return upper - lower; }
};

EntropyBounds relative_entropy_bounds(const MarkovMeasure& mu, const SlidingBlockCode& pi,
                                      int max_len, const AnalysisConfig& cfg = {});

}  // namespace sofic
