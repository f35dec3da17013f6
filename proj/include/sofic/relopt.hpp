#pragma once

#include <map>
#include <vector>

#include "sofic/blockcode.hpp"
#include "sofic/decomp.hpp"
#include "sofic/shiftspace.hpp"
#include "sofic/thermo.hpp"

namespace sofic {

// marginal encoding of an invariant measure: a shift-consistent probability
// table over the length-k words
struct WordDistribution {
  int k = 1;
  std::map<Word, double> probs;
};

// concave relaxation of "maximize h(mu) + mu(phi) subject to pi mu = nu":
// variables are length-k domain word probabilities, the pushforward
// constraint is imposed on all length-k image words, and the objective is
// the k-step conditional entropy plus the potential term. The value is an
// upper bound on the relative pressure, tightening as k grows.
struct RelaxationProblem {
  Presentation x;
  SlidingBlockCode pi;
  Potential phi;
  int k = 1;
  std::map<Word, double> nu_words;        // target image table, lengths 1..k
  std::vector<Word> words;                // variables: sorted length-k words
  std::vector<std::vector<double>> rows;  // affine constraints: rows * q = rhs
  std::vector<double> rhs;
};

// raises Infeasible when nu is not a pushforward at this order
RelaxationProblem build_relaxation(const Presentation& x, const SlidingBlockCode& pi,
                                   const MarkovMeasure& nu_source, const Potential& phi, int k,
                                   const AnalysisConfig& cfg = {});
RelaxationProblem build_relaxation(const Presentation& x, const SlidingBlockCode& pi,
                                   const std::map<Word, double>& nu_words, const Potential& phi,
                                   int k, const AnalysisConfig& cfg = {});

// objective, gradient, and feasible projection exposed for property checks
double relaxation_objective(const RelaxationProblem& p, const std::vector<double>& q);
std::vector<double> relaxation_gradient(const RelaxationProblem& p, const std::vector<double>& q);
std::vector<double> project_feasible(const RelaxationProblem& p, std::vector<double> start,
                                     const AnalysisConfig& cfg = {});

struct SolveReport {
  WordDistribution optimum;
  double value = 0;
  double constraint_residual = 0;
  int seeds_used = 0;
  double max_pairwise_distance = 0;  // total variation across seed optima
  double support_min = 0;
  int iterations = 0;  // gradient steps, summed over seeds
};

// projected gradient ascent from `seeds` random interior starts (0 = config
// default); raises SolverStalled when the iteration cap is hit while still
// improving
SolveReport solve_relaxation(const RelaxationProblem& p, int seeds = 0,
                             const AnalysisConfig& cfg = {});

struct SupportReport {
  bool full_support = false;
  double floor = 0;
  std::vector<Word> violations;
};

// full-support verdict for the optimum over the length-k language of x
SupportReport support_report(const SolveReport& r, const Presentation& x,
                             const AnalysisConfig& cfg = {});

// solves the same fiber two ways: directly over pi with target nu, and over
// the class-degree-one first leg with the target lifted through the
// finite-to-one second leg (equilibrium state of the log-transition
// potential pulled back to the cover of the intermediate shift). The two
// values and word tables agree on the fixtures where the fiber identity of
// the decomposition is exact.
struct CrosscheckReport {
  SolveReport direct;
  SolveReport routed;
  std::map<Word, double> nu_tilde;      // lifted target on the intermediate shift
  std::map<Word, double> routed_words;  // routed optimum mapped to domain words
  double value_gap = 0;
  double table_distance = 0;  // total variation
  bool agree = false;
};

// d must be a verified decomposition of a normalized triple; nu_source is a
// full-support Markov measure on the image; needs k >= pi1 window + 1
CrosscheckReport decomposition_crosscheck(const Decomposition& d, const MarkovMeasure& nu_source,
                                          const Potential& phi, int k,
                                          const AnalysisConfig& cfg = {});

}  // namespace sofic
