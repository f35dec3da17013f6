#include "sofic/relopt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "sofic/error.hpp"

namespace sofic {
namespace {

constexpr double kProbFloor = 1e-300;  // gradient clamp for vanishing coordinates
constexpr double kProjTol = 1e-14;
constexpr int kProjCapSolve = 5'000;
constexpr int kProjCapProbe = 20'000;  // feasibility probe must outlast the cycling regime

double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

Word subword(const Word& w, std::size_t from, std::size_t len) {
  return Word(w.begin() + from, w.begin() + from + len);
}

// orthogonal projector onto {q : rows q = rhs}; the minimal-norm least-squares
// correction also handles redundant and inconsistent rows
struct AffineProjector {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;

  AffineProjector(const std::vector<std::vector<double>>& rows, const std::vector<double>& rhs,
                  std::size_t n) {
    a.setZero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n));
    b.resize(static_cast<Eigen::Index>(rhs.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      b(static_cast<Eigen::Index>(i)) = rhs[i];
      for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    cod.compute(a);
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) const { return v - cod.solve(a * v - b); }

  double residual(const Eigen::VectorXd& v) const {
    return a.rows() == 0 ? 0.0 : (a * v - b).cwiseAbs().maxCoeff();
  }
};

// Dykstra alternation between the affine subspace and the nonnegative
// orthant; converges to the projection onto their intersection. When the
// intersection is empty the iterates settle on the minimal-gap pair, which
// the caller detects through residual().
Eigen::VectorXd project_onto(const AffineProjector& pr, Eigen::VectorXd z, int cap) {
  Eigen::VectorXd p = Eigen::VectorXd::Zero(z.size());
  Eigen::VectorXd r = Eigen::VectorXd::Zero(z.size());
  for (int it = 0; it < cap; ++it) {
    const Eigen::VectorXd y = pr.apply(z + p);
    p += z - y;
    const Eigen::VectorXd next = (y + r).cwiseMax(0.0);
    r += y - next;
    const double move = (next - z).lpNorm<Eigen::Infinity>();
    const double gap = (next - y).lpNorm<Eigen::Infinity>();
    z = next;
    if (move < kProjTol && gap < 1e-12) break;
  }
  return z;
}

// per-variable objective data: marginal bucket of the (k-1)-prefix and the
// potential evaluated on the leading window
struct ObjectiveData {
  int k = 1;
  std::size_t n_marg = 0;
  std::vector<std::size_t> pre;
  std::vector<double> phival;

  ObjectiveData(const RelaxationProblem& p, const AnalysisConfig& cfg) : k(p.k) {
    const std::size_t n = p.words.size();
    phival.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      phival[i] = p.phi.at(subword(p.words[i], 0, static_cast<std::size_t>(p.phi.window)));
    if (k > 1) {
      const std::vector<Word> margs = enumerate_words(p.x, k - 1, cfg);
      n_marg = margs.size();
      pre.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        const Word s = subword(p.words[i], 0, static_cast<std::size_t>(k - 1));
        const auto it = std::lower_bound(margs.begin(), margs.end(), s);
        require(it != margs.end() && *it == s, Errc::invalid_argument, "prefix not in language");
        pre[i] = static_cast<std::size_t>(it - margs.begin());
      }
    }
  }

  Eigen::VectorXd marginal(const Eigen::VectorXd& q) const {
    Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_marg));
    for (std::size_t i = 0; i < pre.size(); ++i)
      m(static_cast<Eigen::Index>(pre[i])) += q(static_cast<Eigen::Index>(i));
    return m;
  }

  double value(const Eigen::VectorXd& q) const {
    double f = 0.0;
    for (Eigen::Index i = 0; i < q.size(); ++i)
      f += -xlogx(std::max(q(i), 0.0)) + q(i) * phival[static_cast<std::size_t>(i)];
    if (k > 1) {
      const Eigen::VectorXd m = marginal(q);
      for (Eigen::Index s = 0; s < m.size(); ++s) f += xlogx(std::max(m(s), 0.0));
    }
    return f;
  }

  Eigen::VectorXd grad(const Eigen::VectorXd& q) const {
    Eigen::VectorXd g(q.size());
    if (k > 1) {
      const Eigen::VectorXd m = marginal(q);
      for (Eigen::Index i = 0; i < q.size(); ++i) {
        const double mi = std::max(m(static_cast<Eigen::Index>(pre[static_cast<std::size_t>(i)])), kProbFloor);
        const double qi = std::max(q(i), kProbFloor);
        g(i) = std::log(mi) - std::log(qi) + phival[static_cast<std::size_t>(i)];
      }
    } else {
      for (Eigen::Index i = 0; i < q.size(); ++i)
        g(i) = -std::log(std::max(q(i), kProbFloor)) - 1.0 + phival[static_cast<std::size_t>(i)];
    }
    return g;
  }
};

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  Eigen::VectorXd e(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) e(static_cast<Eigen::Index>(i)) = v[i];
  return e;
}

std::vector<double> from_eigen(const Eigen::VectorXd& e) {
  return std::vector<double>(e.data(), e.data() + e.size());
}

void check_nu_table(const std::map<Word, double>& nu, int k, const AnalysisConfig& cfg) {
  std::map<int, std::map<Word, double>> levels;
  for (const auto& [w, v] : nu) {
    require(!w.empty() && static_cast<int>(w.size()) <= k, Errc::invalid_argument,
            "target word table holds a length outside 1..k");
    require(std::isfinite(v) && v >= -cfg.tol_measure, Errc::invalid_argument,
            "target word table holds a negative or non-finite probability");
    levels[static_cast<int>(w.size())][w] += v;
  }
  require(levels.count(k) == 1, Errc::invalid_argument,
          "target word table is missing the length-k level");
  double sum = 0.0;
  for (const auto& [w, v] : levels[k]) sum += v;
  require(std::abs(sum - 1.0) <= cfg.tol_measure, Errc::invalid_argument,
          "target length-k probabilities do not sum to one");
  for (int len = 2; len <= k; ++len) {
    if (!levels.count(len)) continue;
    std::map<Word, double> left, right;
    for (const auto& [w, v] : levels[len]) {
      left[subword(w, 0, w.size() - 1)] += v;
      right[subword(w, 1, w.size() - 1)] += v;
    }
    std::map<Word, double> keys = left;
    keys.insert(right.begin(), right.end());
    if (levels.count(len - 1))
      for (const auto& kv : levels[len - 1]) keys.insert(kv);
    for (const auto& [s, unused] : keys) {
      (void)unused;
      const auto look = [&](const std::map<Word, double>& t) {
        const auto it = t.find(s);
        return it == t.end() ? 0.0 : it->second;
      };
      require(std::abs(look(left) - look(right)) <= cfg.tol_measure, Errc::invalid_argument,
              "target word table is not shift-consistent");
      if (levels.count(len - 1))
        require(std::abs(look(left) - look(levels[len - 1])) <= cfg.tol_measure,
                Errc::invalid_argument, "target word table marginals disagree across lengths");
    }
  }
}

// run one projected-gradient ascent; returns accepted step count
int ascend(const ObjectiveData& od, const AffineProjector& pr, Eigen::VectorXd& q, double& f,
           const AnalysisConfig& cfg) {
  f = od.value(q);
  double step = 1.0;
  int accepted = 0;
  int polish = 0;
  bool certified = false;  // the documented improvement criterion was met
  for (int it = 0; it < cfg.solver_iter_cap; ++it) {
    const Eigen::VectorXd g = od.grad(q);
    bool moved = false;
    double gain = 0.0;
    for (int ls = 0; ls < 80 && !moved; ++ls) {
      const Eigen::VectorXd cand = project_onto(pr, q + step * g, kProjCapSolve);
      const double fc = od.value(cand);
      if (fc > f) {
        gain = fc - f;
        q = cand;
        f = fc;
        ++accepted;
        moved = true;
        step = std::min(step * 1.25, 1e3);
      } else {
        step *= 0.5;
        if (step < 1e-18) break;
      }
    }
    if (!moved) {  // no feasible ascent step improves: numerically at the maximum
      certified = true;
      break;
    }
    // once gains fall under the stop threshold, polish a little further so
    // every seed lands on the same point to well under the seed tolerance
    if (gain < cfg.solver_improve_eps) {
      certified = true;
      if (++polish >= 200) break;
    }
  }
  require(certified, Errc::solver_stalled, "objective still improving at the iteration cap");
  return accepted;
}

}  // namespace

RelaxationProblem build_relaxation(const Presentation& x, const SlidingBlockCode& pi,
                                   const std::map<Word, double>& nu_words, const Potential& phi,
                                   int k, const AnalysisConfig& cfg) {
  require(k >= 1, Errc::invalid_argument, "relaxation order must be positive");
  require(pi.one_block(), Errc::invalid_argument,
          "relaxation needs a 1-block code; normalize the triple first");
  require(phi.window <= k, Errc::window_mismatch,
          "potential window exceeds the relaxation order");
  validate_potential(x, phi, cfg);
  check_nu_table(nu_words, k, cfg);

  RelaxationProblem p{x, pi, phi, k, nu_words, enumerate_words(x, k, cfg), {}, {}};
  const std::size_t n = p.words.size();

  p.rows.emplace_back(n, 1.0);  // normalization
  p.rhs.push_back(1.0);

  if (k > 1) {  // left and right (k-1)-marginals agree
    const std::vector<Word> margs = enumerate_words(x, k - 1, cfg);
    for (const Word& s : margs) {
      std::vector<double> row(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (subword(p.words[i], 0, s.size()) == s) row[i] += 1.0;
        if (subword(p.words[i], 1, s.size()) == s) row[i] -= 1.0;
      }
      p.rows.push_back(std::move(row));
      p.rhs.push_back(0.0);
    }
  }

  std::map<Word, std::vector<std::size_t>> fibers;  // image word -> variable group
  for (std::size_t i = 0; i < n; ++i) fibers[pi.apply(p.words[i])].push_back(i);
  for (const auto& [v, unused] : nu_words) {
    (void)unused;
    if (static_cast<int>(v.size()) != k) continue;
    require(nu_words.at(v) <= cfg.tol_measure || fibers.count(v) == 1, Errc::infeasible,
            "target gives positive probability to a word with no preimage");
  }
  for (const auto& [v, group] : fibers) {
    std::vector<double> row(n, 0.0);
    for (std::size_t i : group) row[i] = 1.0;
    const auto it = nu_words.find(v);
    p.rows.push_back(std::move(row));
    p.rhs.push_back(it == nu_words.end() ? 0.0 : it->second);
  }

  // certify a feasible point exists before anyone tries to solve
  const AffineProjector pr(p.rows, p.rhs, n);
  Eigen::VectorXd uniform = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n),
                                                      1.0 / static_cast<double>(n));
  const Eigen::VectorXd probe = project_onto(pr, uniform, kProjCapProbe);
  require(pr.residual(probe) <= cfg.tol_residual, Errc::infeasible,
          "target is not a pushforward of any word distribution at this order");
  return p;
}

RelaxationProblem build_relaxation(const Presentation& x, const SlidingBlockCode& pi,
                                   const MarkovMeasure& nu_source, const Potential& phi, int k,
                                   const AnalysisConfig& cfg) {
  return build_relaxation(x, pi, measure_words(nu_source, k, cfg), phi, k, cfg);
}

double relaxation_objective(const RelaxationProblem& p, const std::vector<double>& q) {
  require(q.size() == p.words.size(), Errc::invalid_argument, "point has the wrong dimension");
  return ObjectiveData(p, {}).value(to_eigen(q));
}

std::vector<double> relaxation_gradient(const RelaxationProblem& p, const std::vector<double>& q) {
  require(q.size() == p.words.size(), Errc::invalid_argument, "point has the wrong dimension");
  return from_eigen(ObjectiveData(p, {}).grad(to_eigen(q)));
}

std::vector<double> project_feasible(const RelaxationProblem& p, std::vector<double> start,
                                     const AnalysisConfig& cfg) {
  require(start.size() == p.words.size(), Errc::invalid_argument, "point has the wrong dimension");
  const AffineProjector pr(p.rows, p.rhs, p.words.size());
  const Eigen::VectorXd q = project_onto(pr, to_eigen(start), kProjCapProbe);
  require(pr.residual(q) <= cfg.tol_residual, Errc::infeasible,
          "projection could not reach the constraint set");
  return from_eigen(q);
}

SolveReport solve_relaxation(const RelaxationProblem& p, int seeds, const AnalysisConfig& cfg) {
  if (seeds <= 0) seeds = cfg.solver_seeds;
  const std::size_t n = p.words.size();
  const AffineProjector pr(p.rows, p.rhs, n);
  const ObjectiveData od(p, cfg);

  std::vector<Eigen::VectorXd> optima;
  std::vector<double> values;
  int iterations = 0;
  for (int s = 0; s < seeds; ++s) {
    std::mt19937_64 gen(cfg.seed + 1'000'003ull * static_cast<std::uint64_t>(s + 1));
    Eigen::VectorXd start(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < start.size(); ++i) {
      const double u = static_cast<double>(gen() >> 11) * 0x1p-53;
      start(i) = 0.5 + u;  // interior, bounded ratio, deterministic per seed
    }
    start /= start.sum();
    Eigen::VectorXd q = project_onto(pr, start, kProjCapSolve);
    double f = 0.0;
    iterations += ascend(od, pr, q, f, cfg);
    optima.push_back(std::move(q));
    values.push_back(f);
  }

  std::size_t best = 0;
  for (std::size_t s = 1; s < optima.size(); ++s)
    if (values[s] > values[best]) best = s;
  double spread = 0.0;
  for (std::size_t a = 0; a < optima.size(); ++a)
    for (std::size_t b = a + 1; b < optima.size(); ++b)
      spread = std::max(spread, 0.5 * (optima[a] - optima[b]).lpNorm<1>());

  SolveReport rep;
  rep.value = values[best];
  rep.seeds_used = seeds;
  rep.iterations = iterations;
  rep.max_pairwise_distance = spread;
  rep.constraint_residual = pr.residual(optima[best]);
  rep.support_min = optima[best].minCoeff();
  rep.optimum.k = p.k;
  for (std::size_t i = 0; i < n; ++i)
    rep.optimum.probs[p.words[i]] = optima[best](static_cast<Eigen::Index>(i));
  require(rep.constraint_residual <= cfg.tol_residual, Errc::numeric,
          "optimum violates the constraints beyond tolerance");
  return rep;
}

SupportReport support_report(const SolveReport& r, const Presentation& x,
                             const AnalysisConfig& cfg) {
  SupportReport rep;
  rep.floor = cfg.support_floor;
  for (const Word& w : enumerate_words(x, r.optimum.k, cfg)) {
    const auto it = r.optimum.probs.find(w);
    const double q = it == r.optimum.probs.end() ? 0.0 : it->second;
    if (q <= rep.floor) rep.violations.push_back(w);
  }
  rep.full_support = rep.violations.empty();
  return rep;
}

CrosscheckReport decomposition_crosscheck(const Decomposition& d, const MarkovMeasure& nu_source,
                                          const Potential& phi, int k,
                                          const AnalysisConfig& cfg) {
  require(d.verification.ok(), Errc::invalid_argument,
          "crosscheck needs a verified decomposition");
  const Presentation& x = d.normalized.triple.x;
  const SlidingBlockCode& pi = d.normalized.triple.pi;
  const Presentation& y = d.normalized.triple.y;

  // log-transition potential whose equilibrium state is nu_source
  Potential psi{nu_source.order + 1, {}};
  for (const Word& v : enumerate_words(y, nu_source.order + 1, cfg)) {
    const double pv = word_probability(nu_source, v);
    const double pc = word_probability(nu_source, subword(v, 0, v.size() - 1));
    require(pv > 0.0 && pc > 0.0, Errc::invalid_argument,
            "crosscheck needs a full-support target measure");
    psi.values[v] = std::log(pv / pc);
  }

  // recode the first leg to a 1-block map; block symbols stand for windows
  const NormalizedTriple nb = normalize({x, d.pi1, d.ytilde}, cfg);
  const int block = nb.conj.window();
  require(k >= block + 1, Errc::invalid_argument,
          "crosscheck order must exceed the first-leg window");
  const int kb = k - block + 1;

  CrosscheckReport r;
  r.direct = solve_relaxation(build_relaxation(x, pi, nu_source, phi, k, cfg), 0, cfg);

  // unique lift of nu_source through the second leg, presented on the cover
  const RightResolvingCover cover = minimal_right_resolving(d.ytilde, cfg);
  const SlidingBlockCode through = compose(d.pi2, cover.projection, cfg);
  Potential pulled{psi.window, {}};
  for (const Word& u : enumerate_words(cover.cover_edge_sft, psi.window, cfg))
    pulled.values[u] = psi.at(through.apply(u));
  const MarkovMeasure rho = equilibrium_state(cover.cover_edge_sft, pulled, cfg);
  r.nu_tilde = pushforward_words(rho, cover.projection, kb, cfg);

  std::vector<Word> expansion(nb.triple.x.alphabet().size());
  for (const Word& u : enumerate_words(x, block, cfg))
    expansion[nb.conj.apply(u).front()] = u;
  const auto expand = [&](const Word& bw) {
    Word w = expansion[bw.front()];
    for (std::size_t i = 1; i < bw.size(); ++i) w.push_back(expansion[bw[i]].back());
    return w;
  };

  Potential phib{std::max(1, phi.window - block + 1), {}};
  for (const Word& ub : enumerate_words(nb.triple.x, phib.window, cfg))
    phib.values[ub] = phi.at(subword(expand(ub), 0, static_cast<std::size_t>(phi.window)));

  r.routed = solve_relaxation(
      build_relaxation(nb.triple.x, nb.triple.pi, r.nu_tilde, phib, kb, cfg), 0, cfg);
  for (const auto& [bw, q] : r.routed.optimum.probs) r.routed_words[expand(bw)] = q;

  r.value_gap = std::abs(r.direct.value - r.routed.value);
  double dist = 0.0;
  std::map<Word, double> joined = r.routed_words;
  for (const auto& kv : r.direct.optimum.probs) joined.insert({kv.first, 0.0});
  for (const auto& [w, qb] : joined) {
    const auto it = r.direct.optimum.probs.find(w);
    dist += std::abs((it == r.direct.optimum.probs.end() ? 0.0 : it->second) - qb);
  }
  r.table_distance = 0.5 * dist;
  r.agree = r.value_gap <= cfg.tol_seeds && r.table_distance <= cfg.tol_seeds;
  return r;
}

}  // namespace sofic
