#include "sofic/thermo.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "sofic/error.hpp"
#include "sofic/fto.hpp"

namespace sofic {

namespace {

Word subword(const Word& w, std::size_t from, std::size_t len) {
  return Word(w.begin() + static_cast<std::ptrdiff_t>(from),
              w.begin() + static_cast<std::ptrdiff_t>(from + len));
}

// Collatz-Wielandt power iteration on B + cI. The shift makes the matrix
// primitive, so the ratio bracket closes even for periodic graphs; the
// bracket itself certifies the eigenvalue at every step.
struct PerronData {
  double root = 0;
  Eigen::VectorXd right;
  Eigen::VectorXd left;
  int iterations = 0;
};

Eigen::VectorXd iterate(const Eigen::MatrixXd& m, double shift, double tol, int cap, double* root,
                        int* iters) {
  const auto n = m.rows();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
  for (int it = 1; it <= cap; ++it) {
    Eigen::VectorXd w = m * v + shift * v;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double ratio = w(i) / v(i);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
    }
    v = w / w.maxCoeff();
    if (hi - lo <= tol * hi) {
      *root = (lo + hi) / 2 - shift;
      *iters += it;
      return v;
    }
  }
  raise(Errc::numeric, "power iteration did not reach the requested tolerance");
}

PerronData perron(const Eigen::MatrixXd& b, const AnalysisConfig& cfg) {
  double rmin = b.rowwise().sum().minCoeff();
  double rmax = b.rowwise().sum().maxCoeff();
  require(rmin > 0, Errc::not_irreducible, "transfer matrix has an empty row");
  double shift = (rmin + rmax) / 2;

  PerronData out;
  double lroot = 0;
  out.right = iterate(b, shift, cfg.power_tol, cfg.power_iter_cap, &out.root, &out.iterations);
  out.left = iterate(b.transpose(), shift, cfg.power_tol, cfg.power_iter_cap, &lroot,
                     &out.iterations);
  out.left /= out.left.dot(out.right);
  return out;
}

void check_vertex(const Presentation& x, const char* who) {
  require(x.kind() == Kind::vertex_sft, Errc::invalid_argument,
          std::string(who) + " requires a vertex shift; lift sofic presentations "
                             "through their right-resolving cover");
}

Potential pull_back(const Presentation& x, const SlidingBlockCode& pi, const Potential& psi,
                    const AnalysisConfig& cfg) {
  Potential pulled;
  pulled.window = psi.window;
  for (const Word& u : enumerate_words(x, psi.window, cfg)) pulled.values[u] = psi.at(pi.apply(u));
  return pulled;
}

// pressure on a vertex shift via the transfer matrix on length-N blocks,
// N = max(window-1, 1)
struct TransferData {
  int block_len = 1;
  std::vector<Word> blocks;
  Eigen::MatrixXd matrix;
};

TransferData transfer_matrix(const Presentation& x, const Potential& phi,
                             const AnalysisConfig& cfg) {
  require(is_irreducible(x), Errc::not_irreducible, "pressure needs an irreducible shift");
  TransferData td;
  td.block_len = std::max(phi.window - 1, 1);
  td.blocks = enumerate_words(x, td.block_len, cfg);
  require(td.blocks.size() <= cfg.state_cap, Errc::resource_limit,
          "transfer matrix exceeds the state cap");

  std::map<Word, std::size_t> index;
  for (std::size_t i = 0; i < td.blocks.size(); ++i) index.emplace(td.blocks[i], i);

  const auto n = static_cast<Eigen::Index>(td.blocks.size());
  td.matrix = Eigen::MatrixXd::Zero(n, n);
  const auto len = static_cast<std::size_t>(td.block_len);
  for (const Word& w : enumerate_words(x, td.block_len + 1, cfg)) {
    auto iu = index.at(subword(w, 0, len));
    auto iv = index.at(subword(w, 1, len));
    td.matrix(static_cast<Eigen::Index>(iu), static_cast<Eigen::Index>(iv)) =
        std::exp(phi.at(subword(w, 0, static_cast<std::size_t>(phi.window))));
  }
  return td;
}

PressureValue pressure_vertex(const Presentation& x, const Potential& phi,
                              const AnalysisConfig& cfg) {
  TransferData td = transfer_matrix(x, phi, cfg);
  PerronData pd = perron(td.matrix, cfg);

  PressureValue pv;
  pv.value = std::log(pd.root);
  pv.root = pd.root;
  pv.block_len = td.block_len;
  pv.blocks = std::move(td.blocks);
  pv.right.assign(pd.right.data(), pd.right.data() + pd.right.size());
  pv.left.assign(pd.left.data(), pd.left.data() + pd.left.size());
  pv.iterations = pd.iterations;
  return pv;
}

// stationary vector of a row-stochastic chain: kernel of (P^T - I) with the
// normalization row appended, solved by least squares
Eigen::VectorXd stationary_of(const Eigen::MatrixXd& p) {
  const auto n = p.rows();
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.bottomRows(1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1;
  Eigen::VectorXd pi = a.colPivHouseholderQr().solve(b);
  require((a * pi - b).lpNorm<Eigen::Infinity>() < 1e-9, Errc::numeric,
          "stationary vector solve failed");
  for (Eigen::Index i = 0; i < n; ++i) pi(i) = std::max(pi(i), 0.0);
  return pi / pi.sum();
}

}  // namespace

double Potential::at(const Word& w) const {
  auto it = values.find(w);
  require(it != values.end(), Errc::window_mismatch, "potential is undefined on a word");
  return it->second;
}

Potential zero_potential(const Presentation& x, int window, const AnalysisConfig& cfg) {
  require(window >= 1, Errc::invalid_argument, "potential window must be positive");
  Potential phi;
  phi.window = window;
  for (const Word& w : enumerate_words(x, window, cfg)) phi.values[w] = 0.0;
  return phi;
}

Potential indicator_potential(const Presentation& x, const Word& w, double beta,
                              const AnalysisConfig& cfg) {
  require(!w.empty(), Errc::invalid_argument, "indicator word must be nonempty");
  Potential phi = zero_potential(x, static_cast<int>(w.size()), cfg);
  auto it = phi.values.find(w);
  require(it != phi.values.end(), Errc::not_in_language, "indicator word is not in the language");
  it->second = beta;
  return phi;
}

void validate_potential(const Presentation& x, const Potential& phi, const AnalysisConfig& cfg) {
  require(phi.window >= 1, Errc::invalid_argument, "potential window must be positive");
  auto words = enumerate_words(x, phi.window, cfg);
  for (const Word& w : words) {
    auto it = phi.values.find(w);
    require(it != phi.values.end(), Errc::window_mismatch,
            "potential is missing the word " + x.alphabet().format(w));
    require(std::isfinite(it->second), Errc::invalid_argument, "potential value is not finite");
  }
  require(phi.values.size() == words.size(), Errc::invalid_argument,
          "potential table carries words outside the language");
}

Potential cocycle_sum(const Presentation& x, const Potential& phi, int m,
                      const AnalysisConfig& cfg) {
  require(m >= 1, Errc::invalid_argument, "cocycle length must be positive");
  validate_potential(x, phi, cfg);
  Potential out;
  out.window = phi.window + m - 1;
  const auto k = static_cast<std::size_t>(phi.window);
  for (const Word& w : enumerate_words(x, out.window, cfg)) {
    double s = 0;
    for (int j = 0; j < m; ++j) s += phi.at(subword(w, static_cast<std::size_t>(j), k));
    out.values[w] = s;
  }
  return out;
}

std::optional<std::size_t> MarkovMeasure::context_index(const Word& w) const {
  auto it = std::lower_bound(contexts.begin(), contexts.end(), w);
  if (it == contexts.end() || *it != w) return std::nullopt;
  return static_cast<std::size_t>(it - contexts.begin());
}

void validate_measure(const Presentation& x, const MarkovMeasure& mu, const AnalysisConfig& cfg) {
  require(mu.order >= 1, Errc::invalid_argument, "measure order must be positive");
  require(mu.contexts.size() == mu.transitions.size() &&
              mu.contexts.size() == mu.stationary.size(),
          Errc::invalid_argument, "measure fields disagree in size");
  require(std::is_sorted(mu.contexts.begin(), mu.contexts.end()), Errc::invalid_argument,
          "contexts must be sorted");

  double total = 0;
  std::vector<double> next(mu.contexts.size(), 0.0);
  for (std::size_t i = 0; i < mu.contexts.size(); ++i) {
    const Word& c = mu.contexts[i];
    require(c.size() == static_cast<std::size_t>(mu.order), Errc::invalid_argument,
            "context has the wrong length");
    require(x.contains_word(c), Errc::not_in_language,
            "context " + x.alphabet().format(c) + " is outside the language");
    require(mu.stationary[i] >= -1e-15, Errc::invalid_argument, "negative stationary mass");
    total += mu.stationary[i];

    double row = 0;
    for (const auto& [a, p] : mu.transitions[i]) {
      require(p >= -1e-15, Errc::invalid_argument, "negative transition probability");
      Word target = subword(c, 1, c.size() - 1);
      target.push_back(a);
      auto j = mu.context_index(target);
      require(j.has_value(), Errc::not_in_language, "transition leaves the context set");
      if (p > 0) next[*j] += mu.stationary[i] * p;
      row += p;
    }
    require(std::abs(row - 1.0) <= 1e-12, Errc::invalid_argument, "transition row does not sum to 1");
  }
  require(std::abs(total - 1.0) <= 1e-12, Errc::invalid_argument,
          "stationary vector does not sum to 1");
  for (std::size_t i = 0; i < next.size(); ++i)
    require(std::abs(next[i] - mu.stationary[i]) <= 1e-12, Errc::invalid_argument,
            "stationary vector is not invariant");
  (void)cfg;
}

MarkovMeasure make_markov(const Presentation& x, int order,
                          const std::vector<std::map<SymbolId, double>>& transitions,
                          const AnalysisConfig& cfg) {
  require(order >= 1, Errc::invalid_argument, "measure order must be positive");
  MarkovMeasure mu;
  mu.order = order;
  mu.contexts = enumerate_words(x, order, cfg);
  require(mu.contexts.size() == transitions.size(), Errc::invalid_argument,
          "one transition row per length-" + std::to_string(order) + " word expected");
  mu.transitions = transitions;

  const auto n = static_cast<Eigen::Index>(mu.contexts.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < mu.contexts.size(); ++i) {
    double row = 0;
    for (auto& [a, q] : mu.transitions[i]) {
      Word target = subword(mu.contexts[i], 1, mu.contexts[i].size() - 1);
      target.push_back(a);
      auto j = mu.context_index(target);
      require(j.has_value(), Errc::not_in_language, "transition leaves the language");
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j)) += q;
      row += q;
    }
    require(std::abs(row - 1.0) <= 1e-12, Errc::invalid_argument,
            "transition row does not sum to 1");
  }

  Eigen::VectorXd st = stationary_of(p);
  mu.stationary.assign(st.data(), st.data() + st.size());
  validate_measure(x, mu, cfg);
  return mu;
}

MarkovMeasure bernoulli_measure(const Presentation& x, const std::vector<double>& probs,
                                const AnalysisConfig& cfg) {
  require(probs.size() == x.alphabet().size(), Errc::invalid_argument,
          "one probability per symbol expected");
  std::map<SymbolId, double> row;
  for (std::size_t a = 0; a < probs.size(); ++a)
    if (probs[a] > 0) row.emplace(static_cast<SymbolId>(a), probs[a]);
  std::vector<std::map<SymbolId, double>> rows(enumerate_words(x, 1, cfg).size(), row);
  return make_markov(x, 1, rows, cfg);
}

double word_probability(const MarkovMeasure& mu, const Word& w) {
  if (w.empty()) return 1.0;
  const auto order = static_cast<std::size_t>(mu.order);
  if (w.size() <= order) {
    double p = 0;
    for (std::size_t i = 0; i < mu.contexts.size(); ++i)
      if (std::equal(w.begin(), w.end(), mu.contexts[i].begin())) p += mu.stationary[i];
    return p;
  }
  auto idx = mu.context_index(subword(w, 0, order));
  if (!idx) return 0.0;
  double p = mu.stationary[*idx];
  std::size_t at = *idx;
  for (std::size_t i = order; i < w.size() && p > 0; ++i) {
    auto it = mu.transitions[at].find(w[i]);
    if (it == mu.transitions[at].end()) return 0.0;
    p *= it->second;
    auto next = mu.context_index(subword(w, i - order + 1, order));
    if (!next) return 0.0;
    at = *next;
  }
  return p;
}

std::map<Word, double> measure_words(const MarkovMeasure& mu, int max_len,
                                     const AnalysisConfig& cfg) {
  require(max_len >= 1, Errc::invalid_argument, "word length must be positive");
  std::map<Word, double> out;
  std::map<Word, std::pair<double, std::size_t>> level;  // word -> (prob, end context)

  for (int len = 1; len <= max_len; ++len) {
    std::map<Word, std::pair<double, std::size_t>> next;
    if (len <= mu.order) {
      for (std::size_t i = 0; i < mu.contexts.size(); ++i) {
        if (mu.stationary[i] <= 0) continue;
        Word prefix = subword(mu.contexts[i], 0, static_cast<std::size_t>(len));
        auto [it, fresh] = next.emplace(prefix, std::make_pair(0.0, i));
        it->second.first += mu.stationary[i];
        if (!fresh) it->second.second = i;  // end context only matters at len == order
      }
    } else {
      for (const auto& [w, pc] : level) {
        for (const auto& [a, q] : mu.transitions[pc.second]) {
          if (q <= 0) continue;
          Word target = subword(mu.contexts[pc.second], 1, mu.contexts[pc.second].size() - 1);
          target.push_back(a);
          auto j = mu.context_index(target);
          Word ext = w;
          ext.push_back(a);
          next.emplace(ext, std::make_pair(pc.first * q, *j));
        }
      }
    }
    require(next.size() <= cfg.word_cap, Errc::resource_limit, "word table exceeds the cap");
    for (const auto& [w, pc] : next) out.emplace(w, pc.first);
    level = std::move(next);
  }
  return out;
}

PressureValue pressure(const Presentation& x, const Potential& phi, const AnalysisConfig& cfg) {
  validate_potential(x, phi, cfg);
  if (x.kind() == Kind::vertex_sft) return pressure_vertex(x, phi, cfg);
  auto cover = minimal_right_resolving(x, cfg);
  Potential pulled = pull_back(cover.cover_edge_sft, cover.projection, phi, cfg);
  return pressure_vertex(cover.cover_edge_sft, pulled, cfg);
}

MarkovMeasure equilibrium_state(const Presentation& x, const Potential& phi,
                                const AnalysisConfig& cfg) {
  check_vertex(x, "equilibrium_state");
  validate_potential(x, phi, cfg);
  TransferData td = transfer_matrix(x, phi, cfg);
  PerronData pd = perron(td.matrix, cfg);

  MarkovMeasure mu;
  mu.order = td.block_len;
  mu.contexts = td.blocks;
  mu.transitions.resize(mu.contexts.size());
  mu.stationary.resize(mu.contexts.size());

  const auto n = static_cast<Eigen::Index>(mu.contexts.size());
  const auto len = mu.contexts.empty() ? 0 : mu.contexts.front().size();
  double mass = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double row = 0;
    auto iu = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      if (td.matrix(i, j) <= 0) continue;
      SymbolId a = mu.contexts[static_cast<std::size_t>(j)][len - 1];
      double p = td.matrix(i, j) * pd.right(j) / (pd.root * pd.right(i));
      mu.transitions[iu][a] = p;
      row += p;
    }
    for (auto& [a, p] : mu.transitions[iu]) p /= row;  // kill eigen residual drift
    mu.stationary[iu] = pd.left(i) * pd.right(i);
    mass += mu.stationary[iu];
  }
  for (auto& s : mu.stationary) s /= mass;

  validate_measure(x, mu, cfg);
  return mu;
}

double entropy(const MarkovMeasure& mu) {
  double h = 0;
  for (std::size_t i = 0; i < mu.contexts.size(); ++i) {
    if (mu.stationary[i] <= 0) continue;
    for (const auto& [a, p] : mu.transitions[i]) {
      (void)a;
      if (p > 0) h -= mu.stationary[i] * p * std::log(p);
    }
  }
  return h;
}

double measure_pressure(const MarkovMeasure& mu, const Potential& phi, const AnalysisConfig& cfg) {
  double acc = 0;
  for (const auto& [w, p] : measure_words(mu, phi.window, cfg))
    if (w.size() == static_cast<std::size_t>(phi.window)) acc += p * phi.at(w);
  return entropy(mu) + acc;
}

std::map<Word, double> pushforward_words(const MarkovMeasure& mu, const SlidingBlockCode& pi,
                                         int max_len, const AnalysisConfig& cfg) {
  require(pi.one_block(), Errc::invalid_argument, "pushforward expects a one-block code");
  std::map<Word, double> out;
  for (const auto& [w, p] : measure_words(mu, max_len, cfg)) {
    auto [it, fresh] = out.emplace(pi.apply(w), p);
    if (!fresh) it->second += p;
  }
  return out;
}

TuncelLift tuncel_lift(const Presentation& x, const SlidingBlockCode& pi, const Presentation& y,
                       const Potential& psi, int word_len, const AnalysisConfig& cfg) {
  check_vertex(x, "tuncel_lift");
  require(is_finite_to_one(x, pi, cfg), Errc::not_finite_to_one,
          "the lift is unique only through finite-to-one codes");

  TuncelLift out;
  out.word_len = word_len > 0 ? word_len : cfg.length_cap;
  out.pulled = pull_back(x, pi, psi, cfg);
  out.lift = equilibrium_state(x, out.pulled, cfg);
  out.pressure_domain = pressure(x, out.pulled, cfg).value;
  out.pressure_image = pressure(y, psi, cfg).value;

  std::map<Word, double> pushed = pushforward_words(out.lift, pi, out.word_len, cfg);
  std::map<Word, double> image;
  if (y.kind() == Kind::vertex_sft) {
    image = measure_words(equilibrium_state(y, psi, cfg), out.word_len, cfg);
  } else {
    auto cover = minimal_right_resolving(y, cfg);
    Potential lifted = pull_back(cover.cover_edge_sft, cover.projection, psi, cfg);
    image = pushforward_words(equilibrium_state(cover.cover_edge_sft, lifted, cfg),
                              cover.projection, out.word_len, cfg);
  }

  double gap = 0;
  for (const auto& [w, p] : pushed) {
    auto it = image.find(w);
    gap = std::max(gap, std::abs(p - (it == image.end() ? 0.0 : it->second)));
  }
  for (const auto& [w, p] : image)
    if (!pushed.count(w)) gap = std::max(gap, p);
  out.word_gap = gap;
  out.pushforward_ok = gap <= cfg.tol_push;
  out.pressure_ok = std::abs(out.pressure_domain - out.pressure_image) <= cfg.tol_push;
  return out;
}

EntropyBounds relative_entropy_bounds(const MarkovMeasure& mu, const SlidingBlockCode& pi,
                                      int max_len, const AnalysisConfig& cfg) {
  require(pi.one_block(), Errc::invalid_argument, "entropy bounds expect a one-block code");
  require(max_len >= 2, Errc::invalid_argument, "need at least two word lengths");

  const auto n = static_cast<Eigen::Index>(mu.contexts.size());
  const std::size_t m = pi.codomain().size();

  // emission chain: one step of the context chain emits the image of the
  // new symbol; per-image-symbol transition matrices
  std::vector<Eigen::MatrixXd> emit(m, Eigen::MatrixXd::Zero(n, n));
  bool unifilar = true;  // no two positive successors of a context share a label
  double exact_image = 0;
  for (std::size_t i = 0; i < mu.contexts.size(); ++i) {
    std::map<SymbolId, double> labels;
    for (const auto& [a, p] : mu.transitions[i]) {
      Word target = subword(mu.contexts[i], 1, mu.contexts[i].size() - 1);
      target.push_back(a);
      auto j = mu.context_index(target);
      require(j.has_value(), Errc::not_in_language, "transition leaves the language");
      emit[pi.map_symbol(a)](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j)) += p;
      if (p > 0 && mu.stationary[i] > 0)
        unifilar = unifilar && labels.emplace(pi.map_symbol(a), p).second;
    }
    for (const auto& [y, p] : labels) {
      (void)y;
      exact_image -= mu.stationary[i] * p * std::log(p);
    }
  }

  if (unifilar) {
    // the hidden path is a function of the start context and the labels, so
    // the image entropy is exactly the expected label entropy per step
    EntropyBounds out;
    out.length = max_len;
    out.h_domain = entropy(mu);
    out.image_lower = out.image_upper = exact_image;
    out.lower = out.upper = out.h_domain - exact_image;
    return out;
  }

  // word entropies H_l of the image (frontier of alpha vectors), and the
  // same conditioned on the hidden start context
  auto entropy_series = [&](const Eigen::RowVectorXd& start) {
    std::vector<double> h{0.0};
    std::map<Word, Eigen::RowVectorXd> frontier{{Word{}, start}};
    for (int len = 1; len <= max_len; ++len) {
      std::map<Word, Eigen::RowVectorXd> next;
      double acc = 0;
      for (const auto& [w, alpha] : frontier)
        for (std::size_t y = 0; y < m; ++y) {
          Eigen::RowVectorXd beta = alpha * emit[y];
          double p = beta.sum();
          if (p <= 0) continue;
          Word ext = w;
          ext.push_back(static_cast<SymbolId>(y));
          acc -= p * std::log(p);
          next.emplace(std::move(ext), std::move(beta));
        }
      require(next.size() <= cfg.word_cap, Errc::resource_limit,
              "image word table exceeds the cap");
      h.push_back(acc);
      frontier = std::move(next);
    }
    return h;
  };

  Eigen::RowVectorXd stat(n);
  for (Eigen::Index i = 0; i < n; ++i) stat(i) = mu.stationary[static_cast<std::size_t>(i)];
  std::vector<double> joint = entropy_series(stat);

  std::vector<double> conditioned(static_cast<std::size_t>(max_len) + 1, 0.0);
  for (Eigen::Index c = 0; c < n; ++c) {
    double w = mu.stationary[static_cast<std::size_t>(c)];
    if (w <= 0) continue;
    std::vector<double> hc = entropy_series(Eigen::RowVectorXd::Unit(n, c));
    for (std::size_t l = 0; l < hc.size(); ++l) conditioned[l] += w * hc[l];
  }

  EntropyBounds out;
  out.length = max_len;
  out.h_domain = entropy(mu);
  out.image_upper = joint[static_cast<std::size_t>(max_len)] / max_len;
  out.image_lower = 0;
  for (int l = 1; l <= max_len; ++l) {
    auto ul = static_cast<std::size_t>(l);
    out.image_upper = std::min(out.image_upper, joint[ul] - joint[ul - 1]);
    out.image_lower = std::max(out.image_lower, conditioned[ul] - conditioned[ul - 1]);
  }
  out.image_lower = std::min(out.image_lower, out.image_upper);
  out.lower = out.h_domain - out.image_upper;
  out.upper = out.h_domain - out.image_lower;
  return out;
}

}  // namespace sofic
