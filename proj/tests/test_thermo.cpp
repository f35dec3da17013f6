#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sofic/error.hpp"
#include "sofic/fixtures.hpp"
#include "sofic/thermo.hpp"

using namespace sofic;
using namespace sofic::fixtures;

namespace {

constexpr double kLog2 = 0.6931471805599453;
const double kGolden = (1.0 + std::sqrt(5.0)) / 2.0;

double runif(std::mt19937& gen) { return (gen() >> 5) * (1.0 / 134217728.0); }

Potential random_potential(const Presentation& x, int window, std::mt19937& gen) {
  Potential phi = zero_potential(x, window);
  for (auto& [w, v] : phi.values) {
    (void)w;
    v = 2.0 * runif(gen) - 1.0;
  }
  return phi;
}

MarkovMeasure random_markov(const Presentation& x, std::mt19937& gen) {
  std::vector<std::map<SymbolId, double>> rows;
  for (const Word& c : enumerate_words(x, 1)) {
    std::map<SymbolId, double> row;
    double total = 0;
    for (SymbolId a : x.successors(c[0])) {
      double v = 0.1 + runif(gen);
      row[a] = v;
      total += v;
    }
    for (auto& [a, v] : row) {
      (void)a;
      v /= total;
    }
    rows.push_back(std::move(row));
  }
  return make_markov(x, 1, rows);
}

// spectral radius by dense eigendecomposition, independent of the power
// iteration under test
double spectral_radius_oracle(const Presentation& x, const Potential& phi) {
  int n = std::max(phi.window - 1, 1);
  auto blocks = enumerate_words(x, n);
  std::map<Word, int> index;
  for (std::size_t i = 0; i < blocks.size(); ++i) index[blocks[i]] = static_cast<int>(i);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(blocks.size()),
                                            static_cast<Eigen::Index>(blocks.size()));
  for (const Word& w : enumerate_words(x, n + 1)) {
    Word u(w.begin(), w.end() - 1), v(w.begin() + 1, w.end());
    Word arg(w.begin(), w.begin() + phi.window);
    b(index.at(u), index.at(v)) = std::exp(phi.values.at(arg));
  }
  return b.eigenvalues().cwiseAbs().maxCoeff();
}

// m-th power shift: symbols are length-m words, adjacency by concatenation
struct PowerShift {
  Presentation p;
  std::vector<Word> blocks;
};

PowerShift power_shift(const Presentation& x, int m) {
  std::vector<Word> blocks = enumerate_words(x, m);
  Alphabet a;
  for (const Word& w : blocks) a.display.push_back(x.alphabet().format(w));
  std::vector<std::vector<SymbolId>> succ(blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = 0; j < blocks.size(); ++j) {
      Word cat = blocks[i];
      cat.insert(cat.end(), blocks[j].begin(), blocks[j].end());
      if (x.contains_word(cat)) succ[i].push_back(static_cast<SymbolId>(j));
    }
  return {make_vertex_sft(a, succ), std::move(blocks)};
}

}  // namespace

TEST_CASE("cocycle sums") {
  Presentation full2 = full_shift(2);
  std::mt19937 gen(11);
  Potential phi = random_potential(full2, 2, gen);

  SUBCASE("one term leaves the potential unchanged") {
    Potential s1 = cocycle_sum(full2, phi, 1);
    CHECK(s1.window == phi.window);
    for (const auto& [w, v] : phi.values) CHECK(s1.values.at(w) == doctest::Approx(v));
  }
  SUBCASE("constants add up") {
    Potential c = zero_potential(full2, 1);
    for (auto& [w, v] : c.values) {
      (void)w;
      v = 0.7;
    }
    Potential s = cocycle_sum(full2, c, 5);
    CHECK(s.window == 5);
    for (const auto& [w, v] : s.values) {
      (void)w;
      CHECK(v == doctest::Approx(3.5).epsilon(1e-12));
    }
  }
  SUBCASE("indicator of a symbol counts its occurrences") {
    Word one = full2.alphabet().parse_word("1");
    Potential ind = indicator_potential(full2, one, 1.0);
    Potential s2 = cocycle_sum(full2, ind, 2);
    auto at = [&](const char* w) { return s2.values.at(full2.alphabet().parse_word(w)); };
    CHECK(at("00") == doctest::Approx(0.0));
    CHECK(at("01") == doctest::Approx(1.0));
    CHECK(at("10") == doctest::Approx(1.0));
    CHECK(at("11") == doctest::Approx(2.0));
  }
  SUBCASE("bad tables are rejected") {
    Potential missing = phi;
    missing.values.erase(missing.values.begin());
    CHECK_THROWS_AS(validate_potential(full2, missing), Error);
    Potential excess = phi;
    excess.values[Word{0, 0, 0}] = 1.0;  // wrong length, never in the window language
    CHECK_THROWS_AS(validate_potential(full2, excess), Error);
    CHECK_THROWS_AS(cocycle_sum(full2, phi, 0), Error);
  }
}

TEST_CASE("pressure hits the classical constants") {
  Presentation full2 = full_shift(2);
  Presentation gm = golden_mean();

  auto p2 = pressure(full2, zero_potential(full2));
  CHECK(p2.value == doctest::Approx(kLog2).epsilon(1e-13));

  auto pg = pressure(gm, zero_potential(gm));
  CHECK(pg.value == doctest::Approx(std::log(kGolden)).epsilon(1e-12));

  // weighting symbol 1 by log 3 doubles the root: log(1 + 3) on the full shift
  Potential ind = indicator_potential(full2, full2.alphabet().parse_word("1"), std::log(3.0));
  CHECK(pressure(full2, ind).value == doctest::Approx(std::log(4.0)).epsilon(1e-12));

  // sofic input goes through the right-resolving cover; the even shift has
  // the same entropy as the golden mean
  Presentation even = even_shift();
  CHECK(pressure(even, zero_potential(even)).value ==
        doctest::Approx(std::log(kGolden)).epsilon(1e-10));

  SUBCASE("eigen data is strictly positive and normalized") {
    for (const auto& pv : {p2, pg}) {
      double dot = 0;
      for (std::size_t i = 0; i < pv.right.size(); ++i) {
        CHECK(pv.right[i] > 0);
        CHECK(pv.left[i] > 0);
        dot += pv.right[i] * pv.left[i];
      }
      CHECK(dot == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("power iteration agrees with a dense eigensolver") {
    std::mt19937 gen(23);
    for (unsigned seed : {7u, 8u, 9u}) {
      Presentation x = random_irreducible(seed, 5, 6);
      for (int window : {1, 2}) {
        Potential phi = random_potential(x, window, gen);
        CHECK(pressure(x, phi).root ==
              doctest::Approx(spectral_radius_oracle(x, phi)).epsilon(1e-10));
      }
    }
  }
  SUBCASE("disconnected graphs are rejected") {
    Alphabet ab;
    ab.display = {"a", "b"};
    Presentation loops = make_vertex_sft(ab, {{0}, {1}});
    CHECK_THROWS_AS(pressure(loops, zero_potential(loops)), Error);
    try {
      pressure(loops, zero_potential(loops));
    } catch (const Error& e) {
      CHECK(e.code() == Errc::not_irreducible);
    }
  }
}

TEST_CASE("equilibrium states carry the Gibbs transition rule") {
  Presentation full2 = full_shift(2);
  Presentation gm = golden_mean();

  SUBCASE("maximal measure of the full shift is uniform") {
    MarkovMeasure mu = equilibrium_state(full2, zero_potential(full2));
    CHECK(mu.order == 1);
    for (std::size_t i = 0; i < mu.contexts.size(); ++i) {
      CHECK(mu.stationary[i] == doctest::Approx(0.5).epsilon(1e-12));
      for (const auto& [a, p] : mu.transitions[i]) {
        (void)a;
        CHECK(p == doctest::Approx(0.5).epsilon(1e-12));
      }
    }
    CHECK(entropy(mu) == doctest::Approx(kLog2).epsilon(1e-12));
  }
  SUBCASE("Parry measure of the golden mean") {
    MarkovMeasure mu = equilibrium_state(gm, zero_potential(gm));
    auto zero = *gm.alphabet().find("0");
    auto one = *gm.alphabet().find("1");
    auto i0 = *mu.context_index(Word{zero});
    auto i1 = *mu.context_index(Word{one});
    CHECK(mu.transitions[i0][zero] == doctest::Approx(1.0 / kGolden).epsilon(1e-10));
    CHECK(mu.transitions[i0][one] == doctest::Approx(1.0 - 1.0 / kGolden).epsilon(1e-10));
    CHECK(mu.transitions[i1][zero] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(entropy(mu) == doctest::Approx(std::log(kGolden)).epsilon(1e-10));
  }
  SUBCASE("weighted full shift gives a Bernoulli state") {
    Potential ind = indicator_potential(full2, full2.alphabet().parse_word("1"), std::log(3.0));
    MarkovMeasure mu = equilibrium_state(full2, ind);
    auto one = *full2.alphabet().find("1");
    for (std::size_t i = 0; i < mu.contexts.size(); ++i) {
      CHECK(mu.transitions[i][one] == doctest::Approx(0.75).epsilon(1e-10));
      CHECK(mu.stationary[i] == doctest::Approx(mu.contexts[i][0] == one ? 0.75 : 0.25));
    }
    CHECK(measure_pressure(mu, ind) == doctest::Approx(std::log(4.0)).epsilon(1e-10));
  }
  SUBCASE("cycles have zero entropy") {
    std::map<SymbolId, double> to0{{0, 1.0}}, to1{{1, 1.0}};
    MarkovMeasure cyc = make_markov(full2, 1, {to1, to0});
    CHECK(entropy(cyc) == doctest::Approx(0.0));
  }
  SUBCASE("sofic domains are refused") {
    Presentation even = even_shift();
    CHECK_THROWS_AS(equilibrium_state(even, zero_potential(even)), Error);
  }
}

TEST_CASE("variational principle on random measures") {
  std::mt19937 gen(31);
  for (const auto* name : {"golden", "full2"}) {
    Presentation x = std::string(name) == "golden" ? golden_mean() : full_shift(2);
    for (int window : {1, 2}) {
      Potential phi = random_potential(x, window, gen);
      double top = pressure(x, phi).value;
      MarkovMeasure eq = equilibrium_state(x, phi);
      CHECK(measure_pressure(eq, phi) == doctest::Approx(top).epsilon(1e-10));
      for (int trial = 0; trial < 8; ++trial) {
        MarkovMeasure mu = random_markov(x, gen);
        CHECK(measure_pressure(mu, phi) <= top + 1e-9);
      }
    }
  }
}

TEST_CASE("equilibrium word probabilities follow the eigenvector formula") {
  Presentation gm = golden_mean();
  std::mt19937 gen(41);
  Potential phi = random_potential(gm, 2, gen);
  auto pv = pressure(gm, phi);
  MarkovMeasure mu = equilibrium_state(gm, phi);

  for (int len = 1; len <= 6; ++len) {
    for (const Word& w : enumerate_words(gm, len)) {
      double sum = 0;
      for (std::size_t i = 0; i + 1 < w.size(); ++i)
        sum += phi.values.at(Word{w[i], w[i + 1]});
      auto i0 = *mu.context_index(Word{w.front()});
      auto i1 = *mu.context_index(Word{w.back()});
      double gibbs = pv.left[i0] * pv.right[i1] * std::exp(sum) /
                     std::pow(pv.root, static_cast<double>(len - 1));
      CHECK(word_probability(mu, w) == doctest::Approx(gibbs).epsilon(1e-9));
    }
  }
}

TEST_CASE("word tables and pushforwards") {
  SUBCASE("levels sum to one and marginalize consistently") {
    Presentation gm = golden_mean();
    MarkovMeasure parry = equilibrium_state(gm, zero_potential(gm));
    auto table = measure_words(parry, 7);
    for (int len = 1; len <= 7; ++len) {
      double level = 0;
      for (const auto& [w, p] : table)
        if (static_cast<int>(w.size()) == len) level += p;
      CHECK(level == doctest::Approx(1.0).epsilon(1e-10));
    }
    for (const auto& [w, p] : table) {
      if (w.size() >= 7) continue;
      double ext = 0;
      for (const auto& [w2, p2] : table)
        if (w2.size() == w.size() + 1 && std::equal(w.begin(), w.end(), w2.begin())) ext += p2;
      CHECK(ext == doctest::Approx(p).epsilon(1e-12));
    }
  }
  SUBCASE("identity pushforward is the measure itself") {
    Presentation gm = golden_mean();
    MarkovMeasure parry = equilibrium_state(gm, zero_potential(gm));
    auto direct = measure_words(parry, 5);
    auto pushed = pushforward_words(parry, identity_code(gm), 5);
    REQUIRE(direct.size() == pushed.size());
    for (const auto& [w, p] : direct) CHECK(pushed.at(w) == doctest::Approx(p).epsilon(1e-12));
  }
  SUBCASE("merging symbols merges their weights") {
    auto t = normalize(merge_triple());
    const auto& x = t.triple.x;
    MarkovMeasure mu = bernoulli_measure(x, {0.5, 0.25, 0.25});
    auto pushed = pushforward_words(mu, t.triple.pi, 6);
    for (const auto& [v, p] : pushed)
      CHECK(p == doctest::Approx(std::pow(0.5, static_cast<double>(v.size()))).epsilon(1e-12));
  }
  SUBCASE("parity code spreads the uniform measure uniformly") {
    auto t = normalize(xor_triple());
    const auto& x = t.triple.x;
    std::vector<std::map<SymbolId, double>> rows;
    for (const Word& c : enumerate_words(x, 1)) {
      std::map<SymbolId, double> row;
      for (SymbolId a : x.successors(c[0])) row[a] = 0.5;
      rows.push_back(std::move(row));
    }
    MarkovMeasure mu = make_markov(x, 1, rows);
    auto pushed = pushforward_words(mu, t.triple.pi, 6);
    int seen = 0;
    for (const auto& [v, p] : pushed) {
      CHECK(p == doctest::Approx(std::pow(0.5, static_cast<double>(v.size()))).epsilon(1e-12));
      ++seen;
    }
    CHECK(seen == 2 + 4 + 8 + 16 + 32 + 64);
  }
  SUBCASE("wide codes are rejected") {
    auto t = xor_triple();  // unnormalized: window 2
    MarkovMeasure mu = bernoulli_measure(t.x, {0.5, 0.5});
    CHECK_THROWS_AS(pushforward_words(mu, t.pi, 3), Error);
  }
}

TEST_CASE("finite-to-one lifts of equilibrium states") {
  SUBCASE("identity lifts psi to itself") {
    Presentation gm = golden_mean();
    std::mt19937 gen(53);
    Potential psi = random_potential(gm, 2, gen);
    auto lift = tuncel_lift(gm, identity_code(gm), gm, psi, 8);
    MarkovMeasure eq = equilibrium_state(gm, psi);
    CHECK(lift.pushforward_ok);
    CHECK(lift.pressure_ok);
    CHECK(lift.word_gap < 1e-10);
    REQUIRE(lift.lift.contexts == eq.contexts);
    for (std::size_t i = 0; i < eq.contexts.size(); ++i)
      CHECK(lift.lift.stationary[i] == doctest::Approx(eq.stationary[i]).epsilon(1e-10));
  }
  SUBCASE("parity code lifts the coin flip to the coin flip") {
    auto t = normalize(xor_triple());
    auto lift = tuncel_lift(t.triple.x, t.triple.pi, t.triple.y, zero_potential(t.triple.y), 8);
    CHECK(lift.pushforward_ok);
    CHECK(lift.pressure_ok);
    CHECK(lift.pressure_domain == doctest::Approx(kLog2).epsilon(1e-12));
    for (std::size_t i = 0; i < lift.lift.contexts.size(); ++i)
      CHECK(lift.lift.stationary[i] == doctest::Approx(0.25).epsilon(1e-10));
  }
  SUBCASE("weighted image potential still lifts exactly") {
    auto t = normalize(xor_triple());
    Potential psi =
        indicator_potential(t.triple.y, t.triple.y.alphabet().parse_word("1"), std::log(3.0));
    auto lift = tuncel_lift(t.triple.x, t.triple.pi, t.triple.y, psi, 8);
    CHECK(lift.pushforward_ok);
    CHECK(lift.pressure_ok);
    CHECK(lift.pressure_image == doctest::Approx(std::log(4.0)).epsilon(1e-10));
  }
  SUBCASE("cover projection lifts the even shift's maximal measure") {
    auto t = normalize(even_cover_triple());
    auto lift = tuncel_lift(t.triple.x, t.triple.pi, t.triple.y, zero_potential(t.triple.y), 10);
    CHECK(lift.pushforward_ok);
    CHECK(lift.pressure_ok);
    CHECK(lift.pressure_domain == doctest::Approx(std::log(kGolden)).epsilon(1e-10));
  }
  SUBCASE("infinite-to-one codes are refused") {
    auto t = normalize(merge_triple());
    CHECK_THROWS_AS(
        tuncel_lift(t.triple.x, t.triple.pi, t.triple.y, zero_potential(t.triple.y), 4), Error);
    try {
      tuncel_lift(t.triple.x, t.triple.pi, t.triple.y, zero_potential(t.triple.y), 4);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::not_finite_to_one);
    }
  }
}

TEST_CASE("relative entropy brackets") {
  SUBCASE("identity collapses to zero") {
    Presentation gm = golden_mean();
    MarkovMeasure parry = equilibrium_state(gm, zero_potential(gm));
    auto b = relative_entropy_bounds(parry, identity_code(gm), 6);
    CHECK(b.lower <= 0.0 + 1e-12);
    CHECK(b.upper >= 0.0 - 1e-12);
    CHECK(b.width() < 1e-9);
  }
  SUBCASE("parity code loses nothing") {
    auto t = normalize(xor_triple());
    std::vector<std::map<SymbolId, double>> rows;
    for (const Word& c : enumerate_words(t.triple.x, 1)) {
      std::map<SymbolId, double> row;
      for (SymbolId a : t.triple.x.successors(c[0])) row[a] = 0.5;
      rows.push_back(std::move(row));
    }
    MarkovMeasure mu = make_markov(t.triple.x, 1, rows);
    auto b = relative_entropy_bounds(mu, t.triple.pi, 8);
    CHECK(b.lower <= 1e-12);
    CHECK(b.upper >= -1e-12);
    CHECK(b.width() < 1e-9);
  }
  SUBCASE("merging half the alphabet costs half a bit") {
    auto t = normalize(merge_triple());
    MarkovMeasure mu = bernoulli_measure(t.triple.x, {0.5, 0.25, 0.25});
    auto b = relative_entropy_bounds(mu, t.triple.pi, 8);
    const double expected = 0.5 * kLog2;
    CHECK(b.lower <= expected + 1e-9);
    CHECK(b.upper >= expected - 1e-9);
    CHECK(b.width() < 1e-9);
    CHECK(b.h_domain == doctest::Approx(1.5 * kLog2).epsilon(1e-12));
  }
  SUBCASE("right-resolving emission resolves the image entropy exactly") {
    // labels out of each cover state are distinct, so the hidden path is a
    // function of the start state and the labels: zero-width bracket
    auto t = normalize(even_cover_triple());
    MarkovMeasure parry = equilibrium_state(t.triple.x, zero_potential(t.triple.x));
    auto b = relative_entropy_bounds(parry, t.triple.pi, 10);
    CHECK(b.width() < 1e-12);
    CHECK(b.image_upper == doctest::Approx(std::log(kGolden)).epsilon(1e-10));
    CHECK(b.lower == doctest::Approx(0.0));
  }
  SUBCASE("ambiguous emission falls back to a certified sandwich") {
    auto t = normalize(merge_triple());
    std::mt19937 gen(71);
    MarkovMeasure mu = random_markov(t.triple.x, gen);
    auto b4 = relative_entropy_bounds(mu, t.triple.pi, 4);
    auto b8 = relative_entropy_bounds(mu, t.triple.pi, 8);
    CHECK(b4.image_lower <= b4.image_upper);
    CHECK(b8.width() <= b4.width() + 1e-15);
    CHECK(b8.lower <= b8.upper);
    CHECK(b8.h_domain == doctest::Approx(entropy(mu)));
    // relative entropy through a merge is nonnegative
    CHECK(b8.upper >= -1e-12);
  }
}

TEST_CASE("pressure of a cocycle sum scales on the power shift") {
  std::mt19937 gen(61);
  for (int m : {2, 3}) {
    Presentation gm = golden_mean();
    Potential phi = random_potential(gm, 2, gen);
    Potential sm = cocycle_sum(gm, phi, m);

    PowerShift pw = power_shift(gm, m);
    Potential big;
    big.window = 2;
    for (std::size_t i = 0; i < pw.blocks.size(); ++i)
      for (std::size_t j = 0; j < pw.blocks.size(); ++j) {
        Word cat = pw.blocks[i];
        cat.insert(cat.end(), pw.blocks[j].begin(), pw.blocks[j].end());
        if (!gm.contains_word(cat)) continue;
        Word arg(cat.begin(), cat.begin() + sm.window);
        big.values[Word{static_cast<SymbolId>(i), static_cast<SymbolId>(j)}] = sm.values.at(arg);
      }
    double direct = pressure(gm, phi).value;
    double powered = pressure(pw.p, big).value;
    CHECK(powered == doctest::Approx(m * direct).epsilon(1e-9));
  }
}

TEST_CASE("measure validation rejects malformed inputs") {
  Presentation full2 = full_shift(2);
  SUBCASE("rows must be stochastic") {
    std::map<SymbolId, double> bad{{0, 0.6}, {1, 0.6}};
    CHECK_THROWS_AS(make_markov(full2, 1, {bad, bad}), Error);
  }
  SUBCASE("row count must match the language") {
    std::map<SymbolId, double> row{{0, 0.5}, {1, 0.5}};
    CHECK_THROWS_AS(make_markov(full2, 1, {row}), Error);
  }
  SUBCASE("potential tables must cover the support") {
    MarkovMeasure mu = bernoulli_measure(full2, {0.5, 0.5});
    Potential holey = zero_potential(full2, 2);
    holey.values.erase(holey.values.begin());
    bool thrown = false;
    try {
      measure_pressure(mu, holey);
    } catch (const Error& e) {
      thrown = true;
      CHECK(e.code() == Errc::window_mismatch);
    }
    CHECK(thrown);
  }
  SUBCASE("stationarity is enforced") {
    MarkovMeasure mu = bernoulli_measure(full2, {0.5, 0.5});
    mu.stationary = {0.9, 0.1};
    CHECK_THROWS_AS(validate_measure(full2, mu), Error);
  }
}
