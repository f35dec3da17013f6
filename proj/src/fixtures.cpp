#include "sofic/fixtures.hpp"

#include <algorithm>
#include <random>

namespace sofic {
namespace fixtures {

Presentation full_shift(std::size_t n) {
  require(n >= 1, Errc::invalid_argument, "full shift needs at least one symbol");
  Alphabet a;
  for (std::size_t i = 0; i < n; ++i) a.display.push_back(std::to_string(i));
  std::vector<std::vector<SymbolId>> succ(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) succ[i].push_back(static_cast<SymbolId>(j));
  return make_vertex_sft(a, succ);
}

Presentation golden_mean() {
  Alphabet a{{"0", "1"}};
  return make_vertex_sft(a, {{0, 1}, {0}});
}

Presentation even_shift() {
  Alphabet a{{"0", "1"}};
  std::vector<Edge> edges{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  return Presentation(a, {"E", "O"}, edges, Kind::sofic, true);
}

FactorTriple merge_triple(const AnalysisConfig& cfg) {
  Alphabet a{{"a", "b", "c"}};
  std::vector<std::vector<SymbolId>> succ{{0, 1, 2}, {0, 1, 2}, {0, 1, 2}};
  Presentation x = make_vertex_sft(a, succ);
  Presentation y = full_shift(2);
  std::map<Word, SymbolId> t{{{0}, 0}, {{1}, 1}, {{2}, 1}};
  return {x, SlidingBlockCode(x, y.alphabet(), 0, 0, std::move(t), cfg), y};
}

FactorTriple xor_triple(const AnalysisConfig& cfg) {
  Presentation x = full_shift(2);
  Presentation y = full_shift(2);
  std::map<Word, SymbolId> t{{{0, 0}, 0}, {{0, 1}, 1}, {{1, 0}, 1}, {{1, 1}, 0}};
  return {x, SlidingBlockCode(x, y.alphabet(), 0, 1, std::move(t), cfg), y};
}

FactorTriple gm_even_triple(const AnalysisConfig& cfg) {
  Presentation x = golden_mean();
  Presentation y = even_shift();
  std::map<Word, SymbolId> t{{{0, 0}, 1}, {{0, 1}, 0}, {{1, 0}, 0}};
  return {x, SlidingBlockCode(x, y.alphabet(), 0, 1, std::move(t), cfg), y};
}

FactorTriple even_cover_triple(const AnalysisConfig& cfg) {
  Presentation y = even_shift();
  RightResolvingCover c = minimal_right_resolving(y, cfg);
  return {c.cover_edge_sft, c.projection, y};
}

std::vector<std::string> presentation_names() {
  return {"full-2", "full-3", "golden-mean", "even"};
}

std::vector<std::string> triple_names() { return {"merge", "xor", "gm-even", "even-cover"}; }

Presentation presentation_by_name(const std::string& name) {
  if (name.rfind("full-", 0) == 0) {
    std::size_t n = 0;
    try {
      n = std::stoul(name.substr(5));
    } catch (const std::exception&) {
      raise(Errc::invalid_argument, "bad fixture name '" + name + "'");
    }
    return full_shift(n);
  }
  if (name == "golden-mean") return golden_mean();
  if (name == "even") return even_shift();
  raise(Errc::invalid_argument, "unknown presentation fixture '" + name + "'");
}

FactorTriple triple_by_name(const std::string& name, const AnalysisConfig& cfg) {
  if (name == "merge") return merge_triple(cfg);
  if (name == "xor") return xor_triple(cfg);
  if (name == "gm-even") return gm_even_triple(cfg);
  if (name == "even-cover") return even_cover_triple(cfg);
  raise(Errc::invalid_argument, "unknown triple fixture '" + name + "'");
}

Presentation random_irreducible(std::uint64_t seed, std::size_t states, std::size_t extra) {
  require(states >= 1, Errc::invalid_argument, "need at least one state");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<SymbolId>> succ(states);
  auto add = [&](std::size_t u, std::size_t v) {
    auto& s = succ[u];
    if (std::find(s.begin(), s.end(), static_cast<SymbolId>(v)) == s.end())
      s.push_back(static_cast<SymbolId>(v));
  };
  for (std::size_t i = 0; i < states; ++i) add(i, (i + 1) % states);
  std::uniform_int_distribution<std::size_t> pick(0, states - 1);
  for (std::size_t k = 0; k < extra; ++k) add(pick(rng), pick(rng));
  for (auto& s : succ) std::sort(s.begin(), s.end());
  Alphabet a;
  for (std::size_t i = 0; i < states; ++i) a.display.push_back(std::to_string(i));
  return make_vertex_sft(a, succ);
}

FactorTriple random_onto_triple(std::uint64_t seed, std::size_t states,
                                std::size_t target_symbols, const AnalysisConfig& cfg) {
  require(target_symbols >= 1 && target_symbols <= states, Errc::invalid_argument,
          "target alphabet must not exceed the domain alphabet");
  std::mt19937_64 rng(seed);
  Presentation x = random_irreducible(seed * 2 + 1, states, states);
  Alphabet ya;
  for (std::size_t i = 0; i < target_symbols; ++i) ya.display.push_back(std::to_string(i));
  // surjective symbol merge: seed every target once, pad uniformly, shuffle
  // (the value multiset, hence surjectivity, survives the shuffle)
  std::vector<SymbolId> to(states);
  for (std::size_t i = 0; i < states; ++i)
    to[i] = static_cast<SymbolId>(i < target_symbols
                                      ? i
                                      : std::uniform_int_distribution<std::size_t>(
                                            0, target_symbols - 1)(rng));
  std::shuffle(to.begin(), to.end(), rng);
  std::map<Word, SymbolId> t;
  for (std::size_t i = 0; i < states; ++i) t[{static_cast<SymbolId>(i)}] = to[i];
  SlidingBlockCode pi(x, ya, 0, 0, std::move(t), cfg);
  Presentation y = image_presentation(x, pi, cfg);
  return {std::move(x), std::move(pi), std::move(y)};
}

FactorTriple random_lift_triple(std::uint64_t seed, std::size_t base_states,
                                std::size_t sheets, const AnalysisConfig& cfg) {
  require(sheets >= 1, Errc::invalid_argument, "need at least one sheet");
  std::mt19937_64 rng(seed);
  Presentation y = random_irreducible(seed * 2 + 1, base_states, base_states / 2 + 1);

  // lift each base edge by a random permutation of the sheets; every point of
  // the base then has exactly `sheets` preimages, at most one through each
  // sheet at time zero
  const std::size_t n = base_states * sheets;
  Alphabet a;
  for (std::size_t u = 0; u < base_states; ++u)
    for (std::size_t s = 0; s < sheets; ++s)
      a.display.push_back(y.alphabet().display[u] + "_" + std::to_string(s));
  auto id = [&](std::size_t u, std::size_t s) { return u * sheets + s; };
  std::vector<std::vector<SymbolId>> succ(n);
  for (std::size_t u = 0; u < base_states; ++u)
    for (SymbolId v : y.successors(static_cast<SymbolId>(u))) {
      std::vector<std::size_t> perm(sheets);
      for (std::size_t s = 0; s < sheets; ++s) perm[s] = s;
      std::shuffle(perm.begin(), perm.end(), rng);
      for (std::size_t s = 0; s < sheets; ++s)
        succ[id(u, s)].push_back(static_cast<SymbolId>(id(v, perm[s])));
    }
  for (auto& s : succ) std::sort(s.begin(), s.end());
  Presentation lifted = make_vertex_sft(a, succ);

  // the lift may split into several irreducible pieces; keep the one holding
  // state 0 by deleting everything outside it
  std::vector<char> in_fwd(n, 0), in_bwd(n, 0);
  std::vector<SymbolId> stack{0};
  in_fwd[0] = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto v : lifted.successors(u))
      if (!in_fwd[v]) {
        in_fwd[v] = 1;
        stack.push_back(v);
      }
  }
  stack = {0};
  in_bwd[0] = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto v : lifted.predecessors(u))
      if (!in_bwd[v]) {
        in_bwd[v] = 1;
        stack.push_back(v);
      }
  }
  Alphabet ka;
  std::vector<std::int32_t> keep(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    if (in_fwd[i] && in_bwd[i]) {
      keep[i] = static_cast<std::int32_t>(ka.display.size());
      ka.display.push_back(a.display[i]);
    }
  std::vector<std::vector<SymbolId>> ksucc(ka.size());
  for (std::size_t i = 0; i < n; ++i)
    if (keep[i] >= 0)
      for (auto v : lifted.successors(static_cast<SymbolId>(i)))
        if (keep[v] >= 0) ksucc[keep[i]].push_back(static_cast<SymbolId>(keep[v]));
  Presentation x = make_vertex_sft(ka, ksucc);

  std::map<Word, SymbolId> t;
  for (SymbolId s = 0; s < ka.size(); ++s) {
    auto us = ka.display[s].substr(0, ka.display[s].find('_'));
    t[{s}] = *y.alphabet().find(us);
  }
  // the kept component still covers every base state (holonomies at the base
  // point form a group), so the projection is onto the whole base shift
  SlidingBlockCode pi(x, y.alphabet(), 0, 0, std::move(t), cfg);
  return {std::move(x), std::move(pi), std::move(y)};
}

}  // namespace fixtures
}  // namespace sofic
