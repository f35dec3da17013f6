#include "sofic/decomp.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace sofic {

namespace {

void check_normalized(const Presentation& x, const SlidingBlockCode& pi, const char* who) {
  require(x.kind() == Kind::vertex_sft, Errc::invalid_argument,
          std::string(who) + ": domain must be a 1-step vertex shift (run normalize)");
  require(pi.one_block(), Errc::invalid_argument,
          std::string(who) + ": code must be 1-block (run normalize)");
  require(pi.domain() == x, Errc::invalid_argument,
          std::string(who) + ": code domain does not match the given shift");
}

using PairSymbol = std::pair<SymbolId, std::optional<SymbolId>>;  // (image, mark)

struct Pi1Build {
  SlidingBlockCode code;
  std::vector<PairSymbol> pairs;  // decode of the codomain, per symbol id
};

Pi1Build build_pi1_impl(const Presentation& x, const SlidingBlockCode& pi,
                        const TransitionBlock& tb, const AnalysisConfig& cfg) {
  check_normalized(x, pi, "build_pi1");
  const int window = static_cast<int>(tb.w.size());
  require(tb.n > 0 && tb.n + 1 < window, Errc::bad_position,
          "build_pi1: transition block position must be interior");

  std::map<Word, PairSymbol> raw;
  std::set<PairSymbol> attained;
  for (const Word& u : enumerate_words(x, window, cfg)) {
    PairSymbol p{pi.map_symbol(u[static_cast<std::size_t>(tb.n)]), std::nullopt};
    if (pi.apply(u) == tb.w) p.second = unique_routing_symbol(pi, tb, u, cfg);
    attained.insert(p);
    raw.emplace(u, p);
  }

  std::vector<PairSymbol> pairs(attained.begin(), attained.end());
  Alphabet alpha;
  for (const PairSymbol& p : pairs)
    alpha.display.push_back(pi.codomain().format(p.first) + "|" +
                            (p.second ? x.alphabet().format(*p.second) : std::string("_")));
  std::map<PairSymbol, SymbolId> id;
  for (SymbolId i = 0; i < pairs.size(); ++i) id.emplace(pairs[i], i);

  std::map<Word, SymbolId> table;
  for (const auto& [u, p] : raw) table.emplace(u, id.at(p));
  SlidingBlockCode code(x, alpha, tb.n, window - 1 - tb.n, std::move(table), cfg);
  return {std::move(code), std::move(pairs)};
}

Presentation full_graph(const Alphabet& a) {
  std::vector<std::vector<SymbolId>> succ(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (SymbolId j = 0; j < a.size(); ++j) succ[i].push_back(j);
  return make_vertex_sft(a, succ);
}

ClassDegreeReport pi1_class_degree(const Decomposition& d, const AnalysisConfig& cfg) {
  FactorTriple t1{d.normalized.triple.x, d.pi1, full_graph(d.pi1.codomain())};
  NormalizedTriple n1 = normalize(t1, cfg);
  return class_degree_upper(n1.triple.pi, static_cast<int>(cfg.length_cap), cfg);
}

}  // namespace

SlidingBlockCode build_pi1(const Presentation& x, const SlidingBlockCode& pi,
                           const TransitionBlock& tb, const AnalysisConfig& cfg) {
  return build_pi1_impl(x, pi, tb, cfg).code;
}

DegreeReport degree_via_cover(const Presentation& domain, const SlidingBlockCode& pi,
                              const AnalysisConfig& cfg) {
  require(pi.one_block(), Errc::invalid_argument, "degree_via_cover: code must be 1-block");
  require(pi.domain() == domain, Errc::invalid_argument,
          "degree_via_cover: code domain does not match the given presentation");
  if (domain.kind() == Kind::vertex_sft) return fto_report(domain, pi, cfg);
  RightResolvingCover c = minimal_right_resolving(domain, cfg);
  SlidingBlockCode lifted = compose(pi, c.projection, cfg);
  DegreeReport rep = fto_report(c.cover_edge_sft, lifted, cfg);
  if (rep.finite_to_one) {
    DegreeReport proj = degree(c.cover_edge_sft, c.projection, cfg);
    require(proj.degree == 1, Errc::numeric,
            "degree_via_cover: cover projection degree is not 1");
  }
  return rep;
}

DecompositionReport verify_decomposition(const Decomposition& d, const AnalysisConfig& cfg) {
  DecompositionReport r;
  r.class_degree_stabilized = d.class_degree.stabilized;
  try {
    r.composition_ok = codes_equal(compose(d.pi2, d.pi1, cfg), d.normalized.triple.pi, cfg);
  } catch (const Error& e) {
    r.composition_ok = false;
    r.notes += std::string("composition: ") + e.what() + "; ";
  }
  try {
    r.pi2_degree = degree_via_cover(d.ytilde, d.pi2, cfg);
    r.pi2_degree_equals_class_degree = r.class_degree_stabilized &&
                                       r.pi2_degree.finite_to_one &&
                                       *r.pi2_degree.degree == d.class_degree.upper;
  } catch (const Error& e) {
    r.notes += std::string("pi2 degree: ") + e.what() + "; ";
  }
  try {
    r.pi1_class_degree = pi1_class_degree(d, cfg);
    r.pi1_class_degree_one = r.pi1_class_degree.stabilized && r.pi1_class_degree.upper == 1;
  } catch (const Error& e) {
    r.notes += std::string("pi1 class degree: ") + e.what() + "; ";
  }
  return r;
}

Decomposition build_decomposition(const FactorTriple& t, const AnalysisConfig& cfg) {
  NormalizedTriple norm = normalize(t, cfg);
  const Presentation& x = norm.triple.x;
  const SlidingBlockCode& pi = norm.triple.pi;

  ClassDegreeReport cd = class_degree_upper(pi, static_cast<int>(cfg.length_cap), cfg);
  std::optional<Pi1Build> built;
  try {
    built = build_pi1_impl(x, pi, cd.witness, cfg);
  } catch (const Error& e) {
    // an uncertified witness may genuinely fail the unique-routing premise
    if (e.code() == Errc::not_minimal && !cd.stabilized)
      raise(Errc::stabilization_inconclusive,
            std::string("class degree trace did not stabilize within the cap and the "
                        "witnessed block is not minimal: ") +
                e.what());
    throw;
  }

  FactorTriple t1{x, built->code, full_graph(built->code.codomain())};
  NormalizedTriple n1 = normalize(t1, cfg);
  Presentation ytilde = image_presentation(n1.triple.x, n1.triple.pi, cfg);

  std::map<Word, SymbolId> forget;
  for (SymbolId i = 0; i < built->pairs.size(); ++i)
    forget.emplace(Word{i}, built->pairs[i].first);
  SlidingBlockCode pi2(ytilde, pi.codomain(), 0, 0, std::move(forget), cfg);

  TransitionBlock tb = cd.witness;
  Decomposition d{std::move(norm),        std::move(cd),  std::move(tb), std::move(ytilde),
                  std::move(built->code), std::move(pi2), {}};
  d.verification = verify_decomposition(d, cfg);
  return d;
}

}  // namespace sofic
