#include "sofic/classdeg.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <tuple>

#include "sofic/fto.hpp"

namespace sofic {

namespace {

void check_normalized(const SlidingBlockCode& pi, const char* who) {
  require(pi.domain().kind() == Kind::vertex_sft, Errc::invalid_argument,
          std::string(who) + ": domain must be a 1-step vertex shift (run normalize)");
  require(pi.one_block(), Errc::invalid_argument,
          std::string(who) + ": code must be 1-block (run normalize)");
}

void check_image_word(const SlidingBlockCode& pi, const Word& w, const char* who) {
  require(!w.empty(), Errc::invalid_argument, std::string(who) + ": empty image word");
  for (SymbolId s : w)
    require(s < pi.codomain().size(), Errc::invalid_argument,
            std::string(who) + ": symbol outside the image alphabet");
}

void check_position(const Word& w, int n, const char* who) {
  require(n > 0 && n + 1 < static_cast<int>(w.size()), Errc::bad_position,
          std::string(who) + ": routing position must be interior (0 < n < |w|-1)");
}

std::vector<SymbolId> symbol_images(const SlidingBlockCode& pi) {
  std::vector<SymbolId> img(pi.domain().symbol_count());
  for (SymbolId s = 0; s < img.size(); ++s) img[s] = pi.map_symbol(s);
  return img;
}

std::vector<std::vector<SymbolId>> symbol_fibers(const SlidingBlockCode& pi) {
  std::vector<std::vector<SymbolId>> f(pi.codomain().size());
  for (SymbolId s = 0; s < pi.domain().symbol_count(); ++s) f[pi.map_symbol(s)].push_back(s);
  return f;
}

using ReachRow = std::vector<char>;  // indexed by domain symbol

// fiber membership per position for paths anchored at one start symbol
std::vector<ReachRow> forward_reach(const Presentation& x, const std::vector<SymbolId>& img,
                                    const Word& w, SymbolId start) {
  std::vector<ReachRow> f(w.size(), ReachRow(x.symbol_count(), 0));
  if (img[start] == w[0]) f[0][start] = 1;
  for (std::size_t i = 0; i + 1 < w.size(); ++i)
    for (SymbolId s = 0; s < x.symbol_count(); ++s)
      if (f[i][s])
        for (SymbolId t : x.successors(s))
          if (img[t] == w[i + 1]) f[i + 1][t] = 1;
  return f;
}

std::vector<ReachRow> backward_reach(const Presentation& x, const std::vector<SymbolId>& img,
                                     const Word& w, SymbolId last) {
  std::vector<ReachRow> b(w.size(), ReachRow(x.symbol_count(), 0));
  if (img[last] == w.back()) b[w.size() - 1][last] = 1;
  for (std::size_t i = w.size() - 1; i > 0; --i)
    for (SymbolId s = 0; s < x.symbol_count(); ++s)
      if (b[i][s])
        for (SymbolId t : x.predecessors(s))
          if (img[t] == w[i - 1]) b[i - 1][t] = 1;
  return b;
}

void check_preimage(const SlidingBlockCode& pi, const Word& w, const Word& u,
                    const char* who) {
  const Presentation& x = pi.domain();
  require(u.size() == w.size(), Errc::not_a_preimage,
          std::string(who) + ": preimage length does not match the image word");
  for (SymbolId s : u)
    require(s < x.symbol_count(), Errc::not_a_preimage,
            std::string(who) + ": symbol outside the domain alphabet");
  for (std::size_t i = 0; i < u.size(); ++i) {
    require(pi.map_symbol(u[i]) == w[i], Errc::not_a_preimage,
            std::string(who) + ": word does not map to the image word");
    require(i == 0 || x.allows(u[i - 1], u[i]), Errc::not_a_preimage,
            std::string(who) + ": word is not in the domain language");
  }
}

// lexicographically first subset of `cand` of size k hitting every set
bool first_hitting(const std::vector<std::vector<SymbolId>>& sets,
                   const std::vector<SymbolId>& cand, std::size_t k, std::size_t from,
                   std::vector<SymbolId>& pick) {
  if (pick.size() == k) {
    for (const auto& s : sets) {
      bool hit = false;
      for (SymbolId a : pick)
        if (std::binary_search(s.begin(), s.end(), a)) {
          hit = true;
          break;
        }
      if (!hit) return false;
    }
    return true;
  }
  for (std::size_t i = from; i + (k - pick.size()) <= cand.size(); ++i) {
    pick.push_back(cand[i]);
    if (first_hitting(sets, cand, k, i + 1, pick)) return true;
    pick.pop_back();
  }
  return false;
}

// image-labeled copy of the domain graph: its length-l words are exactly the
// image words of length l
Presentation relabeled_image_graph(const SlidingBlockCode& pi) {
  const Presentation& x = pi.domain();
  const auto img = symbol_images(pi);
  std::vector<Edge> edges;
  edges.reserve(x.edges().size());
  for (const Edge& e : x.edges()) edges.push_back({e.src, e.dst, img[e.dst]});
  return Presentation(pi.codomain(), x.state_names(), std::move(edges), Kind::sofic);
}

}  // namespace

std::vector<Word> preimage_words(const SlidingBlockCode& pi, const Word& w,
                                 const AnalysisConfig& cfg) {
  check_normalized(pi, "preimage_words");
  check_image_word(pi, w, "preimage_words");
  const Presentation& x = pi.domain();
  const auto fibers = symbol_fibers(pi);
  std::vector<Word> out, stack;
  for (SymbolId s : fibers[w[0]]) stack.push_back({s});
  while (!stack.empty()) {
    Word u = std::move(stack.back());
    stack.pop_back();
    if (u.size() == w.size()) {
      require(out.size() < cfg.word_cap, Errc::resource_limit,
              "preimage_words exceeds word_cap");
      out.push_back(std::move(u));
      continue;
    }
    for (SymbolId t : x.successors(u.back()))
      if (pi.map_symbol(t) == w[u.size()]) {
        Word v = u;
        v.push_back(t);
        stack.push_back(std::move(v));
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

RoutingTable routing_table(const SlidingBlockCode& pi, const Word& w, int n,
                           const AnalysisConfig& cfg) {
  (void)cfg;
  check_normalized(pi, "routing_table");
  check_image_word(pi, w, "routing_table");
  check_position(w, n, "routing_table");
  const Presentation& x = pi.domain();
  const auto img = symbol_images(pi);
  const auto fibers = symbol_fibers(pi);

  RoutingTable table;
  table.w = w;
  table.n = n;
  for (SymbolId s0 : fibers[w[0]]) {
    auto fwd = forward_reach(x, img, w, s0);
    for (SymbolId sp : fibers[w.back()]) {
      if (!fwd[w.size() - 1][sp]) continue;  // pair not realizable
      auto bwd = backward_reach(x, img, w, sp);
      std::vector<SymbolId> r;
      for (SymbolId a : fibers[w[n]])
        if (fwd[n][a] && bwd[n][a]) r.push_back(a);
      table.routes.emplace(std::make_pair(s0, sp), std::move(r));
    }
  }
  require(!table.routes.empty(), Errc::not_in_language,
          "routing_table: word is not in the image language");
  return table;
}

bool routable_through(const SlidingBlockCode& pi, const Word& w, int n, const Word& u,
                      SymbolId a, const AnalysisConfig& cfg) {
  (void)cfg;
  check_normalized(pi, "routable_through");
  check_image_word(pi, w, "routable_through");
  check_position(w, n, "routable_through");
  check_preimage(pi, w, u, "routable_through");
  require(a < pi.domain().symbol_count() && pi.map_symbol(a) == w[n], Errc::invalid_argument,
          "routable_through: routing symbol is not in the fiber of w[n]");
  const auto img = symbol_images(pi);
  auto fwd = forward_reach(pi.domain(), img, w, u.front());
  auto bwd = backward_reach(pi.domain(), img, w, u.back());
  return fwd[n][a] && bwd[n][a];
}

bool is_transition_block(const SlidingBlockCode& pi, const Word& w, int n,
                         const std::vector<SymbolId>& routing, const AnalysisConfig& cfg) {
  for (SymbolId a : routing)
    require(a < pi.domain().symbol_count() && pi.map_symbol(a) == w.at(n),
            Errc::invalid_argument,
            "is_transition_block: routing symbol is not in the fiber of w[n]");
  RoutingTable table = routing_table(pi, w, n, cfg);
  for (const auto& [pair, r] : table.routes) {
    (void)pair;
    bool hit = false;
    for (SymbolId a : routing)
      if (std::find(r.begin(), r.end(), a) != r.end()) {
        hit = true;
        break;
      }
    if (!hit) return false;
  }
  return true;
}

TransitionBlock minimal_depth_for_word(const SlidingBlockCode& pi, const Word& w,
                                       const AnalysisConfig& cfg) {
  check_normalized(pi, "minimal_depth_for_word");
  check_image_word(pi, w, "minimal_depth_for_word");
  require(w.size() >= 3, Errc::bad_position,
          "minimal_depth_for_word: need |w| >= 3 for an interior position");

  TransitionBlock best;
  for (int n = 1; n + 1 < static_cast<int>(w.size()); ++n) {
    RoutingTable table = routing_table(pi, w, n, cfg);
    std::set<std::vector<SymbolId>> distinct;
    for (const auto& [pair, r] : table.routes) {
      (void)pair;
      distinct.insert(r);  // nonempty: the pair's own preimage passes through its symbol
    }
    std::vector<std::vector<SymbolId>> sets(distinct.begin(), distinct.end());
    std::vector<SymbolId> cand;
    for (const auto& s : sets) cand.insert(cand.end(), s.begin(), s.end());
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (std::size_t k = 1; k <= cand.size(); ++k) {
      if (!best.routing.empty() && k >= best.depth()) break;  // cannot improve at this n
      std::vector<SymbolId> pick;
      if (first_hitting(sets, cand, k, 0, pick)) {
        best = {w, n, std::move(pick)};
        break;
      }
    }
    if (best.depth() == 1) break;  // floor reached; smaller n already preferred
  }
  require(!best.routing.empty(), Errc::numeric, "minimal_depth_for_word: no hitting set");
  return best;
}

ClassDegreeReport class_degree_upper(const SlidingBlockCode& pi, int max_len,
                                     const AnalysisConfig& cfg) {
  check_normalized(pi, "class_degree_upper");
  const Presentation& x = pi.domain();
  require(is_irreducible(x), Errc::not_irreducible,
          "class_degree_upper: domain must be irreducible");
  require(max_len >= 3, Errc::invalid_argument, "class_degree_upper: need max_len >= 3");

  // exact certificate for finite-to-one codes: class degree equals degree
  std::optional<std::size_t> ftodeg;
  if (is_finite_to_one(x, pi, cfg)) ftodeg = *degree(x, pi, cfg).degree;

  const std::size_t plateau = x.symbol_count() * x.symbol_count();
  Presentation relabeled = relabeled_image_graph(pi);

  ClassDegreeReport rep;
  rep.upper = SIZE_MAX;
  bool have = false;
  for (int len = 3; len <= max_len; ++len) {
    for (const Word& w : enumerate_words(relabeled, len, cfg)) {
      TransitionBlock tb = minimal_depth_for_word(pi, w, cfg);
      // deterministic preference: depth, then |w|, then n, then routing set,
      // then the word itself
      auto better = [&]() {
        if (!have) return true;
        auto lhs = std::make_tuple(tb.depth(), tb.w.size(), tb.n, tb.routing, tb.w);
        auto rhs = std::make_tuple(rep.witness.depth(), rep.witness.w.size(), rep.witness.n,
                                   rep.witness.routing, rep.witness.w);
        return lhs < rhs;
      };
      if (better()) {
        rep.witness = tb;
        have = true;
      }
    }
    rep.upper = rep.witness.routing.size();
    rep.trace.push_back(rep.upper);
    if (rep.upper == 1) {
      rep.stabilized = true;
      rep.stabilized_at = len;
      rep.method = "depth-floor";
      break;
    }
    if (ftodeg && rep.upper == *ftodeg) {
      rep.stabilized = true;
      rep.stabilized_at = len;
      rep.method = "degree-match";
      break;
    }
    if (rep.trace.size() > plateau &&
        rep.trace.back() == rep.trace[rep.trace.size() - 1 - plateau]) {
      rep.stabilized = true;
      rep.stabilized_at = len;
      rep.method = "plateau";
      break;
    }
  }
  if (!rep.stabilized) rep.method = "cap";
  return rep;
}

SymbolId unique_routing_symbol(const SlidingBlockCode& pi, const TransitionBlock& tb,
                               const Word& u, const AnalysisConfig& cfg) {
  (void)cfg;
  check_normalized(pi, "unique_routing_symbol");
  check_image_word(pi, tb.w, "unique_routing_symbol");
  check_position(tb.w, tb.n, "unique_routing_symbol");
  check_preimage(pi, tb.w, u, "unique_routing_symbol");
  const auto img = symbol_images(pi);
  auto fwd = forward_reach(pi.domain(), img, tb.w, u.front());
  auto bwd = backward_reach(pi.domain(), img, tb.w, u.back());
  std::optional<SymbolId> found;
  for (SymbolId a : tb.routing) {
    if (!(fwd[tb.n][a] && bwd[tb.n][a])) continue;
    require(!found.has_value(), Errc::not_minimal,
            "unique_routing_symbol: preimage routes through two symbols, block is not minimal");
    found = a;
  }
  require(found.has_value(), Errc::not_minimal,
          "unique_routing_symbol: preimage routes through no symbol, block is not minimal");
  return *found;
}

}  // namespace sofic
