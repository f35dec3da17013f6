#include "sofic/fto.hpp"

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

namespace sofic {

namespace {

void check_normalized(const Presentation& x, const SlidingBlockCode& pi, const char* who) {
  require(x.kind() == Kind::vertex_sft, Errc::invalid_argument,
          std::string(who) + ": domain must be a 1-step vertex shift (run normalize)");
  require(pi.one_block(), Errc::invalid_argument,
          std::string(who) + ": code must be 1-block (run normalize)");
  require(pi.domain() == x, Errc::invalid_argument,
          std::string(who) + ": code domain does not match the given shift");
  require(is_irreducible(x), Errc::not_irreducible,
          std::string(who) + ": domain must be irreducible");
}

std::vector<SymbolId> symbol_images(const Presentation& x, const SlidingBlockCode& pi) {
  std::vector<SymbolId> img(x.symbol_count());
  for (SymbolId s = 0; s < x.symbol_count(); ++s) img[s] = pi.map_symbol(s);
  return img;
}

// preimage symbols per image symbol, each list increasing
std::vector<std::vector<SymbolId>> symbol_fibers(const Presentation& x,
                                                 const SlidingBlockCode& pi) {
  std::vector<std::vector<SymbolId>> f(pi.codomain().size());
  for (SymbolId s = 0; s < x.symbol_count(); ++s) f[pi.map_symbol(s)].push_back(s);
  return f;
}

// Subset automaton of the fiber relation, one seed per image symbol. Reading
// an image word from a seed yields exactly the set of domain symbols that
// occur at the final position among paths over the word read so far (forward
// direction) or at the first position (backward direction).
struct FiberAutomaton {
  std::vector<std::vector<SymbolId>> sets;
  std::vector<SymbolId> sym;             // common image symbol of each subset
  std::vector<int> depth;                // length of a shortest word reaching it
  std::vector<int> parent;               // BFS tree edge, -1 for seeds
  std::vector<SymbolId> via;             // symbol read on the tree edge (seed symbol for seeds)
  std::vector<std::vector<int>> trans;   // trans[id][image symbol], -1 if empty
};

template <typename NextFn>
FiberAutomaton build_fiber_automaton(const Presentation& x, const SlidingBlockCode& pi,
                                     NextFn next, const AnalysisConfig& cfg) {
  const std::size_t n_img = pi.codomain().size();
  const auto img = symbol_images(x, pi);
  FiberAutomaton a;
  std::map<std::vector<SymbolId>, int> ids;

  auto intern = [&](std::vector<SymbolId> s, SymbolId y, int par, SymbolId v, int d) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    require(a.sets.size() < cfg.state_cap, Errc::resource_limit,
            "fiber subset automaton exceeds state_cap");
    int id = static_cast<int>(a.sets.size());
    ids.emplace(s, id);
    a.sets.push_back(std::move(s));
    a.sym.push_back(y);
    a.depth.push_back(d);
    a.parent.push_back(par);
    a.via.push_back(v);
    a.trans.emplace_back(n_img, -1);
    return id;
  };

  const auto fibers = symbol_fibers(x, pi);
  std::deque<int> queue;
  for (SymbolId y = 0; y < n_img; ++y)
    queue.push_back(intern(fibers[y], y, -1, y, 1));

  std::vector<char> mark(x.symbol_count(), 0);
  while (!queue.empty()) {
    int id = queue.front();
    queue.pop_front();
    for (SymbolId y = 0; y < n_img; ++y) {
      std::vector<SymbolId> t;
      for (SymbolId s : a.sets[id])
        for (SymbolId s2 : next(s))
          if (img[s2] == y && !mark[s2]) {
            mark[s2] = 1;
            t.push_back(s2);
          }
      for (SymbolId s2 : t) mark[s2] = 0;
      if (t.empty()) continue;
      std::sort(t.begin(), t.end());
      std::size_t before = a.sets.size();
      int tid = intern(std::move(t), y, id, y, a.depth[id] + 1);
      a.trans[id][y] = tid;
      if (a.sets.size() > before) queue.push_back(tid);
    }
  }
  return a;
}

// word spelled by the BFS tree path to a subset, in automaton reading order
Word tree_word(const FiberAutomaton& a, int id) {
  Word w;
  for (int cur = id; cur != -1; cur = a.parent[cur]) w.push_back(a.via[cur]);
  std::reverse(w.begin(), w.end());
  return w;
}

std::size_t intersection_size(const std::vector<SymbolId>& a, const std::vector<SymbolId>& b) {
  std::size_t n = 0, i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j])
      ++i;
    else if (b[j] < a[i])
      ++j;
    else
      ++n, ++i, ++j;
  }
  return n;
}

// subset ids reachable at each exact depth 1..max_depth
std::vector<std::vector<int>> depth_levels(const FiberAutomaton& a, int max_depth) {
  std::vector<std::vector<int>> levels(static_cast<std::size_t>(max_depth) + 1);
  for (int id = 0; id < static_cast<int>(a.sets.size()); ++id)
    if (a.depth[id] == 1) levels[1].push_back(id);
  for (int d = 1; d < max_depth; ++d) {
    auto& next = levels[d + 1];
    for (int id : levels[d])
      for (int t : a.trans[id])
        if (t >= 0) next.push_back(t);
    std::sort(next.begin(), next.end());
    next.erase(std::unique(next.begin(), next.end()), next.end());
  }
  return levels;
}

}  // namespace

std::optional<Diamond> find_diamond(const Presentation& x, const SlidingBlockCode& pi,
                                    const AnalysisConfig& cfg) {
  check_normalized(x, pi, "find_diamond");
  const std::size_t n = x.symbol_count();
  require(n * n <= cfg.state_cap, Errc::resource_limit, "pair graph exceeds state_cap");
  const auto img = symbol_images(x, pi);

  // pair graph on image-compatible symbol pairs; a diamond is an off-diagonal
  // vertex both reachable from and co-reachable to the diagonal
  auto pid = [n](SymbolId p, SymbolId q) { return p * n + q; };
  std::vector<int> fwd_par(n * n, -2), bwd_par(n * n, -2);
  std::deque<std::size_t> fq, bq;
  for (SymbolId s = 0; s < n; ++s) {
    fwd_par[pid(s, s)] = -1;
    bwd_par[pid(s, s)] = -1;
    fq.push_back(pid(s, s));
    bq.push_back(pid(s, s));
  }
  while (!fq.empty()) {
    std::size_t v = fq.front();
    fq.pop_front();
    SymbolId p = static_cast<SymbolId>(v / n), q = static_cast<SymbolId>(v % n);
    for (SymbolId p2 : x.successors(p))
      for (SymbolId q2 : x.successors(q))
        if (img[p2] == img[q2] && fwd_par[pid(p2, q2)] == -2) {
          fwd_par[pid(p2, q2)] = static_cast<int>(v);
          fq.push_back(pid(p2, q2));
        }
  }
  while (!bq.empty()) {
    std::size_t v = bq.front();
    bq.pop_front();
    SymbolId p = static_cast<SymbolId>(v / n), q = static_cast<SymbolId>(v % n);
    for (SymbolId p2 : x.predecessors(p))
      for (SymbolId q2 : x.predecessors(q))
        if (img[p2] == img[q2] && bwd_par[pid(p2, q2)] == -2) {
          bwd_par[pid(p2, q2)] = static_cast<int>(v);
          bq.push_back(pid(p2, q2));
        }
  }

  for (SymbolId p = 0; p < n; ++p)
    for (SymbolId q = 0; q < n; ++q) {
      if (p == q) continue;
      std::size_t v = pid(p, q);
      if (fwd_par[v] == -2 || bwd_par[v] == -2) continue;
      std::vector<std::size_t> chain;  // diagonal ... v ... diagonal
      for (int cur = static_cast<int>(v); cur != -1; cur = fwd_par[cur])
        chain.push_back(static_cast<std::size_t>(cur));
      std::reverse(chain.begin(), chain.end());
      for (int cur = bwd_par[v]; cur != -1; cur = bwd_par[cur])
        chain.push_back(static_cast<std::size_t>(cur));
      Diamond d;
      for (std::size_t pr : chain) {
        d.left.push_back(static_cast<SymbolId>(pr / n));
        d.right.push_back(static_cast<SymbolId>(pr % n));
        d.image.push_back(img[d.left.back()]);
      }
      return d;
    }
  return std::nullopt;
}

bool is_finite_to_one(const Presentation& x, const SlidingBlockCode& pi,
                      const AnalysisConfig& cfg) {
  return !find_diamond(x, pi, cfg).has_value();
}

DegreeReport fto_report(const Presentation& x, const SlidingBlockCode& pi,
                        const AnalysisConfig& cfg) {
  DegreeReport rep;
  rep.trace.plateau = static_cast<int>(x.symbol_count() * x.symbol_count());
  rep.diamond = find_diamond(x, pi, cfg);
  rep.finite_to_one = !rep.diamond.has_value();
  if (!rep.finite_to_one) return rep;

  auto fwd = build_fiber_automaton(
      x, pi, [&x](SymbolId s) -> const std::vector<SymbolId>& { return x.successors(s); }, cfg);
  auto bwd = build_fiber_automaton(
      x, pi, [&x](SymbolId s) -> const std::vector<SymbolId>& { return x.predecessors(s); },
      cfg);

  // The symbols preimages of w show at position i form the intersection of a
  // forward subset (read w[0..i]) with a backward subset (read w[i..) right
  // to left), so the minimum over all words and positions is the minimum of
  // |F & B| over compatible reachable pairs; shortest-word depths locate the
  // first length attaining it.
  std::size_t best = SIZE_MAX;
  int best_sum = 0, best_f = -1, best_b = -1;
  for (int f = 0; f < static_cast<int>(fwd.sets.size()); ++f)
    for (int b = 0; b < static_cast<int>(bwd.sets.size()); ++b) {
      if (fwd.sym[f] != bwd.sym[b]) continue;
      std::size_t m = intersection_size(fwd.sets[f], bwd.sets[b]);
      if (m == 0) continue;
      int sum = fwd.depth[f] + bwd.depth[b];
      if (m < best || (m == best && sum < best_sum)) {
        best = m;
        best_sum = sum;
        best_f = f;
        best_b = b;
      }
    }
  require(best != SIZE_MAX, Errc::numeric, "degree: no realizable fiber position");

  rep.degree = best;
  Word prefix = tree_word(fwd, best_f);          // ends at the witness position
  Word suffix = tree_word(bwd, best_b);          // starts at the witness position
  std::reverse(suffix.begin(), suffix.end());    // backward reads right to left
  rep.witness = prefix;
  rep.witness.insert(rep.witness.end(), suffix.begin() + 1, suffix.end());
  rep.witness_position = fwd.depth[best_f] - 1;

  int stab = best_sum - 1;
  rep.trace.stabilized_at = stab;
  int traced = std::min<int>(stab, static_cast<int>(cfg.trace_cap));
  auto flev = depth_levels(fwd, traced);
  auto blev = depth_levels(bwd, traced);
  std::map<std::pair<int, int>, std::size_t> memo;
  for (int len = 1; len <= traced; ++len) {
    std::size_t m = SIZE_MAX;
    for (int a = 1; a <= len; ++a)
      for (int f : flev[a])
        for (int b : blev[len + 1 - a]) {
          if (fwd.sym[f] != bwd.sym[b]) continue;
          auto [it, fresh] = memo.try_emplace({f, b}, 0);
          if (fresh) it->second = intersection_size(fwd.sets[f], bwd.sets[b]);
          if (it->second > 0) m = std::min(m, it->second);
        }
    rep.trace.per_length.push_back(m);
  }
  return rep;
}

DegreeReport degree(const Presentation& x, const SlidingBlockCode& pi,
                    const AnalysisConfig& cfg) {
  DegreeReport rep = fto_report(x, pi, cfg);
  require(rep.finite_to_one, Errc::not_finite_to_one,
          "degree: code has a diamond, fibers grow without bound");
  return rep;
}

std::size_t periodic_fiber_count(const Presentation& x, const SlidingBlockCode& pi,
                                 const Word& y, const AnalysisConfig& cfg) {
  check_normalized(x, pi, "periodic_fiber_count");
  require(!y.empty(), Errc::invalid_argument, "periodic_fiber_count: empty period word");
  for (SymbolId s : y)
    require(s < pi.codomain().size(), Errc::invalid_argument,
            "periodic_fiber_count: symbol outside the image alphabet");
  (void)cfg;

  // layered fiber graph over one period of y^inf
  const auto fibers = symbol_fibers(x, pi);
  const std::size_t L = y.size();
  std::vector<std::size_t> offset(L + 1, 0);
  std::vector<SymbolId> vsym;
  for (std::size_t i = 0; i < L; ++i) {
    offset[i + 1] = offset[i] + fibers[y[i]].size();
    for (SymbolId s : fibers[y[i]]) vsym.push_back(s);
  }
  const std::size_t V = offset[L];
  require(V > 0, Errc::not_in_language, "periodic_fiber_count: point has empty fiber");
  std::vector<std::vector<std::uint32_t>> out(V), in(V);
  for (std::size_t i = 0; i < L; ++i) {
    std::size_t j = (i + 1) % L;
    for (std::size_t a = offset[i]; a < offset[i + 1]; ++a)
      for (std::size_t b = offset[j]; b < offset[j + 1]; ++b)
        if (x.allows(vsym[a], vsym[b])) {
          out[a].push_back(static_cast<std::uint32_t>(b));
          in[b].push_back(static_cast<std::uint32_t>(a));
        }
  }

  // a point of the fiber is a bi-infinite path, so trim to the essential part
  std::vector<std::size_t> outd(V), ind(V);
  std::vector<char> alive(V, 1);
  std::deque<std::size_t> dead;
  for (std::size_t v = 0; v < V; ++v) {
    outd[v] = out[v].size();
    ind[v] = in[v].size();
    if (outd[v] == 0 || ind[v] == 0) {
      alive[v] = 0;
      dead.push_back(v);
    }
  }
  while (!dead.empty()) {
    std::size_t v = dead.front();
    dead.pop_front();
    for (std::uint32_t w : out[v])
      if (alive[w] && --ind[w] == 0) {
        alive[w] = 0;
        dead.push_back(w);
      }
    for (std::uint32_t w : in[v])
      if (alive[w] && --outd[w] == 0) {
        alive[w] = 0;
        dead.push_back(w);
      }
  }

  std::size_t count = 0;
  bool any = false;
  for (std::size_t v = 0; v < V; ++v) {
    if (!alive[v]) continue;
    any = true;
    // finite fiber means the essential part is a disjoint union of cycles;
    // any branching vertex yields infinitely many preimages of the point
    require(outd[v] == 1 && ind[v] == 1, Errc::not_finite_to_one,
            "periodic_fiber_count: point has infinitely many preimages");
    if (v < offset[1]) ++count;  // one point per cycle pass through layer 0
  }
  require(any, Errc::not_in_language, "periodic_fiber_count: point is not in the image");
  return count;
}

}  // namespace sofic
