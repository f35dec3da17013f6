#include "sofic/blockcode.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sofic {

SlidingBlockCode::SlidingBlockCode(Presentation domain, Alphabet codomain, int memory,
                                   int anticipation, std::map<Word, SymbolId> table,
                                   const AnalysisConfig& cfg)
    : domain_(std::move(domain)),
      codomain_(std::move(codomain)),
      memory_(memory),
      anticipation_(anticipation),
      table_(std::move(table)) {
  require(memory_ >= 0 && anticipation_ >= 0, Errc::invalid_argument,
          "negative memory/anticipation");
  codomain_.validate();
  domain_.check_essential("SlidingBlockCode");

  std::set<SymbolId> attained;
  for (const auto& w : enumerate_words(domain_, window(), cfg)) {
    auto it = table_.find(w);
    require(it != table_.end(), Errc::invalid_argument,
            "block map not total: no entry for '" + domain_.alphabet().format(w) + "'");
    require(it->second < codomain_.size(), Errc::invalid_argument,
            "block map value out of codomain range");
    attained.insert(it->second);
  }
  require(attained.size() == codomain_.size(), Errc::invalid_argument,
          "codomain alphabet must equal the set of attained symbols");
}

SymbolId SlidingBlockCode::map_window(const Word& w) const {
  require(static_cast<int>(w.size()) == window(), Errc::invalid_argument,
          "window length mismatch");
  auto it = table_.find(w);
  require(it != table_.end(), Errc::not_in_language,
          "window '" + domain_.alphabet().format(w) + "' not in the domain language");
  return it->second;
}

SymbolId SlidingBlockCode::map_symbol(SymbolId s) const {
  require(one_block(), Errc::invalid_argument, "map_symbol needs a 1-block code");
  return map_window(Word{s});
}

Word SlidingBlockCode::apply(const Word& w) const {
  const int win = window();
  require(static_cast<int>(w.size()) >= win, Errc::word_too_short,
          "word shorter than the code window");
  require(domain_.contains_word(w), Errc::not_in_language,
          "word '" + domain_.alphabet().format(w) + "' not in the domain language");
  Word out;
  out.reserve(w.size() - win + 1);
  for (std::size_t i = 0; i + win <= w.size(); ++i)
    out.push_back(map_window(Word(w.begin() + i, w.begin() + i + win)));
  return out;
}

SlidingBlockCode identity_code(const Presentation& p, const AnalysisConfig& cfg) {
  std::map<Word, SymbolId> table;
  for (SymbolId s = 0; s < p.symbol_count(); ++s) table[{s}] = s;
  return SlidingBlockCode(p, p.alphabet(), 0, 0, std::move(table), cfg);
}

namespace {

// map symbols of alphabet `from` to ids in alphabet `to` (by display)
std::vector<SymbolId> remap_symbols(const Alphabet& from, const Alphabet& to,
                                    const char* context) {
  std::vector<SymbolId> m(from.size());
  for (SymbolId s = 0; s < from.size(); ++s) {
    auto t = to.find(from.display[s]);
    require(t.has_value(), Errc::alphabet_mismatch,
            std::string(context) + ": symbol '" + from.display[s] + "' has no counterpart");
    m[s] = *t;
  }
  return m;
}

// restrict codomain to the attained symbols, remapping table values
SlidingBlockCode shrink_codomain(Presentation domain, const Alphabet& codomain, int m, int a,
                                 std::map<Word, SymbolId> table, const AnalysisConfig& cfg) {
  std::set<SymbolId> attained;
  for (const auto& [w, v] : table) attained.insert(v);
  Alphabet used;
  std::vector<SymbolId> remap(codomain.size(), 0);
  for (SymbolId s : attained) {
    remap[s] = static_cast<SymbolId>(used.display.size());
    used.display.push_back(codomain.display[s]);
  }
  for (auto& [w, v] : table) v = remap[v];
  return SlidingBlockCode(std::move(domain), std::move(used), m, a, std::move(table), cfg);
}

}  // namespace

SlidingBlockCode compose(const SlidingBlockCode& outer, const SlidingBlockCode& inner,
                         const AnalysisConfig& cfg) {
  auto mid = remap_symbols(inner.codomain(), outer.domain().alphabet(), "compose");
  const int m = inner.memory() + outer.memory();
  const int a = inner.anticipation() + outer.anticipation();
  std::map<Word, SymbolId> table;
  for (const auto& w : enumerate_words(inner.domain(), m + 1 + a, cfg)) {
    Word between = inner.apply(w);
    for (auto& s : between) s = mid[s];
    require(outer.domain().contains_word(between), Errc::alphabet_mismatch,
            "compose: inner image leaves the outer domain");
    table[w] = outer.map_window(between);
  }
  return shrink_codomain(inner.domain(), outer.codomain(), m, a, std::move(table), cfg);
}

SlidingBlockCode extend_window(const SlidingBlockCode& c, int memory, int anticipation,
                               const AnalysisConfig& cfg) {
  require(memory >= c.memory() && anticipation >= c.anticipation(), Errc::invalid_argument,
          "extend_window cannot shrink the window");
  if (memory == c.memory() && anticipation == c.anticipation()) return c;
  const int off = memory - c.memory();
  std::map<Word, SymbolId> table;
  for (const auto& w : enumerate_words(c.domain(), memory + 1 + anticipation, cfg))
    table[w] = c.map_window(Word(w.begin() + off, w.begin() + off + c.window()));
  return SlidingBlockCode(c.domain(), c.codomain(), memory, anticipation, std::move(table), cfg);
}

bool codes_equal(const SlidingBlockCode& a, const SlidingBlockCode& b,
                 const AnalysisConfig& cfg) {
  if (!(a.domain().alphabet() == b.domain().alphabet())) return false;
  if (!(a.codomain() == b.codomain())) return false;
  const int m = std::max(a.memory(), b.memory());
  const int n = std::max(a.anticipation(), b.anticipation());
  auto ea = extend_window(a, m, n, cfg);
  auto eb = extend_window(b, m, n, cfg);
  return ea.table() == eb.table();
}

void validate_triple(const FactorTriple& t, const AnalysisConfig& cfg) {
  const int pad = t.pi.memory() + t.pi.anticipation();
  for (int len = 1; len <= cfg.length_cap; ++len) {
    std::vector<Word> xs;
    try {
      xs = enumerate_words(t.x, len + pad, cfg);
    } catch (const Error& e) {
      if (e.code() == Errc::resource_limit) return;  // validated as far as the cap allows
      throw;
    }
    std::set<Word> image;
    for (const auto& u : xs) image.insert(t.pi.apply(u));
    auto ys = enumerate_words(t.y, len, cfg);
    require(image == std::set<Word>(ys.begin(), ys.end()), Errc::invalid_argument,
            "factor triple: Y language differs from the image language at length " +
                std::to_string(len));
  }
}

namespace {

Presentation vertexize_edge_sft(const Presentation& p) {
  // symbols are already in bijection with edges; present the same shift with
  // states = edges
  std::vector<std::vector<SymbolId>> succ(p.edges().size());
  for (SymbolId e = 0; e < p.edges().size(); ++e)
    for (SymbolId f = 0; f < p.edges().size(); ++f)
      if (p.edges()[e].dst == p.edges()[f].src) succ[e].push_back(f);
  return make_vertex_sft(p.alphabet(), succ);
}

}  // namespace

HigherBlock higher_block(const Presentation& p, int window, const AnalysisConfig& cfg) {
  return higher_block_at(p, window, 0, cfg);
}

HigherBlock higher_block_at(const Presentation& p, int window, int offset,
                            const AnalysisConfig& cfg) {
  require(window >= 1, Errc::invalid_argument, "higher block window must be positive");
  require(offset >= 0 && offset < window, Errc::invalid_argument, "offset outside the window");
  p.check_essential("higher_block");

  if (p.kind() == Kind::edge_sft)
    return higher_block_at(vertexize_edge_sft(p), window, offset, cfg);

  if (window == 1) {
    HigherBlock hb{p, identity_code(p, cfg), identity_code(p, cfg)};
    return hb;
  }

  if (p.kind() == Kind::vertex_sft) {
    auto blocks = enumerate_words(p, window, cfg);
    require(blocks.size() <= cfg.state_cap, Errc::resource_limit,
            "higher block presentation exceeds state_cap");
    std::map<Word, SymbolId> id;
    Alphabet a;
    for (const auto& b : blocks) {
      id[b] = static_cast<SymbolId>(a.display.size());
      a.display.push_back(p.alphabet().format(b));
    }
    std::vector<std::vector<SymbolId>> succ(blocks.size());
    for (const auto& w : enumerate_words(p, window + 1, cfg)) {
      Word u(w.begin(), w.end() - 1), v(w.begin() + 1, w.end());
      succ[id[u]].push_back(id[v]);
    }
    for (auto& s : succ) {
      std::sort(s.begin(), s.end());
      s.erase(std::unique(s.begin(), s.end()), s.end());
    }
    Presentation image = make_vertex_sft(a, succ);

    std::map<Word, SymbolId> to;
    for (const auto& [b, i] : id) to[b] = i;
    SlidingBlockCode to_blocks(p, a, offset, window - 1 - offset, std::move(to), cfg);
    std::map<Word, SymbolId> from;
    for (const auto& [b, i] : id) from[{i}] = b[offset];
    SlidingBlockCode from_blocks(image, p.alphabet(), 0, 0, std::move(from), cfg);
    return {std::move(image), std::move(to_blocks), std::move(from_blocks)};
  }

  // general labeled graph: states are (window-1)-edge paths, edges are
  // window-edge paths labeled by the word they read
  std::vector<std::vector<std::uint32_t>> paths;  // edge index sequences
  for (std::uint32_t ei = 0; ei < p.edges().size(); ++ei) paths.push_back({ei});
  for (int l = 2; l <= window; ++l) {
    std::vector<std::vector<std::uint32_t>> next;
    for (const auto& path : paths) {
      StateId end = p.edges()[path.back()].dst;
      for (auto ei : p.out_edges(end)) {
        auto q = path;
        q.push_back(ei);
        next.push_back(std::move(q));
        require(next.size() <= cfg.state_cap, Errc::resource_limit,
                "higher block path count exceeds state_cap");
      }
    }
    if (l < window) paths = std::move(next);
    else {
      // `paths` holds the states ((window-1)-paths), `next` the edges
      std::map<std::vector<std::uint32_t>, StateId> state_id;
      std::vector<std::string> names;
      for (const auto& s : paths) {
        state_id[s] = static_cast<StateId>(names.size());
        names.push_back("p" + std::to_string(names.size()));
      }
      std::set<Word> attained;
      for (const auto& e : next) {
        Word w;
        for (auto ei : e) w.push_back(p.edges()[ei].label);
        attained.insert(w);
      }
      Alphabet a;
      std::map<Word, SymbolId> word_id;
      for (const auto& w : attained) {
        word_id[w] = static_cast<SymbolId>(a.display.size());
        a.display.push_back(p.alphabet().format(w));
      }
      std::set<std::tuple<StateId, StateId, SymbolId>> edge_set;
      for (const auto& e : next) {
        Word w;
        for (auto ei : e) w.push_back(p.edges()[ei].label);
        std::vector<std::uint32_t> src(e.begin(), e.end() - 1), dst(e.begin() + 1, e.end());
        edge_set.insert({state_id[src], state_id[dst], word_id[w]});
      }
      std::vector<Edge> edges;
      for (const auto& [s, d, l] : edge_set) edges.push_back({s, d, l});
      Presentation image(a, names, edges, Kind::sofic, p.right_resolving());

      std::map<Word, SymbolId> to;
      for (const auto& w : enumerate_words(p, window, cfg)) {
        auto it = word_id.find(w);
        require(it != word_id.end(), Errc::invalid_argument, "higher block: missing word");
        to[w] = it->second;
      }
      SlidingBlockCode to_blocks(p, a, offset, window - 1 - offset, std::move(to), cfg);
      std::map<Word, SymbolId> from;
      for (const auto& [w, i] : word_id) from[{i}] = w[offset];
      SlidingBlockCode from_blocks(image, p.alphabet(), 0, 0, std::move(from), cfg);
      return {std::move(image), std::move(to_blocks), std::move(from_blocks)};
    }
  }
  raise(Errc::invalid_argument, "unreachable");
}

NormalizedTriple normalize(const FactorTriple& t, const AnalysisConfig& cfg) {
  Presentation x = t.x;
  SlidingBlockCode pi = t.pi;
  require(x.kind() != Kind::sofic, Errc::invalid_argument,
          "normalize needs an SFT domain presentation");
  if (x.kind() == Kind::edge_sft) {
    x = vertexize_edge_sft(x);
    pi = SlidingBlockCode(x, pi.codomain(), pi.memory(), pi.anticipation(), pi.table(), cfg);
  }
  if (pi.one_block()) {
    NormalizedTriple nt{{x, pi, t.y}, identity_code(x, cfg), identity_code(x, cfg)};
    return nt;
  }
  const int w = pi.window();
  HigherBlock hb = higher_block_at(x, w, pi.memory(), cfg);
  std::map<Word, SymbolId> table;
  for (const auto& [block, id] : hb.to_blocks.table()) table[{id}] = pi.map_window(block);
  SlidingBlockCode pi1 =
      shrink_codomain(hb.image, pi.codomain(), 0, 0, std::move(table), cfg);
  return {{hb.image, std::move(pi1), t.y}, hb.to_blocks, hb.from_blocks};
}

namespace {

struct SubsetGraph {
  std::vector<std::vector<StateId>> subsets;
  std::vector<std::map<SymbolId, std::uint32_t>> trans;
};

// subset construction seeded from the full state set
SubsetGraph subset_graph(const Presentation& p, const AnalysisConfig& cfg) {
  using Subset = std::vector<StateId>;
  SubsetGraph g;
  std::map<Subset, std::uint32_t> ids;

  auto intern = [&](Subset s) {
    auto it = ids.find(s);
    if (it != ids.end()) return it->second;
    auto id = static_cast<std::uint32_t>(g.subsets.size());
    require(g.subsets.size() < cfg.state_cap, Errc::resource_limit,
            "subset construction exceeds state_cap");
    g.subsets.push_back(s);
    g.trans.emplace_back();
    ids.emplace(std::move(s), id);
    return id;
  };

  Subset all(p.state_count());
  for (StateId s = 0; s < p.state_count(); ++s) all[s] = s;
  std::vector<std::uint32_t> queue{intern(all)};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    auto cur = queue[qi];
    std::map<SymbolId, std::set<StateId>> step;
    for (StateId s : g.subsets[cur])
      for (auto ei : p.out_edges(s)) {
        const auto& e = p.edges()[ei];
        step[e.label].insert(e.dst);
      }
    for (auto& [sym, dsts] : step) {
      Subset d(dsts.begin(), dsts.end());
      auto before = g.subsets.size();
      auto id = intern(std::move(d));
      g.trans[cur][sym] = id;
      if (g.subsets.size() > before) queue.push_back(id);
    }
  }
  return g;
}

Presentation subset_component(const SubsetGraph& g, const Alphabet& alphabet,
                              std::uint32_t start) {
  std::vector<std::int32_t> renum(g.subsets.size(), -1);
  std::vector<std::uint32_t> order{start};
  renum[start] = 0;
  for (std::size_t qi = 0; qi < order.size(); ++qi)
    for (const auto& [sym, dst] : g.trans[order[qi]])
      if (renum[dst] < 0) {
        renum[dst] = static_cast<std::int32_t>(order.size());
        order.push_back(dst);
      }
  std::vector<std::string> names;
  for (std::size_t i = 0; i < order.size(); ++i) names.push_back("d" + std::to_string(i));
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i < order.size(); ++i)
    for (const auto& [sym, dst] : g.trans[order[i]])
      edges.push_back({i, static_cast<StateId>(renum[dst]), sym});
  return Presentation(alphabet, names, edges, Kind::sofic, true);
}

// Right-resolving irreducible presentation of the sofic shift presented by an
// irreducible labeled graph. A full subset pass first makes the graph
// right-resolving (subset sizes then never grow along edges), and the forward
// closure of a minimal-cardinality subset is the synchronizing component: it
// is strongly connected and presents the same shift.
Presentation determinize_irreducible(const Presentation& p, const Alphabet& alphabet,
                                     const AnalysisConfig& cfg) {
  p.check_essential("determinize");
  require(is_irreducible(p), Errc::not_irreducible, "determinize needs an irreducible graph");

  Presentation rr = p.right_resolving()
                        ? p
                        : trim_essential(subset_component(subset_graph(p, cfg), alphabet, 0));
  auto g = subset_graph(rr, cfg);
  std::uint32_t start = 0;
  for (std::uint32_t i = 1; i < g.subsets.size(); ++i)
    if (g.subsets[i].size() < g.subsets[start].size()) start = i;
  Presentation out = subset_component(g, alphabet, start);
  require(out.is_essential() && is_irreducible(out), Errc::numeric,
          "determinize produced a non-irreducible component");
  return out;
}

// merge states with identical follower behavior (partition refinement on the
// deterministic transition structure)
Presentation follower_merge(const Presentation& p, const AnalysisConfig& cfg) {
  (void)cfg;
  const std::size_t ns = p.state_count();
  std::vector<std::uint32_t> cls(ns, 0);
  std::size_t ncls = 1;
  for (;;) {
    std::map<std::vector<std::int64_t>, std::uint32_t> sig_id;
    std::vector<std::uint32_t> next(ns);
    for (StateId s = 0; s < ns; ++s) {
      std::vector<std::int64_t> sig{cls[s]};
      std::map<SymbolId, std::uint32_t> row;
      for (auto ei : p.out_edges(s)) {
        const auto& e = p.edges()[ei];
        row[e.label] = cls[e.dst];
      }
      for (SymbolId a = 0; a < p.symbol_count(); ++a) {
        auto it = row.find(a);
        sig.push_back(it == row.end() ? -1 : static_cast<std::int64_t>(it->second));
      }
      auto [it, fresh] = sig_id.emplace(std::move(sig), static_cast<std::uint32_t>(sig_id.size()));
      (void)fresh;
      next[s] = it->second;
    }
    if (sig_id.size() == ncls) break;
    ncls = sig_id.size();
    cls = std::move(next);
  }

  // canonical class order: by least member state
  std::vector<std::int32_t> renum(ncls, -1);
  std::uint32_t n = 0;
  for (StateId s = 0; s < ns; ++s)
    if (renum[cls[s]] < 0) renum[cls[s]] = static_cast<std::int32_t>(n++);
  std::vector<std::string> names(ncls);
  for (std::uint32_t c = 0; c < ncls; ++c) names[c] = "m" + std::to_string(c);

  std::set<std::tuple<StateId, StateId, SymbolId>> edge_set;
  for (const auto& e : p.edges())
    edge_set.insert({static_cast<StateId>(renum[cls[e.src]]),
                     static_cast<StateId>(renum[cls[e.dst]]), e.label});
  std::vector<Edge> edges;
  for (const auto& [s, d, l] : edge_set) edges.push_back({s, d, l});
  return Presentation(p.alphabet(), names, edges, Kind::sofic, true);
}

}  // namespace

Presentation image_presentation(const Presentation& x, const SlidingBlockCode& pi,
                                const AnalysisConfig& cfg) {
  require(pi.one_block(), Errc::invalid_argument,
          "image_presentation needs a 1-block code (normalize first)");
  std::vector<Edge> edges;
  for (const auto& e : x.edges()) edges.push_back({e.src, e.dst, pi.map_symbol(e.label)});
  Presentation relabeled(pi.codomain(), x.state_names(), edges, Kind::sofic);
  return determinize_irreducible(relabeled, pi.codomain(), cfg);
}

Presentation edge_sft_of(const Presentation& labeled) {
  Alphabet a;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labeled.edges().size(); ++i) {
    const auto& e = labeled.edges()[i];
    std::string d = labeled.state_names()[e.src] + ">" + labeled.alphabet().format(e.label);
    while (seen.count(d)) d += "'";
    seen.insert(d);
    a.display.push_back(d);
  }
  std::vector<std::vector<SymbolId>> succ(labeled.edges().size());
  for (SymbolId e = 0; e < labeled.edges().size(); ++e)
    for (SymbolId f = 0; f < labeled.edges().size(); ++f)
      if (labeled.edges()[e].dst == labeled.edges()[f].src) succ[e].push_back(f);
  return make_vertex_sft(a, succ);
}

RightResolvingCover minimal_right_resolving(const Presentation& p, const AnalysisConfig& cfg) {
  Presentation det = determinize_irreducible(p, p.alphabet(), cfg);
  Presentation cover = follower_merge(det, cfg);
  Presentation edge_p = edge_sft_of(cover);
  std::map<Word, SymbolId> table;
  for (SymbolId e = 0; e < cover.edges().size(); ++e) table[{e}] = cover.edges()[e].label;
  SlidingBlockCode projection =
      shrink_codomain(edge_p, cover.alphabet(), 0, 0, std::move(table), cfg);
  return {std::move(cover), std::move(edge_p), std::move(projection)};
}

namespace {

// canonical signature of a deterministic strongly connected labeled graph,
// minimized over the choice of root
std::vector<std::vector<std::int64_t>> canonical_form(const Presentation& p,
                                                      const std::vector<SymbolId>& label_order) {
  std::vector<std::vector<std::int64_t>> best;
  for (StateId root = 0; root < p.state_count(); ++root) {
    std::vector<std::int32_t> idx(p.state_count(), -1);
    std::vector<StateId> order{root};
    idx[root] = 0;
    std::vector<std::vector<std::int64_t>> form;
    for (std::size_t qi = 0; qi < order.size(); ++qi) {
      StateId s = order[qi];
      std::map<SymbolId, StateId> row;
      for (auto ei : p.out_edges(s)) row[p.edges()[ei].label] = p.edges()[ei].dst;
      std::vector<std::int64_t> sig;
      for (SymbolId a : label_order) {
        auto it = row.find(a);
        if (it == row.end()) {
          sig.push_back(-1);
          continue;
        }
        if (idx[it->second] < 0) {
          idx[it->second] = static_cast<std::int32_t>(order.size());
          order.push_back(it->second);
        }
        sig.push_back(idx[it->second]);
      }
      form.push_back(std::move(sig));
    }
    if (best.empty() || form < best) best = std::move(form);
  }
  return best;
}

}  // namespace

bool same_sofic_shift(const Presentation& a, const Presentation& b, const AnalysisConfig& cfg) {
  auto ca = minimal_right_resolving(a, cfg);
  auto cb = minimal_right_resolving(b, cfg);
  std::set<std::string> la, lb;
  for (const auto& e : ca.cover.edges()) la.insert(ca.cover.alphabet().format(e.label));
  for (const auto& e : cb.cover.edges()) lb.insert(cb.cover.alphabet().format(e.label));
  if (la != lb) return false;
  if (ca.cover.state_count() != cb.cover.state_count()) return false;

  // shared label order by display
  std::vector<std::string> sorted(la.begin(), la.end());
  std::vector<SymbolId> order_a, order_b;
  for (const auto& d : sorted) {
    order_a.push_back(*ca.cover.alphabet().find(d));
    order_b.push_back(*cb.cover.alphabet().find(d));
  }
  return canonical_form(ca.cover, order_a) == canonical_form(cb.cover, order_b);
}

}  // namespace sofic
