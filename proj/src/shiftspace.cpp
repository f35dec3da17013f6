#include "sofic/shiftspace.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace sofic {

bool Alphabet::dotted() const {
  for (const auto& d : display)
    if (d.size() != 1) return true;
  return false;
}

std::string Alphabet::format(SymbolId s) const {
  require(s < display.size(), Errc::invalid_argument, "symbol id out of range");
  return display[s];
}

std::string Alphabet::format(const Word& w) const {
  std::string out;
  bool dot = dotted();
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (dot && i) out += '.';
    out += format(w[i]);
  }
  return out;
}

std::optional<SymbolId> Alphabet::find(const std::string& d) const {
  for (std::size_t i = 0; i < display.size(); ++i)
    if (display[i] == d) return static_cast<SymbolId>(i);
  return std::nullopt;
}

Word Alphabet::parse_word(const std::string& text) const {
  Word w;
  if (text.empty()) return w;
  if (dotted()) {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t dot = text.find('.', pos);
      std::string part = text.substr(pos, dot == std::string::npos ? dot : dot - pos);
      auto s = find(part);
      require(s.has_value(), Errc::parse_error, "unknown symbol '" + part + "'");
      w.push_back(*s);
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }
  } else {
    for (char c : text) {
      auto s = find(std::string(1, c));
      require(s.has_value(), Errc::parse_error, std::string("unknown symbol '") + c + "'");
      w.push_back(*s);
    }
  }
  return w;
}

void Alphabet::validate() const {
  require(!display.empty(), Errc::invalid_argument, "alphabet is empty");
  std::set<std::string> seen;
  for (const auto& d : display) {
    require(!d.empty(), Errc::invalid_argument, "empty symbol display");
    require(seen.insert(d).second, Errc::invalid_argument, "duplicate symbol display '" + d + "'");
  }
}

const char* kind_name(Kind k) {
  switch (k) {
    case Kind::vertex_sft: return "vertex-sft";
    case Kind::edge_sft: return "edge-sft";
    case Kind::sofic: return "sofic";
  }
  return "?";
}

Kind kind_from_name(const std::string& s) {
  if (s == "vertex-sft") return Kind::vertex_sft;
  if (s == "edge-sft") return Kind::edge_sft;
  if (s == "sofic") return Kind::sofic;
  raise(Errc::parse_error, "unknown presentation kind '" + s + "'");
}

Presentation::Presentation(Alphabet alphabet, std::vector<std::string> state_names,
                           std::vector<Edge> edges, Kind kind, bool right_resolving)
    : alphabet_(std::move(alphabet)),
      state_names_(std::move(state_names)),
      edges_(std::move(edges)),
      kind_(kind),
      right_resolving_(right_resolving) {
  alphabet_.validate();
  require(!state_names_.empty(), Errc::invalid_argument, "presentation has no states");
  {
    std::set<std::string> seen;
    for (const auto& n : state_names_) {
      require(!n.empty(), Errc::invalid_argument, "empty state name");
      require(seen.insert(n).second, Errc::parse_error, "duplicate state name '" + n + "'");
    }
  }
  const std::size_t ns = state_names_.size();
  for (const auto& e : edges_) {
    require(e.src < ns && e.dst < ns, Errc::parse_error, "edge endpoint out of range");
    require(e.label < alphabet_.size(), Errc::parse_error, "edge label index out of range");
  }

  if (kind_ == Kind::vertex_sft) {
    require(ns == alphabet_.size(), Errc::invalid_argument,
            "vertex-SFT needs states in bijection with symbols");
    std::set<std::pair<StateId, StateId>> seen;
    for (const auto& e : edges_) {
      require(e.label == e.dst, Errc::invalid_argument,
              "vertex-SFT edge must be labeled by its destination");
      require(seen.insert({e.src, e.dst}).second, Errc::invalid_argument,
              "duplicate vertex-SFT edge");
    }
  }
  if (kind_ == Kind::edge_sft) {
    require(edges_.size() == alphabet_.size(), Errc::invalid_argument,
            "edge-SFT needs symbols in bijection with edges");
    for (std::size_t i = 0; i < edges_.size(); ++i)
      require(edges_[i].label == i, Errc::invalid_argument,
              "edge-SFT edge i must carry label i");
  }

  out_.assign(ns, {});
  in_.assign(ns, {});
  for (std::size_t i = 0; i < edges_.size(); ++i) {
    out_[edges_[i].src].push_back(static_cast<std::uint32_t>(i));
    in_[edges_[i].dst].push_back(static_cast<std::uint32_t>(i));
  }

  essential_ = true;
  for (std::size_t s = 0; s < ns; ++s)
    if (out_[s].empty() || in_[s].empty()) essential_ = false;

  // vertex-SFTs (edges labeled by destination) and edge-SFTs (distinct label
  // per edge) are right-resolving by construction
  if (kind_ != Kind::sofic) right_resolving_ = true;

  if (right_resolving_) {
    for (std::size_t s = 0; s < ns; ++s) {
      std::set<SymbolId> labels;
      for (auto ei : out_[s])
        require(labels.insert(edges_[ei].label).second, Errc::invalid_argument,
                "right-resolving flag set but state has duplicate outgoing labels");
    }
  }

  if (kind_ == Kind::vertex_sft) {
    succ_.assign(ns, {});
    pred_.assign(ns, {});
    for (const auto& e : edges_) {
      succ_[e.src].push_back(e.dst);
      pred_[e.dst].push_back(e.src);
    }
    for (auto& v : succ_) std::sort(v.begin(), v.end());
    for (auto& v : pred_) std::sort(v.begin(), v.end());
  }
}

bool Presentation::allows(SymbolId u, SymbolId v) const {
  require(kind_ == Kind::vertex_sft, Errc::invalid_argument, "allows() needs a vertex-SFT");
  const auto& s = succ_[u];
  return std::binary_search(s.begin(), s.end(), v);
}

const std::vector<SymbolId>& Presentation::successors(SymbolId u) const {
  require(kind_ == Kind::vertex_sft, Errc::invalid_argument, "successors() needs a vertex-SFT");
  return succ_[u];
}

const std::vector<SymbolId>& Presentation::predecessors(SymbolId u) const {
  require(kind_ == Kind::vertex_sft, Errc::invalid_argument, "predecessors() needs a vertex-SFT");
  return pred_[u];
}

bool Presentation::contains_word(const Word& w) const {
  if (w.empty()) return true;
  for (auto s : w)
    if (s >= symbol_count()) return false;
  if (kind_ == Kind::vertex_sft) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      if (!allows(w[i], w[i + 1])) return false;
    return true;
  }
  // set of states reachable by reading w[0..i]
  std::vector<char> cur(state_count(), 0);
  bool any = false;
  for (const auto& e : edges_)
    if (e.label == w[0]) cur[e.dst] = 1, any = true;
  if (!any) return false;
  for (std::size_t i = 1; i < w.size(); ++i) {
    std::vector<char> next(state_count(), 0);
    any = false;
    for (const auto& e : edges_)
      if (e.label == w[i] && cur[e.src]) next[e.dst] = 1, any = true;
    if (!any) return false;
    cur.swap(next);
  }
  return true;
}

void Presentation::check_essential(const char* who) const {
  require(essential_, Errc::invalid_argument,
          std::string(who) + " requires an essential presentation (run trim_essential)");
}

Presentation make_vertex_sft(Alphabet a, const std::vector<std::vector<SymbolId>>& succ) {
  require(a.size() == succ.size(), Errc::invalid_argument, "successor table size mismatch");
  std::vector<Edge> edges;
  for (StateId u = 0; u < succ.size(); ++u)
    for (SymbolId v : succ[u]) edges.push_back({u, v, v});
  std::vector<std::string> names = a.display;
  return Presentation(std::move(a), std::move(names), std::move(edges), Kind::vertex_sft);
}

Presentation trim_essential(const Presentation& p) {
  require(!p.edges().empty(), Errc::empty_shift, "presentation has no edges");
  const std::size_t ns = p.state_count();
  std::vector<char> alive(ns, 1);
  std::vector<std::size_t> outd(ns, 0), ind(ns, 0);
  for (const auto& e : p.edges()) ++outd[e.src], ++ind[e.dst];

  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t s = 0; s < ns; ++s) {
      if (alive[s] && (outd[s] == 0 || ind[s] == 0)) {
        alive[s] = 0;
        changed = true;
        for (auto ei : p.out_edges(static_cast<StateId>(s))) {
          const auto& e = p.edges()[ei];
          if (alive[e.dst]) --ind[e.dst];
        }
        for (auto ei : p.in_edges(static_cast<StateId>(s))) {
          const auto& e = p.edges()[ei];
          if (alive[e.src]) --outd[e.src];
        }
      }
    }
  }

  std::vector<StateId> remap(ns, 0);
  std::vector<std::string> names;
  for (std::size_t s = 0; s < ns; ++s)
    if (alive[s]) {
      remap[s] = static_cast<StateId>(names.size());
      names.push_back(p.state_names()[s]);
    }
  require(!names.empty(), Errc::empty_shift, "trimming removed every state");

  std::vector<Edge> edges;
  for (const auto& e : p.edges())
    if (alive[e.src] && alive[e.dst]) edges.push_back({remap[e.src], remap[e.dst], e.label});

  if (p.kind() == Kind::vertex_sft) {
    // surviving states keep their symbols; restrict the alphabet alongside
    Alphabet a;
    for (std::size_t s = 0; s < ns; ++s)
      if (alive[s]) a.display.push_back(p.alphabet().display[s]);
    std::vector<Edge> re;
    for (auto e : edges) re.push_back({e.src, e.dst, e.dst});
    return Presentation(std::move(a), std::move(names), std::move(re), Kind::vertex_sft);
  }
  if (p.kind() == Kind::edge_sft) {
    Alphabet a;
    std::vector<Edge> re;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      a.display.push_back(p.alphabet().display[edges[i].label]);
      re.push_back({edges[i].src, edges[i].dst, static_cast<SymbolId>(i)});
    }
    return Presentation(std::move(a), std::move(names), std::move(re), Kind::edge_sft);
  }
  return Presentation(p.alphabet(), std::move(names), std::move(edges), Kind::sofic,
                      p.right_resolving());
}

namespace {

// states reachable from s along directed edges (excluding s unless on a cycle)
std::vector<char> reachable(const Presentation& p, StateId s, bool forward) {
  std::vector<char> seen(p.state_count(), 0);
  std::vector<StateId> stack{s};
  seen[s] = 1;
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    const auto& es = forward ? p.out_edges(u) : p.in_edges(u);
    for (auto ei : es) {
      const auto& e = p.edges()[ei];
      StateId v = forward ? e.dst : e.src;
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return seen;
}

}  // namespace

bool is_irreducible(const Presentation& p) {
  p.check_essential("is_irreducible");
  auto fwd = reachable(p, 0, true);
  auto bwd = reachable(p, 0, false);
  for (std::size_t s = 0; s < p.state_count(); ++s)
    if (!fwd[s] || !bwd[s]) return false;
  return true;
}

int period(const Presentation& p) {
  require(is_irreducible(p), Errc::not_irreducible, "period needs an irreducible presentation");
  // BFS layering; every edge contributes gcd(level(src)+1-level(dst))
  std::vector<int> level(p.state_count(), -1);
  std::vector<StateId> queue{0};
  level[0] = 0;
  std::size_t qi = 0;
  long long g = 0;
  while (qi < queue.size()) {
    StateId u = queue[qi++];
    for (auto ei : p.out_edges(u)) {
      StateId v = p.edges()[ei].dst;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      } else {
        g = std::gcd(g, static_cast<long long>(level[u]) + 1 - level[v]);
      }
    }
  }
  // revisit edges whose endpoints got levels after the first pass
  for (const auto& e : p.edges())
    g = std::gcd(g, static_cast<long long>(level[e.src]) + 1 - level[e.dst]);
  return static_cast<int>(g < 0 ? -g : g);
}

std::vector<Word> enumerate_words(const Presentation& p, int length, const AnalysisConfig& cfg) {
  p.check_essential("enumerate_words");
  require(length >= 0, Errc::invalid_argument, "negative word length");
  std::vector<Word> out;
  if (length == 0) return out;

  // frontier of (word, reachable end-state set); the state set makes
  // extension decidable without revisiting the graph per word
  struct Node {
    Word w;
    std::vector<StateId> ends;
  };
  std::vector<Node> frontier;
  {
    std::map<SymbolId, std::set<StateId>> first;
    for (const auto& e : p.edges()) first[e.label].insert(e.dst);
    for (auto& [s, ends] : first)
      frontier.push_back({{s}, std::vector<StateId>(ends.begin(), ends.end())});
  }
  for (int l = 1; l < length; ++l) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      std::map<SymbolId, std::set<StateId>> ext;
      for (StateId s : node.ends)
        for (auto ei : p.out_edges(s)) {
          const auto& e = p.edges()[ei];
          ext[e.label].insert(e.dst);
        }
      for (auto& [sym, ends] : ext) {
        Word w = node.w;
        w.push_back(sym);
        next.push_back({std::move(w), std::vector<StateId>(ends.begin(), ends.end())});
        require(next.size() <= cfg.word_cap, Errc::resource_limit,
                "word enumeration exceeded word_cap");
      }
    }
    frontier = std::move(next);
  }
  out.reserve(frontier.size());
  for (auto& n : frontier) out.push_back(std::move(n.w));
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t count_words(const Presentation& p, int length, const AnalysisConfig& cfg) {
  return enumerate_words(p, length, cfg).size();
}

}  // namespace sofic
