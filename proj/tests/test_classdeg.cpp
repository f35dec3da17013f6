#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <string>
#include <tuple>

#include "sofic/classdeg.hpp"
#include "sofic/fixtures.hpp"
#include "sofic/fto.hpp"

using namespace sofic;
using namespace sofic::fixtures;

namespace {

// independent preimage enumeration by depth-first extension
std::vector<Word> enum_preimages(const Presentation& x, const SlidingBlockCode& pi,
                                 const Word& w) {
  std::vector<Word> out, stack;
  for (SymbolId s = 0; s < x.symbol_count(); ++s)
    if (pi.map_symbol(s) == w.at(0)) stack.push_back({s});
  while (!stack.empty()) {
    Word u = std::move(stack.back());
    stack.pop_back();
    if (u.size() == w.size()) {
      out.push_back(std::move(u));
      continue;
    }
    for (SymbolId s : x.successors(u.back()))
      if (pi.map_symbol(s) == w[u.size()]) {
        Word v = u;
        v.push_back(s);
        stack.push_back(std::move(v));
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool routable_oracle(const std::vector<Word>& pre, const Word& u, int n, SymbolId a) {
  for (const Word& v : pre)
    if (v.front() == u.front() && v.back() == u.back() && v[static_cast<std::size_t>(n)] == a)
      return true;
  return false;
}

bool tb_oracle(const std::vector<Word>& pre, int n, const std::vector<SymbolId>& m) {
  for (const Word& u : pre) {
    bool ok = false;
    for (SymbolId a : m)
      if (routable_oracle(pre, u, n, a)) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

std::vector<SymbolId> fiber_of(const SlidingBlockCode& pi, SymbolId y) {
  std::vector<SymbolId> f;
  for (SymbolId s = 0; s < pi.domain().symbol_count(); ++s)
    if (pi.map_symbol(s) == y) f.push_back(s);
  return f;
}

// exhaustive minimal transition block: positions in order, subsets by size
// then lexicographically
TransitionBlock minimal_oracle(const Presentation& x, const SlidingBlockCode& pi,
                               const Word& w) {
  auto pre = enum_preimages(x, pi, w);
  REQUIRE(!pre.empty());
  TransitionBlock best;
  for (int n = 1; n + 1 < static_cast<int>(w.size()); ++n) {
    auto fiber = fiber_of(pi, w[static_cast<std::size_t>(n)]);
    for (std::size_t mask = 1; mask < (std::size_t{1} << fiber.size()); ++mask) {
      std::vector<SymbolId> m;
      for (std::size_t i = 0; i < fiber.size(); ++i)
        if (mask & (std::size_t{1} << i)) m.push_back(fiber[i]);
      if (!tb_oracle(pre, n, m)) continue;
      auto cand = std::make_tuple(m.size(), n, m);
      if (best.routing.empty() ||
          cand < std::make_tuple(best.depth(), best.n, best.routing))
        best = {w, n, m};
    }
  }
  REQUIRE(!best.routing.empty());
  return best;
}

std::set<Word> image_words(const Presentation& x, const SlidingBlockCode& pi, int len) {
  std::set<Word> ws;
  for (const Word& u : enumerate_words(x, len)) ws.insert(pi.apply(u));
  return ws;
}

Word xw(const Alphabet& a, const std::string& text) { return a.parse_word(text); }

}  // namespace

TEST_CASE("preimage_words on the named fixtures") {
  auto merge = normalize(merge_triple());
  const auto& mx = merge.triple.x;
  const auto& mp = merge.triple.pi;
  CHECK(preimage_words(mp, xw(mp.codomain(), "01")) ==
        std::vector<Word>{xw(mx.alphabet(), "ab"), xw(mx.alphabet(), "ac")});

  Presentation f2 = full_shift(2);
  auto id = identity_code(f2);
  CHECK(preimage_words(id, xw(f2.alphabet(), "0110")) ==
        std::vector<Word>{xw(f2.alphabet(), "0110")});

  auto xo = normalize(xor_triple());
  auto pre = preimage_words(xo.triple.pi, xw(xo.triple.pi.codomain(), "00"));
  REQUIRE(pre.size() == 2);  // the two constant tracks
  for (const Word& u : pre) CHECK(u[0] == u[1]);
  CHECK(pre[0][0] != pre[1][0]);
}

TEST_CASE("preimage_words agrees with enumeration") {
  for (const char* name : {"merge", "xor", "gm-even", "even-cover"}) {
    CAPTURE(name);
    auto t = normalize(triple_by_name(name));
    for (int len = 1; len <= 4; ++len)
      for (const Word& w : image_words(t.triple.x, t.triple.pi, len))
        CHECK(preimage_words(t.triple.pi, w) == enum_preimages(t.triple.x, t.triple.pi, w));
  }
}

TEST_CASE("routability: fixed examples") {
  auto merge = normalize(merge_triple());
  const auto& mp = merge.triple.pi;
  const auto& ma = merge.triple.x.alphabet();
  const auto& ya = mp.codomain();
  CHECK(routable_through(mp, xw(ya, "111"), 1, xw(ma, "bcb"), *ma.find("b")));
  CHECK(routable_through(mp, xw(ya, "010"), 1, xw(ma, "aba"), *ma.find("c")));

  auto xo = normalize(xor_triple());
  const auto& xa = xo.triple.x.alphabet();
  Word w000 = xw(xo.triple.pi.codomain(), "000");
  Word track0(3, *xa.find("00"));
  CHECK_FALSE(routable_through(xo.triple.pi, w000, 1, track0, *xa.find("11")));
  CHECK(routable_through(xo.triple.pi, w000, 1, track0, *xa.find("00")));
}

TEST_CASE("routability agrees with enumeration and depends only on endpoints") {
  for (const char* name : {"merge", "xor", "gm-even"}) {
    CAPTURE(name);
    auto t = normalize(triple_by_name(name));
    const auto& pi = t.triple.pi;
    for (int len = 3; len <= 4; ++len)
      for (const Word& w : image_words(t.triple.x, t.triple.pi, len)) {
        auto pre = enum_preimages(t.triple.x, pi, w);
        for (int n = 1; n + 1 < len; ++n)
          for (const Word& u : pre)
            for (SymbolId a : fiber_of(pi, w[static_cast<std::size_t>(n)])) {
              bool got = routable_through(pi, w, n, u, a);
              CHECK(got == routable_oracle(pre, u, n, a));
              // endpoint dependence
              for (const Word& v : pre)
                if (v.front() == u.front() && v.back() == u.back())
                  CHECK(got == routable_through(pi, w, n, v, a));
            }
      }
  }
}

TEST_CASE("routability rejects bad inputs") {
  auto merge = normalize(merge_triple());
  const auto& mp = merge.triple.pi;
  const auto& ma = merge.triple.x.alphabet();
  const auto& ya = mp.codomain();
  Word w = xw(ya, "111");
  Word u = xw(ma, "bcb");
  SymbolId b = *ma.find("b");
  for (int n : {0, 2, 5, -1}) {
    CAPTURE(n);
    bool thrown = false;
    try {
      routable_through(mp, w, n, u, b);
    } catch (const Error& e) {
      thrown = true;
      CHECK(e.code() == Errc::bad_position);
    }
    CHECK(thrown);
  }
  bool thrown = false;
  try {
    routable_through(mp, w, 1, xw(ma, "aba"), b);  // aba maps to 010, not 111
  } catch (const Error& e) {
    thrown = true;
    CHECK(e.code() == Errc::not_a_preimage);
  }
  CHECK(thrown);
  CHECK_THROWS_AS(routable_through(mp, w, 1, u, *ma.find("a")), Error);  // a not in fiber of 1
}

TEST_CASE("transition blocks: fixed examples and oracle agreement") {
  auto merge = normalize(merge_triple());
  const auto& mp = merge.triple.pi;
  const auto& ma = merge.triple.x.alphabet();
  const auto& ya = mp.codomain();
  CHECK(is_transition_block(mp, xw(ya, "000"), 1, {*ma.find("a")}));
  CHECK(is_transition_block(mp, xw(ya, "111"), 1, {*ma.find("b")}));
  CHECK(is_transition_block(mp, xw(ya, "111"), 1, {*ma.find("c")}));

  auto xo = normalize(xor_triple());
  const auto& xa = xo.triple.x.alphabet();
  Word w000 = xw(xo.triple.pi.codomain(), "000");
  CHECK_FALSE(is_transition_block(xo.triple.pi, w000, 1, {*xa.find("00")}));
  CHECK_FALSE(is_transition_block(xo.triple.pi, w000, 1, {*xa.find("11")}));
  CHECK(is_transition_block(xo.triple.pi, w000, 1, {*xa.find("00"), *xa.find("11")}));

  for (const char* name : {"merge", "xor", "gm-even"}) {
    CAPTURE(name);
    auto t = normalize(triple_by_name(name));
    const auto& pi = t.triple.pi;
    for (const Word& w : image_words(t.triple.x, t.triple.pi, 3)) {
      auto pre = enum_preimages(t.triple.x, pi, w);
      auto fiber = fiber_of(pi, w[1]);
      for (std::size_t mask = 1; mask < (std::size_t{1} << fiber.size()); ++mask) {
        std::vector<SymbolId> m;
        for (std::size_t i = 0; i < fiber.size(); ++i)
          if (mask & (std::size_t{1} << i)) m.push_back(fiber[i]);
        CHECK(is_transition_block(pi, w, 1, m) == tb_oracle(pre, 1, m));
      }
    }
  }
}

TEST_CASE("minimal depth per word") {
  auto merge = normalize(merge_triple());
  const auto& mp = merge.triple.pi;
  const auto& ma = merge.triple.x.alphabet();
  const auto& ya = mp.codomain();
  auto tb = minimal_depth_for_word(mp, xw(ya, "000"));
  CHECK(tb.n == 1);
  CHECK(tb.routing == std::vector<SymbolId>{*ma.find("a")});
  tb = minimal_depth_for_word(mp, xw(ya, "111"));
  CHECK(tb.depth() == 1);
  CHECK(tb.routing == std::vector<SymbolId>{*ma.find("b")});  // lexicographic tie-break

  auto xo = normalize(xor_triple());
  for (const Word& w : image_words(xo.triple.x, xo.triple.pi, 3))
    CHECK(minimal_depth_for_word(xo.triple.pi, w).depth() == 2);

  for (const char* name : {"merge", "xor", "gm-even", "even-cover"}) {
    CAPTURE(name);
    auto t = normalize(triple_by_name(name));
    for (int len = 3; len <= 4; ++len)
      for (const Word& w : image_words(t.triple.x, t.triple.pi, len)) {
        auto got = minimal_depth_for_word(t.triple.pi, w);
        auto want = minimal_oracle(t.triple.x, t.triple.pi, w);
        CHECK(got.n == want.n);
        CHECK(got.routing == want.routing);
        CHECK(is_transition_block(t.triple.pi, w, got.n, got.routing));
      }
  }

  bool thrown = false;
  try {
    minimal_depth_for_word(mp, xw(ya, "01"));
  } catch (const Error& e) {
    thrown = true;
    CHECK(e.code() == Errc::bad_position);
  }
  CHECK(thrown);
}

TEST_CASE("transition blocks survive extension") {
  for (const char* name : {"merge", "xor", "gm-even"}) {
    CAPTURE(name);
    auto t = normalize(triple_by_name(name));
    const auto& pi = t.triple.pi;
    auto rep = class_degree_upper(pi, 6);
    const auto& w = rep.witness.w;
    for (const Word& w5 : image_words(t.triple.x, t.triple.pi, static_cast<int>(w.size()) + 2))
      for (std::size_t off = 0; off + w.size() <= w5.size(); ++off) {
        if (!std::equal(w.begin(), w.end(), w5.begin() + static_cast<long>(off))) continue;
        int n2 = rep.witness.n + static_cast<int>(off);
        if (n2 <= 0 || n2 + 1 >= static_cast<int>(w5.size())) continue;
        CHECK(is_transition_block(pi, w5, n2, rep.witness.routing));
      }
  }
}

TEST_CASE("class degree upper bounds") {
  SUBCASE("merge stabilizes at the floor with the forced witness") {
    auto t = normalize(merge_triple());
    const auto& ma = t.triple.x.alphabet();
    auto rep = class_degree_upper(t.triple.pi, 3);
    CHECK(rep.upper == 1);
    CHECK(rep.stabilized);
    CHECK(rep.stabilized_at == 3);
    CHECK(rep.method == "depth-floor");
    CHECK(rep.witness.w == t.triple.pi.codomain().parse_word("000"));
    CHECK(rep.witness.n == 1);
    CHECK(rep.witness.routing == std::vector<SymbolId>{*ma.find("a")});
  }
  SUBCASE("xor matches its degree") {
    auto t = normalize(xor_triple());
    auto rep = class_degree_upper(t.triple.pi, 6);
    CHECK(rep.upper == 2);
    CHECK(rep.stabilized);
    CHECK(rep.method == "degree-match");
    CHECK(rep.trace.front() == 2);
  }
  SUBCASE("identity and almost invertible fixtures have class degree 1") {
    Presentation gm = golden_mean();
    auto rep = class_degree_upper(identity_code(gm), 3);
    CHECK(rep.upper == 1);
    CHECK(rep.stabilized);
    for (const char* name : {"gm-even", "even-cover"}) {
      CAPTURE(name);
      auto t = normalize(triple_by_name(name));
      auto r = class_degree_upper(t.triple.pi, 6);
      CHECK(r.upper == 1);
      CHECK(r.stabilized);
    }
  }
  SUBCASE("finite-to-one lifts: class degree equals degree") {
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u}) {
      CAPTURE(seed);
      auto t = normalize(random_lift_triple(seed, 4, 3));
      auto deg = degree(t.triple.x, t.triple.pi);
      auto rep = class_degree_upper(t.triple.pi, 8);
      REQUIRE(rep.stabilized);
      CHECK(rep.upper == *deg.degree);
      CHECK(is_transition_block(t.triple.pi, rep.witness.w, rep.witness.n,
                                rep.witness.routing));
    }
  }
  SUBCASE("random onto fixtures: honest traces and witnesses") {
    for (unsigned seed : {1u, 2u, 3u, 4u, 5u, 6u}) {
      CAPTURE(seed);
      auto t = normalize(random_onto_triple(seed, 4, 2));
      auto rep = class_degree_upper(t.triple.pi, 6);
      CHECK(std::is_sorted(rep.trace.rbegin(), rep.trace.rend()));
      CHECK(rep.upper == rep.trace.back());
      CHECK(is_transition_block(t.triple.pi, rep.witness.w, rep.witness.n,
                                rep.witness.routing));
      // first trace entry is exactly the best depth over length-3 words
      std::size_t c3 = SIZE_MAX;
      for (const Word& w : image_words(t.triple.x, t.triple.pi, 3))
        c3 = std::min(c3, minimal_oracle(t.triple.x, t.triple.pi, w).depth());
      CHECK(rep.trace.front() == c3);
    }
  }
}

TEST_CASE("unique routing symbol") {
  auto merge = normalize(merge_triple());
  const auto& mp = merge.triple.pi;
  const auto& ma = merge.triple.x.alphabet();
  const auto& ya = mp.codomain();
  TransitionBlock forced{xw(ya, "000"), 1, {*ma.find("a")}};
  CHECK(unique_routing_symbol(mp, forced, xw(ma, "aaa")) == *ma.find("a"));
  TransitionBlock viab{xw(ya, "111"), 1, {*ma.find("b")}};
  CHECK(unique_routing_symbol(mp, viab, xw(ma, "ccc")) == *ma.find("b"));
  CHECK(unique_routing_symbol(mp, viab, xw(ma, "bbb")) == *ma.find("b"));

  auto xo = normalize(xor_triple());
  const auto& xa = xo.triple.x.alphabet();
  auto rep = class_degree_upper(xo.triple.pi, 3);
  REQUIRE(rep.witness.depth() == 2);
  Word track0(rep.witness.w.size(), *xa.find("00"));
  if (xo.triple.x.contains_word(track0) && xo.triple.pi.apply(track0) == rep.witness.w) {
    CHECK(unique_routing_symbol(xo.triple.pi, rep.witness, track0) == *xa.find("00"));
  }
  for (const Word& u : preimage_words(xo.triple.pi, rep.witness.w)) {
    SymbolId a = unique_routing_symbol(xo.triple.pi, rep.witness, u);
    CHECK(a == u[static_cast<std::size_t>(rep.witness.n)]);  // rigid tracks route via themselves
  }

  SUBCASE("non-minimal blocks are refused") {
    TransitionBlock fat{xw(ya, "111"), 1, {*ma.find("b"), *ma.find("c")}};
    bool thrown = false;
    try {
      unique_routing_symbol(mp, fat, xw(ma, "bbb"));
    } catch (const Error& e) {
      thrown = true;
      CHECK(e.code() == Errc::not_minimal);
    }
    CHECK(thrown);

    const auto& xp = xo.triple.pi;
    TransitionBlock narrow{xw(xp.codomain(), "000"), 1, {*xa.find("00")}};
    Word track1(3, *xa.find("11"));
    thrown = false;
    try {
      unique_routing_symbol(xp, narrow, track1);
    } catch (const Error& e) {
      thrown = true;
      CHECK(e.code() == Errc::not_minimal);
    }
    CHECK(thrown);
  }
}

TEST_CASE("every certified-minimal block routes every preimage uniquely") {
  for (const char* name : {"merge", "xor", "gm-even", "even-cover"}) {
    CAPTURE(name);
    auto t = normalize(triple_by_name(name));
    auto rep = class_degree_upper(t.triple.pi, 6);
    REQUIRE(rep.stabilized);
    for (const Word& u : preimage_words(t.triple.pi, rep.witness.w)) {
      SymbolId a = unique_routing_symbol(t.triple.pi, rep.witness, u);
      CHECK(routable_through(t.triple.pi, rep.witness.w, rep.witness.n, u, a));
    }
  }
}
