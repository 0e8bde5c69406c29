#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "moss/poset.hpp"
#include "moss/relation.hpp"

using namespace moss;

namespace {

FinPoset diamond() {
  return FinPoset::make({"bot", "l", "r", "top"},
                        {{"bot", "l"}, {"bot", "r"}, {"l", "top"}, {"r", "top"}});
}

/// Deterministic pseudo-random monotone relation: monotone interior of a
/// random table (seeded), so different seeds give a varied test diet.
MonotoneRel random_rel(const FinPoset& src, const FinPoset& tgt, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<bool>> raw(tgt.size(), std::vector<bool>(src.size(), false));
  for (auto& row : raw)
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = coin(rng);
  return monotone_interior(src, tgt, raw);
}

} // namespace

TEST_CASE("relation construction enforces monotonicity") {
  FinPoset c2 = FinPoset::chain(2);
  // holds(c1, c0) alone is not down/up closed appropriately
  CHECK_THROWS_AS(MonotoneRel(c2, c2, {{false, false}, {true, false}}), TypeError);
  // the order itself always works
  CHECK_NOTHROW(id_rel(c2));
}

TEST_CASE("identity relation is neutral for composition") {
  FinPoset a = FinPoset::chain(2), b = diamond();
  for (unsigned seed : {1u, 2u, 3u}) {
    MonotoneRel r = random_rel(a, b, seed);
    CHECK(compose(id_rel(b), r).same_as(r));
    CHECK(compose(r, id_rel(a)).same_as(r));
  }
}

TEST_CASE("composition is associative") {
  FinPoset a = FinPoset::chain(2), b = FinPoset::chain(3), c = diamond();
  for (unsigned seed : {4u, 5u, 6u}) {
    MonotoneRel r = random_rel(a, b, seed);
    MonotoneRel s = random_rel(b, c, seed + 10);
    MonotoneRel t = random_rel(c, a, seed + 20);
    CHECK(compose(t, compose(s, r)).same_as(compose(compose(t, s), r)));
  }
}

TEST_CASE("graph and cograph form an adjunction") {
  FinPoset c3 = FinPoset::chain(3), d = diamond();
  MonotoneMap f(c3, d, {0, 1, 3});
  MonotoneRel unit = compose(cograph(f), graph(f));   // on the domain
  MonotoneRel counit = compose(graph(f), cograph(f)); // on the codomain
  CHECK(id_rel(c3).contained_in(unit));
  CHECK(counit.contained_in(id_rel(d)));
  // for an embedding the unit collapses to the identity
  CHECK(unit.same_as(id_rel(c3)));
}

TEST_CASE("converse and negation are involutions onto flipped carriers") {
  FinPoset a = FinPoset::chain(2), b = diamond();
  for (unsigned seed : {7u, 8u}) {
    MonotoneRel r = random_rel(a, b, seed);
    MonotoneRel con = converse(r);
    CHECK(con.src().same_as(b.opposite()));
    CHECK(con.tgt().same_as(a.opposite()));
    CHECK(converse(con).same_as(r));
    MonotoneRel neg = negate(r);
    CHECK(neg.src().same_as(a.opposite()));
    CHECK(neg.tgt().same_as(b.opposite()));
    CHECK(negate(neg).same_as(r));
  }
}

TEST_CASE("restriction along inclusions picks out the sub-table") {
  FinPoset p = diamond();
  MonotoneRel r = random_rel(p, p, 11);
  MonotoneMap f = inclusion(p, {0, 1});
  MonotoneMap g = inclusion(p, {2, 3});
  MonotoneRel sub = restrict_rel(r, f, g);
  for (Index bb = 0; bb < 2; ++bb)
    for (Index aa = 0; aa < 2; ++aa) CHECK(sub.holds(bb, aa) == r.holds(g(bb), f(aa)));
  // restriction = cograph(g) . R . graph(f)
  CHECK(sub.same_as(compose(cograph(g), compose(r, graph(f)))));
}

TEST_CASE("monotone interior is the largest monotone subrelation") {
  FinPoset c2 = FinPoset::chain(2);
  std::vector<std::vector<bool>> raw = {{false, true}, {true, true}};
  // raw fails monotonicity: holds(c1, c0) forces holds(c0, c0)
  MonotoneRel inner = monotone_interior(c2, c2, raw);
  CHECK(inner.holds(1, 1));
  CHECK(inner.holds(0, 1));
  CHECK_FALSE(inner.holds(1, 0));
  CHECK_FALSE(inner.holds(0, 0));
  // maximality: flipping any removed pair back on breaks monotonicity
  for (Index y = 0; y < 2; ++y)
    for (Index x = 0; x < 2; ++x) {
      if (inner.holds(y, x) || !raw[y][x]) continue;
      auto t = inner.table();
      t[y][x] = true;
      CHECK_FALSE(MonotoneRel::is_monotone_table(c2, c2, t));
    }
}

TEST_CASE("comma squares are exact") {
  FinPoset c2 = FinPoset::chain(2), d = diamond();
  MonotoneMap f(c2, d, {0, 1});
  MonotoneMap g(c2, d, {2, 3});
  // comma poset {(a, b) | f(a) <= g(b)} with componentwise order
  std::vector<std::pair<Index, Index>> pts;
  for (Index a = 0; a < c2.size(); ++a)
    for (Index b = 0; b < c2.size(); ++b)
      if (d.leq(f(a), g(b))) pts.emplace_back(a, b);
  std::vector<std::string> labels;
  for (auto& [a, b] : pts) labels.push_back(c2.label(a) + "|" + c2.label(b));
  std::vector<std::vector<bool>> t(pts.size(), std::vector<bool>(pts.size(), false));
  for (Index i = 0; i < pts.size(); ++i)
    for (Index j = 0; j < pts.size(); ++j)
      t[i][j] = c2.leq(pts[i].first, pts[j].first) && c2.leq(pts[i].second, pts[j].second);
  FinPoset comma = FinPoset::from_closed_table(labels, t);
  std::vector<Index> i0(pts.size()), i1(pts.size());
  for (Index i = 0; i < pts.size(); ++i) {
    i0[i] = pts[i].first;
    i1[i] = pts[i].second;
  }
  MonotoneMap p0(comma, c2, i0), p1(comma, c2, i1);
  CHECK(is_exact_square(p0, p1, f, g));

  // removing a needed corner breaks exactness
  REQUIRE(pts.size() > 1);
  FinPoset smaller = sub_poset(comma, {0});
  MonotoneMap q0(smaller, c2, {i0[0]}), q1(smaller, c2, {i1[0]});
  CHECK_FALSE(is_exact_square(q0, q1, f, g));
}

TEST_CASE("exact-square checker rejects non-lax squares") {
  FinPoset c2 = FinPoset::chain(2);
  MonotoneMap id2 = MonotoneMap::identity(c2);
  MonotoneMap swapless(c2, c2, {0, 0});
  MonotoneMap top(c2, c2, {1, 1});
  // square with f . p0 = top not below g . p1 = bottom constant
  CHECK_THROWS_AS(is_exact_square(id2, id2, top, swapless), TypeError);
}
