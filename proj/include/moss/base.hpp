#pragma once

/**
 * @file base.hpp
 * @brief Bases (minimal supports) of functor elements.
 *
 * The base of t in F(X) is the least subset m of the carrier such that t is
 * in the image of F applied to the inclusion of m.  For this functor grammar
 * it is computed by collecting id-leaves; `base_bruteforce` realises the
 * definition directly (exponential in |X|) and serves as the test oracle.
 */

#include <algorithm>
#include <set>
#include <string>

#include "moss/element.hpp"
#include "moss/functor.hpp"
#include "moss/poset.hpp"

namespace moss {

/// Least support of an element: the set of id-leaf points (sorted).
inline IndexSet base_of(const FunctorPtr& f, const Element& e) {
  std::set<Index> acc;
  auto rec = [&acc](auto&& self, const FunctorPtr& g, const Element& v) -> void {
    switch (g->kind) {
      case FKind::Const: return;
      case FKind::Id: acc.insert(v.pt); return;
      case FKind::Sum: self(self, v.kind == EKind::InL ? g->lhs : g->rhs, v.kids[0]); return;
      case FKind::Prod:
        self(self, g->lhs, v.kids[0]);
        self(self, g->rhs, v.kids[1]);
        return;
      case FKind::Exp:
      case FKind::Low:
      case FKind::Up:
        for (const Element& c : v.kids) self(self, g->lhs, c);
        return;
      case FKind::Dual: throw TypeError("base: normalize dual constructors away first");
    }
  };
  rec(rec, f, e);
  return IndexSet(acc.begin(), acc.end());
}

/// Base by definition: intersect all subsets m of the carrier with
/// t in image(F(inclusion_m)), then certify the intersection itself works.
/// Exponential in |X|; oracle use only.
inline IndexSet base_bruteforce(const FunctorPtr& f, const FinPoset& x, const Element& e,
                                std::size_t cap = kElemCap) {
  const std::string target = print_el(f, x, e);
  auto in_image = [&](const IndexSet& m) {
    EnumObj sub = apply_obj(f, sub_poset(x, m), cap);
    for (const Element& s : sub.elems)
      if (print_el(f, x, embed_el(f, x, s, m)) == target) return true;
    return false;
  };
  std::vector<bool> keep(x.size(), true);
  const std::size_t total = std::size_t{1} << x.size();
  for (std::size_t bits = 0; bits < total; ++bits) {
    IndexSet m;
    for (Index i = 0; i < x.size(); ++i)
      if (bits >> i & 1) m.push_back(i);
    if (!in_image(m)) continue;
    for (Index i = 0; i < x.size(); ++i)
      if (!(bits >> i & 1)) keep[i] = keep[i] && false;
  }
  IndexSet out;
  for (Index i = 0; i < x.size(); ++i)
    if (keep[i]) out.push_back(i);
  if (!in_image(out))
    throw InvariantError("base_bruteforce: support intersection fails to carry the element");
  return out;
}

/// Checks that restriction to m and embedding back are mutually inverse on
/// the elements they apply to (all of F(sub) one way; base within m the other).
inline bool check_restrict_embed(const FunctorPtr& f, const FinPoset& x, const IndexSet& m,
                                 std::size_t cap = kElemCap) {
  FinPoset sub = sub_poset(x, m);
  EnumObj fsub = apply_obj(f, sub, cap);
  for (const Element& s : fsub.elems) {
    Element back = restrict_el(f, x, embed_el(f, x, s, m), m);
    if (print_el(f, sub, back) != print_el(f, sub, s)) return false;
  }
  EnumObj fx = apply_obj(f, x, cap);
  for (const Element& t : fx.elems) {
    IndexSet b = base_of(f, t);
    if (!std::includes(m.begin(), m.end(), b.begin(), b.end())) continue;
    Element round = embed_el(f, x, restrict_el(f, x, t, m), m);
    if (print_el(f, x, round) != print_el(f, x, t)) return false;
  }
  return true;
}

} // namespace moss
