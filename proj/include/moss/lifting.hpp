#pragma once

/**
 * @file lifting.hpp
 * @brief Relation lifting along dual-free polynomial functors.
 *
 * For a monotone relation R: X -/-> Y the lifting F-bar(R): F(X) -/-> F(Y)
 * is computed structurally:
 *
 *     const(P):  beta <=_P alpha
 *     id:        R(beta, alpha)
 *     F + G:     same injection, lifted componentwise
 *     F * G:     both components
 *     F ^ E:     every cell
 *     low(F):    every generator of beta reaches one of alpha
 *     up(F):     every generator of alpha is reached by one of beta
 *
 * Argument order mirrors MonotoneRel::holds: the target-side element (over Y)
 * comes first.  `lift_generic` is the definition-by-spans used as an
 * independent oracle: F-bar(R)(beta, alpha) iff some w over the graph poset
 * E = {(y, x) | R(y, x)} satisfies beta <= F(pY)(w) and F(pX)(w) <= alpha.
 */

#include <functional>

#include "moss/element.hpp"
#include "moss/errors.hpp"
#include "moss/functor.hpp"
#include "moss/poset.hpp"
#include "moss/relation.hpp"

namespace moss {

/// Lifted relation evaluated at a pair of elements; `rel(y, x)` is queried at
/// id-leaves (beta over the relation's target, alpha over its source).
inline bool lift_holds(const FunctorPtr& f, const std::function<bool(Index, Index)>& rel,
                       const Element& beta, const Element& alpha) {
  switch (f->kind) {
    case FKind::Const: return f->param.leq(beta.pt, alpha.pt);
    case FKind::Id: return rel(beta.pt, alpha.pt);
    case FKind::Sum:
      if (beta.kind != alpha.kind) return false;
      return lift_holds(beta.kind == EKind::InL ? f->lhs : f->rhs, rel, beta.kids[0],
                        alpha.kids[0]);
    case FKind::Prod:
      return lift_holds(f->lhs, rel, beta.kids[0], alpha.kids[0]) &&
             lift_holds(f->rhs, rel, beta.kids[1], alpha.kids[1]);
    case FKind::Exp:
      for (Index i = 0; i < f->param.size(); ++i)
        if (!lift_holds(f->lhs, rel, beta.kids[i], alpha.kids[i])) return false;
      return true;
    case FKind::Low:
      for (const Element& b : beta.kids) {
        bool reached = false;
        for (const Element& a : alpha.kids)
          if (lift_holds(f->lhs, rel, b, a)) { reached = true; break; }
        if (!reached) return false;
      }
      return true;
    case FKind::Up:
      for (const Element& a : alpha.kids) {
        bool reached = false;
        for (const Element& b : beta.kids)
          if (lift_holds(f->lhs, rel, b, a)) { reached = true; break; }
        if (!reached) return false;
      }
      return true;
    case FKind::Dual: throw TypeError("lift: normalize dual constructors away first");
  }
  throw InvariantError("lift_holds: unreachable");
}

/// Materialised lifting F-bar(R): F(src R) -/-> F(tgt R) over enumerated
/// carriers.  Construction re-checks monotonicity of the result.
inline MonotoneRel lift_rel(const FunctorPtr& f, const MonotoneRel& r,
                            std::size_t cap = kElemCap) {
  EnumObj fx = apply_obj(f, r.src(), cap);
  EnumObj fy = apply_obj(f, r.tgt(), cap);
  auto rel = [&r](Index y, Index x) { return r.holds(y, x); };
  std::vector<std::vector<bool>> t(fy.elems.size(), std::vector<bool>(fx.elems.size(), false));
  for (Index b = 0; b < fy.elems.size(); ++b)
    for (Index a = 0; a < fx.elems.size(); ++a)
      t[b][a] = lift_holds(f, rel, fy.elems[b], fx.elems[a]);
  return MonotoneRel(fx.poset, fy.poset, std::move(t));
}

/// Span-based lifting oracle (quadratic-ish and slow; for cross-checks).
inline bool lift_generic(const FunctorPtr& f, const MonotoneRel& r, const Element& beta,
                         const Element& alpha, std::size_t cap = kElemCap) {
  const FinPoset& x = r.src();
  const FinPoset& y = r.tgt();
  // graph poset E = {(y, x) | R(y, x)} with the componentwise order
  std::vector<std::string> labels;
  std::vector<std::pair<Index, Index>> pts;
  for (Index iy = 0; iy < y.size(); ++iy)
    for (Index ix = 0; ix < x.size(); ++ix)
      if (r.holds(iy, ix)) {
        pts.emplace_back(iy, ix);
        labels.push_back("(" + y.label(iy) + "|" + x.label(ix) + ")");
      }
  std::vector<std::vector<bool>> t(pts.size(), std::vector<bool>(pts.size(), false));
  for (Index i = 0; i < pts.size(); ++i)
    for (Index j = 0; j < pts.size(); ++j)
      t[i][j] = y.leq(pts[i].first, pts[j].first) && x.leq(pts[i].second, pts[j].second);
  FinPoset e = FinPoset::from_closed_table(std::move(labels), std::move(t));
  std::vector<Index> to_y(pts.size()), to_x(pts.size());
  for (Index i = 0; i < pts.size(); ++i) {
    to_y[i] = pts[i].first;
    to_x[i] = pts[i].second;
  }
  MonotoneMap py(e, y, std::move(to_y)), px(e, x, std::move(to_x));
  EnumObj fe = apply_obj(f, e, cap);
  for (const Element& w : fe.elems) {
    if (element_leq(f, y, beta, apply_map(f, py, w)) &&
        element_leq(f, x, apply_map(f, px, w), alpha))
      return true;
  }
  return false;
}

/// Membership  in: L(X) -/-> X,  holds(x, l) iff x lies in the downset l.
/// `lx` must be apply_obj(low(id), x).
inline MonotoneRel mem_rel(const FinPoset& x, const EnumObj& lx) {
  std::vector<std::vector<bool>> t(x.size(), std::vector<bool>(lx.elems.size(), false));
  for (Index ix = 0; ix < x.size(); ++ix)
    for (Index l = 0; l < lx.elems.size(); ++l)
      for (const Element& g : lx.elems[l].kids)
        if (x.leq(ix, g.pt)) { t[ix][l] = true; break; }
  return MonotoneRel(lx.poset, x, std::move(t));
}

/// Co-membership  ni: X -/-> U(X),  holds(u, x) iff x lies in the upperset u.
/// `ux` must be apply_obj(up(id), x).
inline MonotoneRel ni_rel(const FinPoset& x, const EnumObj& ux) {
  std::vector<std::vector<bool>> t(ux.elems.size(), std::vector<bool>(x.size(), false));
  for (Index u = 0; u < ux.elems.size(); ++u)
    for (Index ix = 0; ix < x.size(); ++ix)
      for (const Element& g : ux.elems[u].kids)
        if (x.leq(g.pt, ix)) { t[u][ix] = true; break; }
  return MonotoneRel(x, ux.poset, std::move(t));
}

/// Negated membership  X -/-> L(X),  holds(l, x) iff x is NOT in the downset
/// l (monotone thanks to the flipped carriers of a negation).
inline MonotoneRel not_mem_rel(const FinPoset& x, const EnumObj& lx) {
  std::vector<std::vector<bool>> t(lx.elems.size(), std::vector<bool>(x.size(), false));
  for (Index l = 0; l < lx.elems.size(); ++l)
    for (Index ix = 0; ix < x.size(); ++ix) {
      bool inside = false;
      for (const Element& g : lx.elems[l].kids)
        if (x.leq(ix, g.pt)) { inside = true; break; }
      t[l][ix] = !inside;
    }
  return MonotoneRel(x, lx.poset, std::move(t));
}

/// Negated co-membership  U(X) -/-> X,  holds(x, u) iff x is NOT in the
/// upperset u.
inline MonotoneRel not_ni_rel(const FinPoset& x, const EnumObj& ux) {
  std::vector<std::vector<bool>> t(x.size(), std::vector<bool>(ux.elems.size(), false));
  for (Index ix = 0; ix < x.size(); ++ix)
    for (Index u = 0; u < ux.elems.size(); ++u) {
      bool inside = false;
      for (const Element& g : ux.elems[u].kids)
        if (x.leq(g.pt, ix)) { inside = true; break; }
      t[ix][u] = !inside;
    }
  return MonotoneRel(ux.poset, x, std::move(t));
}

} // namespace moss
