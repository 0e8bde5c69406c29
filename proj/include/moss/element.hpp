#pragma once

/**
 * @file element.hpp
 * @brief Values of a polynomial functor applied to a poset.
 *
 * An Element is a tree matching the shape of a dual-free functor expression:
 *
 *     Point         value of const(P) or id  (index into P resp. the carrier)
 *     InL / InR     value of F + G
 *     Pair          value of F * G
 *     Table         value of F ^ E: one cell per exponent element, monotone
 *     LowSet        value of low(F): finite antichain of generators
 *     UpSet         value of up(F):  finite antichain of generators
 *
 * Canonical form: lowerset generators form the maximal antichain of the
 * generated downset, upperset generators the minimal antichain of the
 * generated upperset, and generator lists are sorted by print.  Canonical
 * prints are injective, so they double as equality keys and poset labels.
 *
 * Leaf behaviour (order and labels at id-leaves) is parameterised: plain
 * carriers use the carrier poset, while modal formulas reuse the same trees
 * with formula entailment at the leaves.
 */

#include <functional>
#include <string>
#include <vector>

#include "moss/errors.hpp"
#include "moss/functor.hpp"
#include "moss/poset.hpp"

namespace moss {

enum class EKind { Point, InL, InR, Pair, Table, LowSet, UpSet };

struct Element {
  EKind kind = EKind::Point;
  Index pt = 0;
  std::vector<Element> kids;

  static Element point(Index i) {
    Element e;
    e.pt = i;
    return e;
  }
  static Element inl(Element k) { return wrap(EKind::InL, {std::move(k)}); }
  static Element inr(Element k) { return wrap(EKind::InR, {std::move(k)}); }
  static Element pair(Element a, Element b) {
    return wrap(EKind::Pair, {std::move(a), std::move(b)});
  }
  static Element table(std::vector<Element> cells) { return wrap(EKind::Table, std::move(cells)); }
  static Element lowset(std::vector<Element> gens) { return wrap(EKind::LowSet, std::move(gens)); }
  static Element upset(std::vector<Element> gens) { return wrap(EKind::UpSet, std::move(gens)); }

private:
  static Element wrap(EKind k, std::vector<Element> kids) {
    Element e;
    e.kind = k;
    e.kids = std::move(kids);
    return e;
  }
};

/// Leaf policy: order and printing of id-leaf points.
struct LeafOps {
  std::function<bool(Index, Index)> leq;
  std::function<std::string(Index)> label;
};

inline LeafOps poset_leaves(const FinPoset& x) {
  return LeafOps{[&x](Index i, Index j) { return x.leq(i, j); },
                 [&x](Index i) { return x.label(i); }};
}

namespace detail {
inline void expect(bool ok, const char* what) {
  if (!ok) throw TypeError(std::string("element: ") + what);
}
} // namespace detail

/// Canonical print; injective on canonical elements of a fixed functor shape.
inline std::string print_el_leaf(const FunctorPtr& f, const Element& e, const LeafOps& leaf) {
  switch (f->kind) {
    case FKind::Const:
      detail::expect(e.kind == EKind::Point, "constant value must be a point");
      detail::expect(e.pt < f->param.size(), "constant point out of range");
      return f->param.label(e.pt);
    case FKind::Id:
      detail::expect(e.kind == EKind::Point, "id value must be a point");
      return leaf.label(e.pt);
    case FKind::Sum:
      if (e.kind == EKind::InL) return "inl(" + print_el_leaf(f->lhs, e.kids[0], leaf) + ")";
      detail::expect(e.kind == EKind::InR, "sum value must be inl or inr");
      return "inr(" + print_el_leaf(f->rhs, e.kids[0], leaf) + ")";
    case FKind::Prod: {
      detail::expect(e.kind == EKind::Pair && e.kids.size() == 2, "product value must be a pair");
      return "(" + print_el_leaf(f->lhs, e.kids[0], leaf) + "," +
             print_el_leaf(f->rhs, e.kids[1], leaf) + ")";
    }
    case FKind::Exp: {
      detail::expect(e.kind == EKind::Table && e.kids.size() == f->param.size(),
                     "power value must be a table over the exponent");
      std::string s = "[";
      for (Index i = 0; i < e.kids.size(); ++i) {
        if (i) s += ", ";
        s += f->param.label(i) + ": " + print_el_leaf(f->lhs, e.kids[i], leaf);
      }
      return s + "]";
    }
    case FKind::Low:
    case FKind::Up: {
      detail::expect(e.kind == (f->kind == FKind::Low ? EKind::LowSet : EKind::UpSet),
                     "generated-set value does not match low/up constructor");
      std::string s = "{";
      for (Index i = 0; i < e.kids.size(); ++i) {
        if (i) s += ", ";
        s += print_el_leaf(f->lhs, e.kids[i], leaf);
      }
      return s + "}";
    }
    case FKind::Dual: throw TypeError("element: normalize dual constructors away first");
  }
  throw InvariantError("print_el: unreachable");
}

inline std::string print_el(const FunctorPtr& f, const FinPoset& x, const Element& e) {
  return print_el_leaf(f, e, poset_leaves(x));
}

/// Structural order on element trees; `leaf(i, j)` compares an id-leaf of the
/// left element against one of the right (the two sides may index different
/// leaf spaces, e.g. when comparing formulas with distinct supports).
inline bool element_leq_leaf(const FunctorPtr& f, const Element& a, const Element& b,
                             const std::function<bool(Index, Index)>& leaf) {
  switch (f->kind) {
    case FKind::Const: return f->param.leq(a.pt, b.pt);
    case FKind::Id: return leaf(a.pt, b.pt);
    case FKind::Sum:
      if (a.kind != b.kind) return false;
      return element_leq_leaf(a.kind == EKind::InL ? f->lhs : f->rhs, a.kids[0], b.kids[0], leaf);
    case FKind::Prod:
      return element_leq_leaf(f->lhs, a.kids[0], b.kids[0], leaf) &&
             element_leq_leaf(f->rhs, a.kids[1], b.kids[1], leaf);
    case FKind::Exp:
      for (Index i = 0; i < f->param.size(); ++i)
        if (!element_leq_leaf(f->lhs, a.kids[i], b.kids[i], leaf)) return false;
      return true;
    case FKind::Low: // down-closures ordered by inclusion
      for (const Element& ga : a.kids) {
        bool dominated = false;
        for (const Element& gb : b.kids)
          if (element_leq_leaf(f->lhs, ga, gb, leaf)) { dominated = true; break; }
        if (!dominated) return false;
      }
      return true;
    case FKind::Up: // up-closures ordered by reverse inclusion
      for (const Element& gb : b.kids) {
        bool dominated = false;
        for (const Element& ga : a.kids)
          if (element_leq_leaf(f->lhs, ga, gb, leaf)) { dominated = true; break; }
        if (!dominated) return false;
      }
      return true;
    case FKind::Dual: throw TypeError("element: normalize dual constructors away first");
  }
  throw InvariantError("element_leq: unreachable");
}

inline bool element_leq(const FunctorPtr& f, const FinPoset& x, const Element& a,
                        const Element& b) {
  return element_leq_leaf(f, a, b, [&x](Index i, Index j) { return x.leq(i, j); });
}

/// Canonical form: validates the shape against the functor, reduces generator
/// lists to the defining antichain (maximal for low, minimal for up), sorts
/// them by print, and checks table monotonicity.  Throws TypeError on
/// malformed input.
inline Element canon_el_leaf(const FunctorPtr& f, Element e, const LeafOps& leaf) {
  auto rec_leq = [&leaf](const FunctorPtr& g, const Element& a, const Element& b) {
    return element_leq_leaf(g, a, b, leaf.leq);
  };
  switch (f->kind) {
    case FKind::Const:
      detail::expect(e.kind == EKind::Point && e.kids.empty(), "constant value must be a point");
      detail::expect(e.pt < f->param.size(), "constant point out of range");
      return e;
    case FKind::Id:
      detail::expect(e.kind == EKind::Point && e.kids.empty(), "id value must be a point");
      return e;
    case FKind::Sum:
      detail::expect((e.kind == EKind::InL || e.kind == EKind::InR) && e.kids.size() == 1,
                     "sum value must be inl or inr");
      e.kids[0] = canon_el_leaf(e.kind == EKind::InL ? f->lhs : f->rhs, std::move(e.kids[0]), leaf);
      return e;
    case FKind::Prod:
      detail::expect(e.kind == EKind::Pair && e.kids.size() == 2, "product value must be a pair");
      e.kids[0] = canon_el_leaf(f->lhs, std::move(e.kids[0]), leaf);
      e.kids[1] = canon_el_leaf(f->rhs, std::move(e.kids[1]), leaf);
      return e;
    case FKind::Exp: {
      detail::expect(e.kind == EKind::Table && e.kids.size() == f->param.size(),
                     "power value must be a table over the exponent");
      for (Element& cell : e.kids) cell = canon_el_leaf(f->lhs, std::move(cell), leaf);
      for (Index i = 0; i < f->param.size(); ++i)
        for (Index j = 0; j < f->param.size(); ++j)
          if (f->param.leq(i, j))
            detail::expect(rec_leq(f->lhs, e.kids[i], e.kids[j]), "table is not monotone");
      return e;
    }
    case FKind::Low:
    case FKind::Up: {
      const bool low = f->kind == FKind::Low;
      detail::expect(e.kind == (low ? EKind::LowSet : EKind::UpSet),
                     "generated-set value does not match low/up constructor");
      std::vector<Element> gens;
      for (Element& g : e.kids) gens.push_back(canon_el_leaf(f->lhs, std::move(g), leaf));
      // drop generators subsumed by another (equal ones: keep first occurrence)
      std::vector<bool> dropped(gens.size(), false);
      for (Index i = 0; i < gens.size(); ++i)
        for (Index j = 0; j < gens.size() && !dropped[i]; ++j) {
          if (i == j || dropped[j]) continue;
          const bool i_below = rec_leq(f->lhs, gens[i], gens[j]);
          const bool j_below = rec_leq(f->lhs, gens[j], gens[i]);
          if (i_below && j_below) dropped[i] = i > j; // duplicates
          else if (low ? i_below : j_below) dropped[i] = true;
        }
      std::vector<std::pair<std::string, Element>> keyed;
      for (Index i = 0; i < gens.size(); ++i)
        if (!dropped[i]) keyed.emplace_back(print_el_leaf(f->lhs, gens[i], leaf), gens[i]);
      std::sort(keyed.begin(), keyed.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      e.kids.clear();
      for (auto& [k, g] : keyed) e.kids.push_back(std::move(g));
      return e;
    }
    case FKind::Dual: throw TypeError("element: normalize dual constructors away first");
  }
  throw InvariantError("canon_el: unreachable");
}

inline Element canon_el(const FunctorPtr& f, const FinPoset& x, Element e) {
  return canon_el_leaf(f, std::move(e), poset_leaves(x));
}

/// All antichains of a poset (as sorted index sets, empty one included),
/// enumerated deterministically.
inline std::vector<IndexSet> antichains(const FinPoset& p, std::size_t cap) {
  std::vector<IndexSet> out;
  IndexSet cur;
  auto rec = [&](auto&& self, Index next) -> void {
    out.push_back(cur);
    if (out.size() > cap) throw CapacityError("antichains: more than cap antichains");
    for (Index j = next; j < p.size(); ++j) {
      bool ok = true;
      for (Index i : cur)
        if (p.leq(i, j) || p.leq(j, i)) { ok = false; break; }
      if (!ok) continue;
      cur.push_back(j);
      self(self, j + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0);
  return out;
}

/// A functor applied to a poset: the carrier poset (labelled by canonical
/// prints) together with the canonical element for each index.
struct EnumObj {
  FinPoset poset;
  std::vector<Element> elems;
};

constexpr std::size_t kElemCap = 4096;

/// Evaluates a dual-free functor on a poset by exhaustive enumeration.
/// Throws CapacityError when the carrier would exceed `cap` elements.
inline EnumObj apply_obj(const FunctorPtr& f, const FinPoset& x, std::size_t cap = kElemCap) {
  std::vector<Element> elems;
  switch (f->kind) {
    case FKind::Const:
      for (Index i = 0; i < f->param.size(); ++i) elems.push_back(Element::point(i));
      break;
    case FKind::Id:
      for (Index i = 0; i < x.size(); ++i) elems.push_back(Element::point(i));
      break;
    case FKind::Sum: {
      EnumObj a = apply_obj(f->lhs, x, cap), b = apply_obj(f->rhs, x, cap);
      for (Element& e : a.elems) elems.push_back(Element::inl(std::move(e)));
      for (Element& e : b.elems) elems.push_back(Element::inr(std::move(e)));
      break;
    }
    case FKind::Prod: {
      EnumObj a = apply_obj(f->lhs, x, cap), b = apply_obj(f->rhs, x, cap);
      if (!b.elems.empty() && a.elems.size() > cap / b.elems.size() + 1)
        throw CapacityError("apply_obj: product carrier exceeds cap");
      for (const Element& ea : a.elems)
        for (const Element& eb : b.elems) elems.push_back(Element::pair(ea, eb));
      break;
    }
    case FKind::Exp: {
      EnumObj sub = apply_obj(f->lhs, x, cap);
      HomPoset hp = hom_poset(f->param, sub.poset, cap);
      for (const auto& m : hp.maps) {
        std::vector<Element> cells;
        cells.reserve(m.size());
        for (Index v : m) cells.push_back(sub.elems[v]);
        elems.push_back(Element::table(std::move(cells)));
      }
      break;
    }
    case FKind::Low:
    case FKind::Up: {
      EnumObj sub = apply_obj(f->lhs, x, cap);
      for (const IndexSet& a : antichains(sub.poset, cap)) {
        std::vector<Element> gens;
        gens.reserve(a.size());
        for (Index i : a) gens.push_back(sub.elems[i]);
        elems.push_back(f->kind == FKind::Low ? Element::lowset(std::move(gens))
                                              : Element::upset(std::move(gens)));
      }
      break;
    }
    case FKind::Dual: throw TypeError("apply_obj: normalize dual constructors away first");
  }
  if (elems.size() > cap) throw CapacityError("apply_obj: carrier exceeds cap");
  std::vector<std::string> labels;
  labels.reserve(elems.size());
  for (Element& e : elems) {
    e = canon_el(f, x, std::move(e)); // sorts generator lists
    labels.push_back(print_el(f, x, e));
  }
  const std::size_t n = elems.size();
  std::vector<std::vector<bool>> table(n, std::vector<bool>(n, false));
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) table[i][j] = element_leq(f, x, elems[i], elems[j]);
  return EnumObj{FinPoset::from_closed_table(std::move(labels), std::move(table)),
                 std::move(elems)};
}

/// Index of a canonical element inside an enumerated carrier.
inline Index index_in(const EnumObj& obj, const FunctorPtr& f, const FinPoset& x,
                      const Element& e) {
  return obj.poset.index_of(print_el(f, x, e));
}

/// Functorial action on a monotone map: rewrites id-leaves through the map
/// and re-canonicalises (generator antichains can collapse).
inline Element apply_map(const FunctorPtr& f, const MonotoneMap& m, const Element& e) {
  auto rec = [&m](auto&& self, const FunctorPtr& g, const Element& v) -> Element {
    switch (g->kind) {
      case FKind::Const: return v;
      case FKind::Id: return Element::point(m(v.pt));
      case FKind::Sum: {
        Element kid = self(self, v.kind == EKind::InL ? g->lhs : g->rhs, v.kids[0]);
        return v.kind == EKind::InL ? Element::inl(std::move(kid)) : Element::inr(std::move(kid));
      }
      case FKind::Prod:
        return Element::pair(self(self, g->lhs, v.kids[0]), self(self, g->rhs, v.kids[1]));
      case FKind::Exp: {
        std::vector<Element> cells;
        cells.reserve(v.kids.size());
        for (const Element& c : v.kids) cells.push_back(self(self, g->lhs, c));
        return Element::table(std::move(cells));
      }
      case FKind::Low:
      case FKind::Up: {
        std::vector<Element> gens;
        gens.reserve(v.kids.size());
        for (const Element& c : v.kids) gens.push_back(self(self, g->lhs, c));
        return g->kind == FKind::Low ? Element::lowset(std::move(gens))
                                     : Element::upset(std::move(gens));
      }
      case FKind::Dual: throw TypeError("apply_map: normalize dual constructors away first");
    }
    throw InvariantError("apply_map: unreachable");
  };
  return canon_el(f, m.cod(), rec(rec, f, e));
}

/// Transports an element of F(X) to one of F-dual(X^op): swaps lowersets with
/// uppersets throughout.  Antichains and print keys are order-reversal
/// invariant, so the result is canonical for the dualised functor.
inline Element dual_el(const FunctorPtr& f, const Element& e) {
  switch (f->kind) {
    case FKind::Const:
    case FKind::Id: return e;
    case FKind::Sum: {
      Element kid = dual_el(e.kind == EKind::InL ? f->lhs : f->rhs, e.kids[0]);
      return e.kind == EKind::InL ? Element::inl(std::move(kid)) : Element::inr(std::move(kid));
    }
    case FKind::Prod: return Element::pair(dual_el(f->lhs, e.kids[0]), dual_el(f->rhs, e.kids[1]));
    case FKind::Exp: {
      std::vector<Element> cells;
      cells.reserve(e.kids.size());
      for (const Element& c : e.kids) cells.push_back(dual_el(f->lhs, c));
      return Element::table(std::move(cells));
    }
    case FKind::Low:
    case FKind::Up: {
      std::vector<Element> gens;
      gens.reserve(e.kids.size());
      for (const Element& c : e.kids) gens.push_back(dual_el(f->lhs, c));
      return f->kind == FKind::Low ? Element::upset(std::move(gens))
                                   : Element::lowset(std::move(gens));
    }
    case FKind::Dual: throw TypeError("dual_el: normalize dual constructors away first");
  }
  throw InvariantError("dual_el: unreachable");
}

/// Re-indexes id-leaves of an element of F(X) into the sub-poset spanned by
/// `m` (sorted).  Throws TypeError when some leaf lies outside `m`.
inline Element restrict_el(const FunctorPtr& f, const FinPoset& x, const Element& e, const IndexSet& m) {
  auto pos = [&m, &x](Index v) -> Index {
    auto it = std::lower_bound(m.begin(), m.end(), v);
    if (it == m.end() || *it != v)
      throw TypeError("restrict_el: leaf '" + x.label(v) + "' outside the sub-poset");
    return static_cast<Index>(it - m.begin());
  };
  auto rec = [&pos](auto&& self, const FunctorPtr& g, const Element& v) -> Element {
    switch (g->kind) {
      case FKind::Const: return v;
      case FKind::Id: return Element::point(pos(v.pt));
      case FKind::Sum: {
        Element kid = self(self, v.kind == EKind::InL ? g->lhs : g->rhs, v.kids[0]);
        return v.kind == EKind::InL ? Element::inl(std::move(kid)) : Element::inr(std::move(kid));
      }
      case FKind::Prod:
        return Element::pair(self(self, g->lhs, v.kids[0]), self(self, g->rhs, v.kids[1]));
      case FKind::Exp:
      case FKind::Low:
      case FKind::Up: {
        std::vector<Element> kids;
        kids.reserve(v.kids.size());
        for (const Element& c : v.kids) kids.push_back(self(self, g->lhs, c));
        Element out;
        out.kind = v.kind;
        out.kids = std::move(kids);
        return out;
      }
      case FKind::Dual: throw TypeError("restrict_el: normalize dual constructors away first");
    }
    throw InvariantError("restrict_el: unreachable");
  };
  return rec(rec, f, e);
}

/// Inverse of restrict_el: pushes an element of F(sub_poset(x, m)) forward
/// along the inclusion into F(X).
inline Element embed_el(const FunctorPtr& f, const FinPoset& x, const Element& e, const IndexSet& m) {
  return apply_map(f, inclusion(x, m), e);
}

} // namespace moss
