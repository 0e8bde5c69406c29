#pragma once

/**
 * @file calculus.hpp
 * @brief Sequent calculus for the nabla/delta logic: unfolding families,
 *        redistributions, a terminating prover with proof trees and
 *        countermodels, and an independent proof checker.
 *
 * A sequent  G => D  reads "the conjunction of G entails the disjunction of
 * D" over all models for the fixed signature.  The proof search is
 * deterministic:
 *
 *   1. axiom         some a in G, b in D with a <= b;
 *   2. and-l / or-l / and-r / or-r   unfold the first connective found;
 *   3. delta-l       replace a left delta by nabla-of-conjunctions, one
 *                    premise per member of the family L(beta);
 *   4. nabla-r       replace a right nabla by delta-of-disjunctions, one
 *                    premise per member of the family R(alpha);
 *   5. nabla-delta   on a reduced sequent  nablas => deltas  (atoms first
 *                    weakened away): provable iff every redistribution has a
 *                    base point whose component sequent is provable.
 *
 * Termination is by the lexicographic measure (modal depth, weighted size):
 * every recursive step decreases it, and the prover asserts as much.
 *
 * Step 5 is decided without enumerating redistributions: a redistribution
 * supported entirely by refutable component sequents exists iff a constrained
 * element over the refutable sub-poset exists, which `exists_elem` decides
 * structurally (and produces, feeding countermodel extraction).
 */

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moss/base.hpp"
#include "moss/element.hpp"
#include "moss/errors.hpp"
#include "moss/functor.hpp"
#include "moss/lifting.hpp"
#include "moss/logic.hpp"
#include "moss/model.hpp"
#include "moss/poset.hpp"
#include "moss/relation.hpp"

namespace moss {

// ---------------------------------------------------------------------------
// sequents

/// The left side reads as a conjunction, the right side as a disjunction.
/// Canonical sequents keep the left a minimal antichain and the right a
/// maximal one, each sorted by print.
struct Sequent {
  std::vector<FormulaId> lhs, rhs;
};

inline Sequent canon_seq(const FormulaArena& a, std::vector<FormulaId> lhs,
                         std::vector<FormulaId> rhs) {
  lhs = a.minimal_antichain(std::move(lhs));
  rhs = a.maximal_antichain(std::move(rhs));
  auto by_print = [&a](FormulaId x, FormulaId y) { return a.print(x) < a.print(y); };
  std::sort(lhs.begin(), lhs.end(), by_print);
  std::sort(rhs.begin(), rhs.end(), by_print);
  return {std::move(lhs), std::move(rhs)};
}

inline std::string print_seq(const FormulaArena& a, const Sequent& s) {
  std::string out;
  for (Index i = 0; i < s.lhs.size(); ++i) {
    if (i) out += ", ";
    out += a.print(s.lhs[i]);
  }
  out += out.empty() ? "=>" : " =>";
  for (Index i = 0; i < s.rhs.size(); ++i) {
    out += i ? ", " : " ";
    out += a.print(s.rhs[i]);
  }
  return out;
}

/// Termination measure (lexicographic): maximal modal depth, then the
/// weighted size with side-dependent connective weights.
using Measure = std::pair<std::size_t, std::size_t>;

inline Measure seq_measure(const FormulaArena& a, const Sequent& s) {
  std::size_t d = 0, k = 0;
  for (FormulaId f : s.lhs) {
    d = std::max(d, a.depth(f));
    k += a.weight_l(f);
  }
  for (FormulaId f : s.rhs) {
    d = std::max(d, a.depth(f));
    k += a.weight_r(f);
  }
  return {d, k};
}

inline bool is_axiom(const FormulaArena& a, const Sequent& s) {
  for (FormulaId l : s.lhs)
    for (FormulaId r : s.rhs)
      if (a.leq(l, r)) return true;
  return false;
}

/// Search-time axiom: an atomic formula on the left entails an atomic formula
/// on the right. Proof search closes only these directly; ordered pairs of
/// compound formulas are derived through the junction and unfolding rules
/// instead, so traces expose the modal structure. The proof checker accepts
/// the general side condition (see `is_axiom`), which is sound for any
/// entailment-ordered pair.
inline bool is_atomic_axiom(const FormulaArena& a, const Sequent& s) {
  for (FormulaId l : s.lhs)
    for (FormulaId r : s.rhs)
      if (a.node(l).kind == FormKind::Atom && a.node(r).kind == FormKind::Atom &&
          a.leq(l, r))
        return true;
  return false;
}

// ---------------------------------------------------------------------------
// unfolding families

/// The family attached to one modal formula: `members` are elements over the
/// lower/upper-set carrier of its support, `formulas` the corresponding
/// unfoldings (delta-of-disjunctions for a nabla, nabla-of-conjunctions for
/// a delta).
struct Family {
  EnumObj carrier;               ///< candidate carrier the members came from
  std::vector<Element> members;  ///< elements passing the membership test
  std::vector<FormulaId> formulas;
};

namespace detail {
inline MonotoneMap formula_map(FormulaArena& a, const FinPoset& dom,
                               const std::vector<FormulaId>& imgs, SupportPoset& sp) {
  sp = a.support_poset(imgs);
  std::vector<Index> img(imgs.size());
  for (Index i = 0; i < imgs.size(); ++i)
    img[i] = std::lower_bound(sp.ids.begin(), sp.ids.end(), imgs[i]) - sp.ids.begin();
  try {
    return MonotoneMap(dom, sp.poset, std::move(img));
  } catch (const TypeError& e) {
    throw InvariantError(std::string("calculus: unfolding map is not monotone: ") + e.what());
  }
}
} // namespace detail

/// Family R(alpha) of a nabla formula: all elements over the lowerset carrier
/// of the support that fail the lifted non-membership test against the
/// payload.  Its formulas are delta applied to pointwise disjunctions.
inline Family r_alpha(FormulaArena& a, FormulaId f, std::size_t cap = kElemCap) {
  Formula n = a.node(f); // copy: the arena grows below
  if (n.kind != FormKind::Nabla) throw TypeError("r_alpha: expected a nabla formula");
  SupportPoset v = a.support_poset(n.support);
  EnumObj lv = apply_obj(FunctorExpr::low(FunctorExpr::identity()), v.poset, cap);
  MonotoneRel nm = not_mem_rel(v.poset, lv);
  std::vector<FormulaId> disjs;
  disjs.reserve(lv.elems.size());
  for (const Element& l : lv.elems) {
    std::vector<FormulaId> ids;
    for (const Element& g : l.kids) ids.push_back(v.ids[g.pt]);
    disjs.push_back(a.disj(std::move(ids)));
  }
  SupportPoset sp;
  MonotoneMap dmap = detail::formula_map(a, lv.poset, disjs, sp);
  Family out{apply_obj(a.td(), lv.poset, cap), {}, {}};
  auto rel = [&nm](Index l, Index x) { return nm.holds(l, x); };
  for (const Element& psi : out.carrier.elems)
    if (!lift_holds(a.td(), rel, psi, n.payload)) {
      out.members.push_back(psi);
      out.formulas.push_back(a.delta(apply_map(a.td(), dmap, psi), sp.ids));
    }
  return out;
}

/// Family L(beta) of a delta formula: all elements over the upperset carrier
/// of the support that fail the lifted non-co-membership test against the
/// payload.  Its formulas are nabla applied to pointwise conjunctions.
inline Family l_beta(FormulaArena& a, FormulaId f, std::size_t cap = kElemCap) {
  Formula n = a.node(f); // copy: the arena grows below
  if (n.kind != FormKind::Delta) throw TypeError("l_beta: expected a delta formula");
  SupportPoset w = a.support_poset(n.support);
  EnumObj uw = apply_obj(FunctorExpr::up(FunctorExpr::identity()), w.poset, cap);
  MonotoneRel nn = not_ni_rel(w.poset, uw);
  std::vector<FormulaId> conjs;
  conjs.reserve(uw.elems.size());
  for (const Element& u : uw.elems) {
    std::vector<FormulaId> ids;
    for (const Element& g : u.kids) ids.push_back(w.ids[g.pt]);
    conjs.push_back(a.conj(std::move(ids)));
  }
  SupportPoset sp;
  MonotoneMap cmap = detail::formula_map(a, uw.poset, conjs, sp);
  Family out{apply_obj(a.td(), uw.poset, cap), {}, {}};
  auto rel = [&nn](Index x, Index u) { return nn.holds(x, u); };
  for (const Element& phi : out.carrier.elems)
    if (!lift_holds(a.td(), rel, n.payload, phi)) {
      out.members.push_back(phi);
      out.formulas.push_back(a.nabla(apply_map(a.td(), cmap, phi), sp.ids));
    }
  return out;
}

// ---------------------------------------------------------------------------
// redistributions

/// Shared context of one nabla-delta step: V and W are the unions of the
/// left resp. right supports, the product carrier pairs uppersets of V with
/// lowersets of W, and the payloads are re-indexed into V resp. W.
struct NdContext {
  SupportPoset v, w;
  EnumObj uv, lw;
  FinPoset p;        ///< product of the carriers of uv and lw
  MonotoneMap p0, p1;
  std::vector<Element> alphas, betas;
  MonotoneRel ni;    ///< V  -/-> U(V), co-membership
  MonotoneRel mem;   ///< L(W) -/-> W, membership
};

inline NdContext nd_context(FormulaArena& a, const std::vector<FormulaId>& nablas,
                            const std::vector<FormulaId>& deltas, std::size_t cap = kElemCap) {
  std::vector<FormulaId> vids, wids;
  for (FormulaId f : nablas) {
    Formula n = a.node(f);
    if (n.kind != FormKind::Nabla) throw TypeError("nd_context: left formulas must be nablas");
    vids.insert(vids.end(), n.support.begin(), n.support.end());
  }
  for (FormulaId f : deltas) {
    Formula n = a.node(f);
    if (n.kind != FormKind::Delta) throw TypeError("nd_context: right formulas must be deltas");
    wids.insert(wids.end(), n.support.begin(), n.support.end());
  }
  SupportPoset v = a.support_poset(std::move(vids));
  SupportPoset w = a.support_poset(std::move(wids));
  EnumObj uv = apply_obj(FunctorExpr::up(FunctorExpr::identity()), v.poset, cap);
  EnumObj lw = apply_obj(FunctorExpr::low(FunctorExpr::identity()), w.poset, cap);
  FinPoset p = product(uv.poset, lw.poset);
  std::size_t nl = lw.poset.size();
  std::vector<Index> i0(p.size()), i1(p.size());
  for (Index z = 0; z < p.size(); ++z) {
    i0[z] = z / nl;
    i1[z] = z % nl;
  }
  MonotoneMap p0(p, uv.poset, std::move(i0));
  MonotoneMap p1(p, lw.poset, std::move(i1));
  auto embed_into = [&a](FormulaId f, const SupportPoset& tgt) {
    Formula n = a.node(f);
    SupportPoset own = a.support_poset(n.support);
    std::vector<Index> img(own.ids.size());
    for (Index i = 0; i < own.ids.size(); ++i)
      img[i] = std::lower_bound(tgt.ids.begin(), tgt.ids.end(), own.ids[i]) - tgt.ids.begin();
    return apply_map(a.td(), MonotoneMap(own.poset, tgt.poset, std::move(img)), n.payload);
  };
  std::vector<Element> alphas, betas;
  for (FormulaId f : nablas) alphas.push_back(embed_into(f, v));
  for (FormulaId f : deltas) betas.push_back(embed_into(f, w));
  MonotoneRel ni = ni_rel(v.poset, uv);
  MonotoneRel mem = mem_rel(w.poset, lw);
  return NdContext{std::move(v),  std::move(w),      std::move(uv),    std::move(lw),
                   std::move(p),  std::move(p0),     std::move(p1),    std::move(alphas),
                   std::move(betas), std::move(ni),  std::move(mem)};
}

/// Component sequent of one product point: conjunction of the upperset's
/// generators entails disjunction of the lowerset's generators.
inline Sequent nd_premise(FormulaArena& a, const NdContext& c, Index z) {
  const Element& u = c.uv.elems[z / c.lw.poset.size()];
  const Element& l = c.lw.elems[z % c.lw.poset.size()];
  std::vector<FormulaId> us, ls;
  for (const Element& g : u.kids) us.push_back(c.v.ids[g.pt]);
  for (const Element& g : l.kids) ls.push_back(c.w.ids[g.pt]);
  FormulaId cf = a.conj(std::move(us));
  FormulaId df = a.disj(std::move(ls));
  return canon_seq(a, {cf}, {df});
}

/// Membership test for a candidate over the product carrier: its left
/// projection lift-covers every alpha and every beta lift-covers its right
/// projection.
inline bool rd_member(const FormulaArena& a, const NdContext& c, const Element& phi) {
  Element b0 = apply_map(a.td(), c.p0, phi);
  Element b1 = apply_map(a.td(), c.p1, phi);
  auto nif = [&c](Index u, Index x) { return c.ni.holds(u, x); };
  auto memf = [&c](Index x, Index l) { return c.mem.holds(x, l); };
  for (const Element& alpha : c.alphas)
    if (!lift_holds(a.td(), nif, b0, alpha)) return false;
  for (const Element& beta : c.betas)
    if (!lift_holds(a.td(), memf, beta, b1)) return false;
  return true;
}

/// All redistributions, by enumerate-and-filter over the product carrier.
inline std::vector<Element> redistributions(const FormulaArena& a, const NdContext& c,
                                            std::size_t cap = kElemCap) {
  std::vector<Element> out;
  for (const Element& e : apply_obj(a.td(), c.p, cap).elems)
    if (rd_member(a, c, e)) out.push_back(e);
  return out;
}

// ---------------------------------------------------------------------------
// constrained element search

/// One lifting constraint against a fixed element; `rel` is consulted at
/// id-leaves in the same argument order as lift_holds uses.
struct LiftConstraint {
  const Element* fixed;
  std::function<bool(Index, Index)> rel;
};

/// Searches F(C) for an element that is lift-below every `beta_side`
/// constraint (candidate on the target side) and lift-above every
/// `alpha_side` one (candidate on the source side).  Works structurally:
/// products split, sums branch, generator sets are assembled one witness per
/// covering demand, with choices expanded for the eligibility side.
/// Exponents fall back to enumeration of the cell carrier (capped).
inline std::optional<Element> exists_elem(const FunctorPtr& f, const FinPoset& c,
                                          const std::vector<LiftConstraint>& beta_side,
                                          const std::vector<LiftConstraint>& alpha_side,
                                          std::size_t cap = kElemCap) {
  switch (f->kind) {
    case FKind::Const: {
      for (Index pt = 0; pt < f->param.size(); ++pt) {
        bool ok = true;
        for (const LiftConstraint& b : beta_side) ok = ok && f->param.leq(pt, b.fixed->pt);
        for (const LiftConstraint& a : alpha_side) ok = ok && f->param.leq(a.fixed->pt, pt);
        if (ok) return Element::point(pt);
      }
      return std::nullopt;
    }
    case FKind::Id: {
      for (Index z = 0; z < c.size(); ++z) {
        bool ok = true;
        for (const LiftConstraint& b : beta_side) ok = ok && b.rel(z, b.fixed->pt);
        for (const LiftConstraint& a : alpha_side) ok = ok && a.rel(a.fixed->pt, z);
        if (ok) return Element::point(z);
      }
      return std::nullopt;
    }
    case FKind::Sum: {
      for (int side = 0; side < 2; ++side) {
        EKind tag = side == 0 ? EKind::InL : EKind::InR;
        bool feasible = true;
        std::vector<LiftConstraint> bs, as;
        for (const LiftConstraint& b : beta_side) {
          feasible = feasible && b.fixed->kind == tag;
          if (feasible) bs.push_back({&b.fixed->kids[0], b.rel});
        }
        for (const LiftConstraint& a : alpha_side) {
          feasible = feasible && a.fixed->kind == tag;
          if (feasible) as.push_back({&a.fixed->kids[0], a.rel});
        }
        if (!feasible) continue;
        if (auto kid = exists_elem(side == 0 ? f->lhs : f->rhs, c, bs, as, cap))
          return side == 0 ? Element::inl(std::move(*kid)) : Element::inr(std::move(*kid));
      }
      return std::nullopt;
    }
    case FKind::Prod: {
      std::vector<LiftConstraint> bs0, as0, bs1, as1;
      for (const LiftConstraint& b : beta_side) {
        bs0.push_back({&b.fixed->kids[0], b.rel});
        bs1.push_back({&b.fixed->kids[1], b.rel});
      }
      for (const LiftConstraint& a : alpha_side) {
        as0.push_back({&a.fixed->kids[0], a.rel});
        as1.push_back({&a.fixed->kids[1], a.rel});
      }
      auto k0 = exists_elem(f->lhs, c, bs0, as0, cap);
      if (!k0) return std::nullopt;
      auto k1 = exists_elem(f->rhs, c, bs1, as1, cap);
      if (!k1) return std::nullopt;
      return Element::pair(std::move(*k0), std::move(*k1));
    }
    case FKind::Exp: {
      // cells are coupled by table monotonicity; enumerate the whole carrier
      for (const Element& e : apply_obj(f, c, cap).elems) {
        bool ok = true;
        for (const LiftConstraint& b : beta_side)
          ok = ok && lift_holds(f, b.rel, e, *b.fixed);
        for (const LiftConstraint& a : alpha_side)
          ok = ok && lift_holds(f, a.rel, *a.fixed, e);
        if (ok) return e;
      }
      return std::nullopt;
    }
    case FKind::Low:
    case FKind::Up: {
      const bool low = f->kind == FKind::Low;
      // covering demands come from the fixed generators on the far side;
      // each chosen witness must additionally be eligible for every
      // constraint on the near side, expanding the generator choice.
      const std::vector<LiftConstraint>& demand_src = low ? alpha_side : beta_side;
      const std::vector<LiftConstraint>& elig_src = low ? beta_side : alpha_side;
      auto solve_gen = [&](const LiftConstraint& demand,
                           const Element& dgen) -> std::optional<Element> {
        for (const LiftConstraint& e : elig_src)
          if (e.fixed->kids.empty()) return std::nullopt; // nothing to pair with
        std::vector<Index> pick(elig_src.size(), 0);
        for (;;) {
          std::vector<LiftConstraint> bs, as;
          for (Index i = 0; i < elig_src.size(); ++i) {
            const Element& choice = elig_src[i].fixed->kids[pick[i]];
            if (low)
              bs.push_back({&choice, elig_src[i].rel}); // witness below the choice
            else
              as.push_back({&choice, elig_src[i].rel}); // witness above the choice
          }
          if (low)
            as.push_back({&dgen, demand.rel}); // witness covers the demand
          else
            bs.push_back({&dgen, demand.rel});
          if (auto w = exists_elem(f->lhs, c, bs, as, cap)) return w;
          // odometer over eligibility choices
          Index i = 0;
          while (i < pick.size() && ++pick[i] == elig_src[i].fixed->kids.size()) {
            pick[i] = 0;
            ++i;
          }
          if (i == pick.size()) return std::nullopt;
        }
      };
      std::vector<Element> gens;
      for (const LiftConstraint& d : demand_src)
        for (const Element& dgen : d.fixed->kids) {
          auto w = solve_gen(d, dgen);
          if (!w) return std::nullopt;
          gens.push_back(std::move(*w));
        }
      Element raw = low ? Element::lowset(std::move(gens)) : Element::upset(std::move(gens));
      return canon_el(f, c, std::move(raw));
    }
    case FKind::Dual: throw TypeError("exists_elem: normalize dual constructors away first");
  }
  throw InvariantError("exists_elem: unreachable");
}

// ---------------------------------------------------------------------------
// proofs and countermodels

enum class RuleTag { Ax, Weaken, AndL, AndR, OrL, OrR, DeltaL, NablaR, NablaDelta };

inline const char* rule_name(RuleTag r) {
  switch (r) {
    case RuleTag::Ax: return "ax";
    case RuleTag::Weaken: return "weaken";
    case RuleTag::AndL: return "and-l";
    case RuleTag::AndR: return "and-r";
    case RuleTag::OrL: return "or-l";
    case RuleTag::OrR: return "or-r";
    case RuleTag::DeltaL: return "delta-l";
    case RuleTag::NablaR: return "nabla-r";
    case RuleTag::NablaDelta: return "nabla-delta";
  }
  return "?";
}

struct ProofNode {
  Sequent seq;
  RuleTag rule = RuleTag::Ax;
  FormulaId principal = 0; ///< meaningful for the unfolding rules only
  std::vector<ProofNode> premises;
};

struct Countermodel {
  Model model;
  Index witness;
};

/// Deterministic proof search with memoised verdicts.  `proof` materialises
/// a proof tree for provable sequents; `countermodel` extracts a refuting
/// model (verified against the evaluator before being returned).
class Prover {
public:
  explicit Prover(FormulaArena& a, std::size_t cap = kElemCap) : a_(a), cap_(cap) {}

  bool provable(const Sequent& s) {
    return decide(canon_seq(a_, s.lhs, s.rhs), std::nullopt);
  }

  ProofNode proof(const Sequent& s) {
    Sequent c = canon_seq(a_, s.lhs, s.rhs);
    if (!decide(c, std::nullopt)) throw TypeError("proof: sequent is not provable");
    return tree_node(c);
  }

  Countermodel countermodel(const Sequent& s) {
    Sequent c = canon_seq(a_, s.lhs, s.rhs);
    if (decide(c, std::nullopt)) throw TypeError("countermodel: sequent is provable");
    Countermodel cm = cm_node(c);
    verify_cm(cm, c);
    return cm;
  }

  std::size_t decided() const { return memo_.size(); }

private:
  enum class Kind { Axiom, Uniform, Atomic, Modal };

  struct App {
    Kind kind;
    RuleTag rule = RuleTag::Ax;
    FormulaId principal = 0;
    std::vector<Sequent> premises;
  };

  App analyze(const Sequent& s) {
    if (is_atomic_axiom(a_, s)) return {Kind::Axiom, RuleTag::Ax, 0, {}};
    auto with = [](std::vector<FormulaId> side, Index at, FormulaId f) {
      side.erase(side.begin() + at);
      side.push_back(f);
      return side;
    };
    auto without = [](std::vector<FormulaId> side, Index at) {
      side.erase(side.begin() + at);
      return side;
    };
    for (Index i = 0; i < s.lhs.size(); ++i) {
      Formula n = a_.node(s.lhs[i]);
      if (n.kind == FormKind::And) {
        std::vector<FormulaId> l = without(s.lhs, i);
        l.insert(l.end(), n.args.begin(), n.args.end());
        return {Kind::Uniform, RuleTag::AndL, s.lhs[i], {canon_seq(a_, l, s.rhs)}};
      }
    }
    for (Index i = 0; i < s.lhs.size(); ++i) {
      Formula n = a_.node(s.lhs[i]);
      if (n.kind == FormKind::Or) {
        App app{Kind::Uniform, RuleTag::OrL, s.lhs[i], {}};
        for (FormulaId d : n.args)
          app.premises.push_back(canon_seq(a_, with(s.lhs, i, d), s.rhs));
        return app;
      }
    }
    for (Index i = 0; i < s.rhs.size(); ++i) {
      Formula n = a_.node(s.rhs[i]);
      if (n.kind == FormKind::And) {
        App app{Kind::Uniform, RuleTag::AndR, s.rhs[i], {}};
        for (FormulaId cj : n.args)
          app.premises.push_back(canon_seq(a_, s.lhs, with(s.rhs, i, cj)));
        return app;
      }
    }
    for (Index i = 0; i < s.rhs.size(); ++i) {
      Formula n = a_.node(s.rhs[i]);
      if (n.kind == FormKind::Or) {
        std::vector<FormulaId> r = without(s.rhs, i);
        r.insert(r.end(), n.args.begin(), n.args.end());
        return {Kind::Uniform, RuleTag::OrR, s.rhs[i], {canon_seq(a_, s.lhs, r)}};
      }
    }
    for (Index i = 0; i < s.lhs.size(); ++i)
      if (a_.node(s.lhs[i]).kind == FormKind::Delta) {
        FormulaId f = s.lhs[i];
        App app{Kind::Uniform, RuleTag::DeltaL, f, {}};
        for (FormulaId nf : l_beta(a_, f, cap_).formulas)
          app.premises.push_back(canon_seq(a_, with(s.lhs, i, nf), s.rhs));
        return app;
      }
    for (Index i = 0; i < s.rhs.size(); ++i)
      if (a_.node(s.rhs[i]).kind == FormKind::Nabla) {
        FormulaId f = s.rhs[i];
        App app{Kind::Uniform, RuleTag::NablaR, f, {}};
        for (FormulaId df : r_alpha(a_, f, cap_).formulas)
          app.premises.push_back(canon_seq(a_, s.lhs, with(s.rhs, i, df)));
        return app;
      }
    bool modal = false;
    for (FormulaId f : s.lhs) modal = modal || a_.node(f).kind == FormKind::Nabla;
    for (FormulaId f : s.rhs) modal = modal || a_.node(f).kind == FormKind::Delta;
    return {modal ? Kind::Modal : Kind::Atomic, RuleTag::NablaDelta, 0, {}};
  }

  void split_modal(const Sequent& s, std::vector<FormulaId>& nablas,
                   std::vector<FormulaId>& deltas) const {
    for (FormulaId f : s.lhs)
      if (a_.node(f).kind == FormKind::Nabla) nablas.push_back(f);
    for (FormulaId f : s.rhs)
      if (a_.node(f).kind == FormKind::Delta) deltas.push_back(f);
  }

  /// Refutable component points of the product carrier, and the constraints
  /// a redistribution over them must satisfy.
  struct NdState {
    NdContext ctx;
    IndexSet bad;
  };

  NdState nd_state(const Sequent& s, const Measure& m) {
    std::vector<FormulaId> nablas, deltas;
    split_modal(s, nablas, deltas);
    NdContext ctx = nd_context(a_, nablas, deltas, cap_);
    IndexSet bad;
    for (Index z = 0; z < ctx.p.size(); ++z)
      if (!decide(nd_premise(a_, ctx, z), m)) bad.push_back(z);
    return {std::move(ctx), std::move(bad)};
  }

  std::optional<Element> nd_witness(const NdState& st) {
    const NdContext& c = st.ctx;
    FinPoset pb = sub_poset(c.p, st.bad);
    std::size_t nl = c.lw.poset.size();
    std::vector<LiftConstraint> bs, as;
    for (const Element& alpha : c.alphas)
      bs.push_back({&alpha, [&c, &st, nl](Index z, Index x) {
                      return c.ni.holds(st.bad[z] / nl, x);
                    }});
    for (const Element& beta : c.betas)
      as.push_back({&beta, [&c, &st, nl](Index x, Index z) {
                      return c.mem.holds(x, st.bad[z] % nl);
                    }});
    return exists_elem(a_.td(), pb, bs, as, cap_);
  }

  bool decide(const Sequent& s, const std::optional<Measure>& parent) {
    Measure m = seq_measure(a_, s);
    if (parent && !(m < *parent))
      throw InvariantError("calculus: termination measure failed to decrease at '" +
                           print_seq(a_, s) + "'");
    std::string key = print_seq(a_, s);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool verdict = false;
    App app = analyze(s);
    switch (app.kind) {
      case Kind::Axiom: verdict = true; break;
      case Kind::Atomic: verdict = false; break;
      case Kind::Uniform: {
        verdict = true;
        for (const Sequent& p : app.premises) verdict = decide(p, m) && verdict;
        break;
      }
      case Kind::Modal: {
        NdState st = nd_state(s, m);
        verdict = !nd_witness(st).has_value();
        break;
      }
    }
    memo_.emplace(std::move(key), verdict);
    return verdict;
  }

  ProofNode tree_node(const Sequent& s) {
    App app = analyze(s);
    switch (app.kind) {
      case Kind::Axiom: {
        for (FormulaId l : s.lhs)
          for (FormulaId r : s.rhs)
            if (a_.node(l).kind == FormKind::Atom &&
                a_.node(r).kind == FormKind::Atom && a_.leq(l, r)) {
              ProofNode core{canon_seq(a_, {l}, {r}), RuleTag::Ax, 0, {}};
              if (core.seq.lhs == s.lhs && core.seq.rhs == s.rhs) return core;
              return {s, RuleTag::Weaken, 0, {std::move(core)}};
            }
        throw InvariantError("tree: axiom without a witnessing pair");
      }
      case Kind::Atomic: throw InvariantError("tree: sequent is refutable");
      case Kind::Uniform: {
        ProofNode node{s, app.rule, app.principal, {}};
        for (const Sequent& p : app.premises) node.premises.push_back(tree_node(p));
        return node;
      }
      case Kind::Modal: {
        std::vector<FormulaId> nablas, deltas;
        split_modal(s, nablas, deltas);
        Sequent core = canon_seq(a_, nablas, deltas);
        NdContext ctx = nd_context(a_, nablas, deltas, cap_);
        ProofNode inner{core, RuleTag::NablaDelta, 0, {}};
        for (const Element& phi : redistributions(a_, ctx, cap_)) {
          bool found = false;
          for (Index z : base_of(a_.td(), phi)) {
            Sequent prem = nd_premise(a_, ctx, z);
            if (decide(prem, std::nullopt)) {
              inner.premises.push_back(tree_node(prem));
              found = true;
              break;
            }
          }
          if (!found)
            throw InvariantError("tree: redistribution without a provable component");
        }
        if (core.lhs == s.lhs && core.rhs == s.rhs) return inner;
        return {s, RuleTag::Weaken, 0, {std::move(inner)}};
      }
    }
    throw InvariantError("tree_node: unreachable");
  }

  Countermodel cm_node(const Sequent& s) {
    App app = analyze(s);
    switch (app.kind) {
      case Kind::Axiom: throw InvariantError("countermodel: sequent is provable");
      case Kind::Atomic: return atomic_cm(s);
      case Kind::Uniform: {
        for (const Sequent& p : app.premises)
          if (!decide(p, std::nullopt)) return cm_node(p);
        throw InvariantError("countermodel: no refutable premise");
      }
      case Kind::Modal: return modal_cm(s);
    }
    throw InvariantError("cm_node: unreachable");
  }

  /// One isolated state carrying exactly the up-closure of the left atoms.
  Countermodel atomic_cm(const Sequent& s) {
    FinPoset one = FinPoset::chain(1, "w");
    EnumObj t1 = apply_obj(a_.t(), one, cap_);
    if (t1.elems.empty())
      throw TypeError("countermodel: the transition functor admits no structure on one state");
    Model m(one, a_.t(), a_.atoms(), {t1.elems.front()}, atom_rows(s, 1, 0));
    return {std::move(m), 0};
  }

  std::vector<std::vector<bool>> atom_rows(const Sequent& s, std::size_t nstates,
                                           Index witness) const {
    std::vector<std::vector<bool>> val(a_.atoms().size(), std::vector<bool>(nstates, false));
    for (FormulaId f : s.lhs) {
      Formula n = a_.node(f);
      if (n.kind != FormKind::Atom) continue;
      for (Index b = 0; b < a_.atoms().size(); ++b)
        if (a_.atoms().leq(n.atom, b)) val[b][witness] = true;
    }
    return val;
  }

  Countermodel modal_cm(const Sequent& s) {
    NdState st = nd_state(s, seq_measure(a_, s));
    std::optional<Element> w0 = nd_witness(st);
    if (!w0) throw InvariantError("countermodel: refutable modal sequent without witness");
    const NdContext& ctx = st.ctx;
    Element phi = apply_map(a_.td(), inclusion(ctx.p, st.bad), *w0);
    IndexSet base = base_of(a_.td(), phi);

    // countermodels of the component sequents at the base
    std::vector<Countermodel> parts;
    for (Index z : base) {
      Sequent prem = nd_premise(a_, ctx, z);
      Countermodel cm = cm_node(prem);
      verify_cm(cm, prem);
      parts.push_back(std::move(cm));
    }

    // disjoint union of the parts plus one fresh root state
    std::vector<std::string> labels;
    std::vector<Index> offset(parts.size(), 0);
    for (Index k = 0; k < parts.size(); ++k) {
      offset[k] = labels.size();
      for (const std::string& l : parts[k].model.states.labels())
        labels.push_back("m" + std::to_string(k) + "_" + l);
    }
    Index root = labels.size();
    labels.push_back("w_root");
    std::vector<std::vector<bool>> table(labels.size(),
                                         std::vector<bool>(labels.size(), false));
    for (Index i = 0; i < labels.size(); ++i) table[i][i] = true;
    for (Index k = 0; k < parts.size(); ++k) {
      const FinPoset& sk = parts[k].model.states;
      for (Index i = 0; i < sk.size(); ++i)
        for (Index j = 0; j < sk.size(); ++j)
          table[offset[k] + i][offset[k] + j] = sk.leq(i, j);
    }
    FinPoset states = FinPoset::from_closed_table(std::move(labels), std::move(table));

    std::vector<Element> structure;
    for (Index k = 0; k < parts.size(); ++k) {
      const Model& mk = parts[k].model;
      std::vector<Index> img(mk.states.size());
      for (Index i = 0; i < mk.states.size(); ++i) img[i] = offset[k] + i;
      MonotoneMap incl(mk.states, states, std::move(img));
      for (const Element& e : mk.structure) structure.push_back(apply_map(a_.t(), incl, e));
    }

    // transition of the root: transport the witness through a discrete copy
    // of its base, then map the base points to the component witnesses
    FinPoset zd = FinPoset::discrete(index_labels("z", base.size()));
    FinPoset psub = sub_poset(ctx.p, base);
    Element phir = restrict_el(a_.td(), ctx.p, phi, base);
    std::string want = print_el(a_.td(), psub, phir);
    std::vector<Index> idimg(base.size());
    for (Index i = 0; i < base.size(); ++i) idimg[i] = i;
    MonotoneMap flatten(zd, psub, std::move(idimg));
    std::optional<Element> pre;
    for (const Element& cand : apply_obj(a_.td(), zd, cap_).elems)
      if (print_el(a_.td(), psub, apply_map(a_.td(), flatten, cand)) == want) {
        pre = cand;
        break;
      }
    if (!pre)
      throw TypeError("countermodel: the witness does not lift along the discrete base");
    std::vector<Index> himg(base.size());
    for (Index k = 0; k < base.size(); ++k) himg[k] = offset[k] + parts[k].witness;
    MonotoneMap h(zd, states.opposite(), std::move(himg));
    structure.push_back(dual_el(a_.td(), apply_map(a_.td(), h, *pre)));

    std::vector<std::vector<bool>> val = atom_rows(s, states.size(), root);
    for (Index k = 0; k < parts.size(); ++k) {
      const Model& mk = parts[k].model;
      for (Index a = 0; a < a_.atoms().size(); ++a)
        for (Index i = 0; i < mk.states.size(); ++i) val[a][offset[k] + i] = mk.val[a][i];
    }
    Model m(std::move(states), a_.t(), a_.atoms(), std::move(structure), std::move(val));
    return {std::move(m), root};
  }

  static std::vector<std::string> index_labels(const std::string& prefix, std::size_t n) {
    std::vector<std::string> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
  }

  void verify_cm(const Countermodel& cm, const Sequent& s) {
    Evaluator ev(cm.model, a_);
    for (FormulaId f : s.lhs)
      if (!ev.sat(f, cm.witness))
        throw InvariantError("countermodel: witness fails '" + a_.print(f) + "'");
    for (FormulaId f : s.rhs)
      if (ev.sat(f, cm.witness))
        throw InvariantError("countermodel: witness satisfies '" + a_.print(f) + "'");
  }

  FormulaArena& a_;
  std::size_t cap_;
  std::map<std::string, bool> memo_;
};

// ---------------------------------------------------------------------------
// proof checking

/// Validates a proof tree bottom-up against the rules, recomputing premise
/// sets.  `why` (optional) receives the first failure reason.
inline bool check_proof(FormulaArena& a, const ProofNode& n, std::size_t cap = kElemCap,
                        std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg + " at '" + print_seq(a, n.seq) + "'";
    return false;
  };
  Sequent c = canon_seq(a, n.seq.lhs, n.seq.rhs);
  if (print_seq(a, c) != print_seq(a, n.seq)) return fail("sequent is not canonical");
  auto premises_match = [&](const std::vector<Sequent>& want) {
    if (n.premises.size() != want.size()) return false;
    for (Index i = 0; i < want.size(); ++i)
      if (print_seq(a, n.premises[i].seq) != print_seq(a, want[i])) return false;
    return true;
  };
  auto check_kids = [&]() {
    for (const ProofNode& k : n.premises)
      if (!check_proof(a, k, cap, why)) return false;
    return true;
  };
  auto find_in = [&](const std::vector<FormulaId>& side, FormulaId f, FormKind kind) {
    for (Index i = 0; i < side.size(); ++i)
      if (side[i] == f && a.node(f).kind == kind) return true;
    return false;
  };
  auto replaced = [&](const std::vector<FormulaId>& side, FormulaId f,
                      std::vector<FormulaId> add) {
    std::vector<FormulaId> out;
    for (FormulaId g : side)
      if (g != f) out.push_back(g);
    out.insert(out.end(), add.begin(), add.end());
    return out;
  };
  switch (n.rule) {
    case RuleTag::Ax: {
      if (!n.premises.empty()) return fail("axiom with premises");
      if (!is_axiom(a, n.seq)) return fail("not an axiom");
      return true;
    }
    case RuleTag::Weaken: {
      if (n.premises.size() != 1) return fail("weakening needs one premise");
      const Sequent& p = n.premises[0].seq;
      auto subset = [](std::vector<FormulaId> small, std::vector<FormulaId> big) {
        std::sort(small.begin(), small.end());
        std::sort(big.begin(), big.end());
        return std::includes(big.begin(), big.end(), small.begin(), small.end());
      };
      if (!subset(p.lhs, n.seq.lhs) || !subset(p.rhs, n.seq.rhs))
        return fail("weakening premise is not a subsequent");
      return check_kids();
    }
    case RuleTag::AndL: {
      if (!find_in(n.seq.lhs, n.principal, FormKind::And)) return fail("principal not a left and");
      Sequent want = canon_seq(a, replaced(n.seq.lhs, n.principal, a.node(n.principal).args),
                               n.seq.rhs);
      if (!premises_match({want})) return fail("and-l premise mismatch");
      return check_kids();
    }
    case RuleTag::OrR: {
      if (!find_in(n.seq.rhs, n.principal, FormKind::Or)) return fail("principal not a right or");
      Sequent want = canon_seq(a, n.seq.lhs,
                               replaced(n.seq.rhs, n.principal, a.node(n.principal).args));
      if (!premises_match({want})) return fail("or-r premise mismatch");
      return check_kids();
    }
    case RuleTag::OrL: {
      if (!find_in(n.seq.lhs, n.principal, FormKind::Or)) return fail("principal not a left or");
      std::vector<Sequent> want;
      for (FormulaId d : a.node(n.principal).args)
        want.push_back(canon_seq(a, replaced(n.seq.lhs, n.principal, {d}), n.seq.rhs));
      if (!premises_match(want)) return fail("or-l premise mismatch");
      return check_kids();
    }
    case RuleTag::AndR: {
      if (!find_in(n.seq.rhs, n.principal, FormKind::And))
        return fail("principal not a right and");
      std::vector<Sequent> want;
      for (FormulaId cj : a.node(n.principal).args)
        want.push_back(canon_seq(a, n.seq.lhs, replaced(n.seq.rhs, n.principal, {cj})));
      if (!premises_match(want)) return fail("and-r premise mismatch");
      return check_kids();
    }
    case RuleTag::DeltaL: {
      if (!find_in(n.seq.lhs, n.principal, FormKind::Delta))
        return fail("principal not a left delta");
      std::vector<Sequent> want;
      for (FormulaId nf : l_beta(a, n.principal, cap).formulas)
        want.push_back(canon_seq(a, replaced(n.seq.lhs, n.principal, {nf}), n.seq.rhs));
      if (!premises_match(want)) return fail("delta-l premise mismatch");
      return check_kids();
    }
    case RuleTag::NablaR: {
      if (!find_in(n.seq.rhs, n.principal, FormKind::Nabla))
        return fail("principal not a right nabla");
      std::vector<Sequent> want;
      for (FormulaId df : r_alpha(a, n.principal, cap).formulas)
        want.push_back(canon_seq(a, n.seq.lhs, replaced(n.seq.rhs, n.principal, {df})));
      if (!premises_match(want)) return fail("nabla-r premise mismatch");
      return check_kids();
    }
    case RuleTag::NablaDelta: {
      for (FormulaId f : n.seq.lhs)
        if (a.node(f).kind != FormKind::Nabla) return fail("left side must be nablas");
      for (FormulaId f : n.seq.rhs)
        if (a.node(f).kind != FormKind::Delta) return fail("right side must be deltas");
      if (n.seq.lhs.empty() && n.seq.rhs.empty()) return fail("no modal formula");
      NdContext ctx = nd_context(a, n.seq.lhs, n.seq.rhs, cap);
      std::vector<Element> rds = redistributions(a, ctx, cap);
      if (n.premises.size() != rds.size()) return fail("one premise per redistribution");
      for (Index i = 0; i < rds.size(); ++i) {
        bool ok = false;
        for (Index z : base_of(a.td(), rds[i]))
          ok = ok || print_seq(a, n.premises[i].seq) == print_seq(a, nd_premise(a, ctx, z));
        if (!ok) return fail("premise is not a component of its redistribution");
      }
      return check_kids();
    }
  }
  return fail("unknown rule");
}

} // namespace moss
