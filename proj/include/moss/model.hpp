#pragma once

/**
 * @file model.hpp
 * @brief Ordered coalgebras with valuations, and formula evaluation.
 *
 * A Model is a coalgebra c: X -> T(X) on a finite poset of states, monotone
 * in the state, together with a valuation of the atom poset by uppersets of
 * states (monotone in the atom as well).
 *
 * Evaluation of nabla/delta goes through relation lifting:
 *
 *   x |= nabla(alpha)  iff the dual transport of c(x) is lifted-related to
 *                      the payload over the satisfaction relation;
 *   x |= delta(beta)   iff c(x) is NOT lifted-related to the dual transport
 *                      of the payload over the complement of satisfaction.
 *
 * Satisfaction is an upperset of states for every formula; the evaluator
 * checks this invariant as it fills its table.
 */

#include <functional>
#include <unordered_map>
#include <vector>

#include "moss/element.hpp"
#include "moss/errors.hpp"
#include "moss/functor.hpp"
#include "moss/lifting.hpp"
#include "moss/logic.hpp"
#include "moss/poset.hpp"

namespace moss {

struct Model {
  FinPoset states;
  FunctorPtr t; ///< normalised, dual-free
  FinPoset atoms;
  std::vector<Element> structure;       ///< c(x) in T(states) per state
  std::vector<std::vector<bool>> val;   ///< val[atom][state], up-closed both ways

  Model(FinPoset states_, const FunctorPtr& t_, FinPoset atoms_, std::vector<Element> structure_,
        std::vector<std::vector<bool>> val_)
      : states(std::move(states_)), t(normalize_dual(t_)), atoms(std::move(atoms_)),
        structure(std::move(structure_)), val(std::move(val_)) {
    if (structure.size() != states.size()) throw TypeError("model: one transition per state");
    for (Element& e : structure) e = canon_el(t, states, std::move(e));
    for (Index x = 0; x < states.size(); ++x)
      for (Index y = 0; y < states.size(); ++y)
        if (states.leq(x, y) && !element_leq(t, states, structure[x], structure[y]))
          throw TypeError("model: transition structure is not monotone ('" + states.label(x) +
                          "' <= '" + states.label(y) + "')");
    if (val.size() != atoms.size()) throw TypeError("model: one valuation row per atom");
    for (const auto& row : val)
      if (row.size() != states.size()) throw TypeError("model: valuation row size mismatch");
    for (Index a = 0; a < atoms.size(); ++a)
      for (Index x = 0; x < states.size(); ++x) {
        if (!val[a][x]) continue;
        for (Index y = 0; y < states.size(); ++y)
          if (states.leq(x, y) && !val[a][y])
            throw TypeError("model: valuation of '" + atoms.label(a) + "' is not up-closed");
        for (Index b = 0; b < atoms.size(); ++b)
          if (atoms.leq(a, b) && !val[b][x])
            throw TypeError("model: valuation is not monotone in the atom at '" +
                            atoms.label(a) + "'");
      }
  }
};

/// Memoising evaluator for one model against one arena.
class Evaluator {
public:
  Evaluator(const Model& m, const FormulaArena& arena) : m_(m), arena_(arena) {
    if (!same_functor(arena.t(), m.t) || !arena.atoms().same_as(m.atoms))
      throw TypeError("eval: model and formulas disagree on signature or atoms");
    dual_structure_.reserve(m.states.size());
    for (const Element& e : m.structure) dual_structure_.push_back(dual_el(m.t, e));
  }

  /// Satisfaction column of a formula (indexed by state).
  const std::vector<bool>& sat(FormulaId f) {
    auto it = memo_.find(f);
    if (it != memo_.end()) return it->second;
    const Formula& n = arena_.node(f);
    std::vector<bool> v(m_.states.size(), false);
    switch (n.kind) {
      case FormKind::Atom: v = m_.val[n.atom]; break;
      case FormKind::And:
        for (Index x = 0; x < v.size(); ++x) {
          bool all = true;
          for (FormulaId g : n.args) all = all && sat(g)[x];
          v[x] = all;
        }
        break;
      case FormKind::Or:
        for (Index x = 0; x < v.size(); ++x) {
          bool any = false;
          for (FormulaId g : n.args) any = any || sat(g)[x];
          v[x] = any;
        }
        break;
      case FormKind::Nabla: {
        auto rel = [&](Index state, Index pos) -> bool { return sat(n.support[pos])[state]; };
        for (Index x = 0; x < v.size(); ++x)
          v[x] = lift_holds(arena_.td(), rel, dual_structure_[x], n.payload);
        break;
      }
      case FormKind::Delta: {
        Element dual_payload = dual_el(arena_.td(), n.payload);
        auto unsat = [&](Index state, Index pos) -> bool { return !sat(n.support[pos])[state]; };
        for (Index x = 0; x < v.size(); ++x)
          v[x] = !lift_holds(m_.t, unsat, m_.structure[x], dual_payload);
        break;
      }
    }
    for (Index x = 0; x < v.size(); ++x)
      for (Index y = 0; y < v.size(); ++y)
        if (m_.states.leq(x, y) && v[x] && !v[y])
          throw InvariantError("eval: satisfaction of '" + arena_.print(f) +
                               "' is not up-closed");
    return memo_.emplace(f, std::move(v)).first->second;
  }

  bool sat(FormulaId f, Index state) { return sat(f)[state]; }

  const Model& model() const { return m_; }

private:
  const Model& m_;
  const FormulaArena& arena_;
  std::vector<Element> dual_structure_;
  std::unordered_map<FormulaId, std::vector<bool>> memo_;
};

/// Outcome of auditing satisfaction against the two order directions.
struct MonotonicityReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Checks, over a caller-supplied formula pool, that satisfaction is
/// up-closed in the state (x <= x' and x |= a imply x' |= a) and covariant
/// along the formula order (a <= b and x |= a imply x |= b).  Every failure
/// is recorded; `ok` stays true only when none occur.
inline MonotonicityReport eval_monotonicity_check(const Model& m, const FormulaArena& arena,
                                                  const std::vector<FormulaId>& pool) {
  MonotonicityReport rep;
  Evaluator ev(m, arena);
  for (FormulaId f : pool) {
    const std::vector<bool>& v = ev.sat(f);
    for (Index x = 0; x < m.states.size(); ++x)
      for (Index y = 0; y < m.states.size(); ++y)
        if (m.states.leq(x, y) && v[x] && !v[y]) {
          rep.ok = false;
          rep.violations.push_back("state order: '" + arena.print(f) + "' holds at '" +
                                   m.states.label(x) + "' but not above it at '" +
                                   m.states.label(y) + "'");
        }
  }
  for (FormulaId a : pool)
    for (FormulaId b : pool) {
      if (a == b || !arena.leq(a, b)) continue;
      const std::vector<bool>& va = ev.sat(a);
      const std::vector<bool>& vb = ev.sat(b);
      for (Index x = 0; x < m.states.size(); ++x)
        if (va[x] && !vb[x]) {
          rep.ok = false;
          rep.violations.push_back("formula order: '" + arena.print(a) + "' <= '" +
                                   arena.print(b) + "' yet only the smaller holds at '" +
                                   m.states.label(x) + "'");
        }
    }
  return rep;
}

/// Invokes `fn` on every model (coalgebra structure x valuation) over the
/// given state poset; `fn` returns false to stop.  Returns false when
/// stopped early.
inline bool for_each_model(const FunctorPtr& t_raw, const FinPoset& atoms, const FinPoset& states,
                           const std::function<bool(const Model&)>& fn,
                           std::size_t cap = kElemCap) {
  FunctorPtr t = normalize_dual(t_raw);
  EnumObj tx = apply_obj(t, states, cap);
  HomPoset structures = hom_poset(states, tx.poset, cap);

  // uppersets of the state poset, ordered by inclusion
  std::vector<std::vector<bool>> upsets;
  for (const IndexSet& a : antichains(states, cap)) {
    IndexSet up = states.up_closure(a);
    std::vector<bool> mask(states.size(), false);
    for (Index i : up) mask[i] = true;
    upsets.push_back(std::move(mask));
  }
  std::vector<std::string> ulabels;
  for (Index i = 0; i < upsets.size(); ++i) ulabels.push_back("u" + std::to_string(i));
  std::vector<std::vector<bool>> utable(upsets.size(), std::vector<bool>(upsets.size(), false));
  for (Index i = 0; i < upsets.size(); ++i)
    for (Index j = 0; j < upsets.size(); ++j) {
      bool subset = true;
      for (Index x = 0; x < states.size(); ++x) subset = subset && (!upsets[i][x] || upsets[j][x]);
      utable[i][j] = subset;
    }
  FinPoset upset_poset = FinPoset::from_closed_table(std::move(ulabels), std::move(utable));
  HomPoset valuations = hom_poset(atoms, upset_poset, cap);

  for (const auto& st : structures.maps) {
    std::vector<Element> structure;
    structure.reserve(st.size());
    for (Index v : st) structure.push_back(tx.elems[v]);
    for (const auto& vm : valuations.maps) {
      std::vector<std::vector<bool>> val;
      val.reserve(vm.size());
      for (Index u : vm) val.push_back(upsets[u]);
      if (!fn(Model(states, t, atoms, structure, std::move(val)))) return false;
    }
  }
  return true;
}

} // namespace moss
