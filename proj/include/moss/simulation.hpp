#pragma once

/**
 * @file simulation.hpp
 * @brief Simulations between models, the greatest one, and synthesis of
 *        distinguishing formulas.
 *
 * A simulation from M (states X) to N (states Y) relates x to y when y can
 * mimic x: atoms true at x are true at y and the transition structures are
 * related under the lifted relation.  Stored as a monotone relation
 * S: Y -/-> X with holds(x, y) meaning "y simulates x".
 *
 * The greatest simulation is reached by the decreasing stage iteration
 *
 *     G_0 = full,   G_{n+1} = atom-filter  intersect  lifted-step(G_n),
 *
 * and the rank of a dissimilar pair (least n with (x, y) outside G_n) bounds
 * the modal depth needed to tell x from y.  `distinguishing_formula` turns
 * that bound into an actual formula: atom failures give atoms, structural
 * failures give a nabla whose payload maps each state in the base of c(x) to
 * the conjunction of separators collected below it (the down-closure keeps
 * the assignment monotone, satisfaction being an upperset).
 */

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "moss/base.hpp"
#include "moss/lifting.hpp"
#include "moss/logic.hpp"
#include "moss/model.hpp"
#include "moss/relation.hpp"

namespace moss {

namespace detail {
inline void check_same_signature(const Model& mx, const Model& my) {
  if (!same_functor(mx.t, my.t) || !mx.atoms.same_as(my.atoms))
    throw TypeError("simulation: models disagree on signature or atoms");
}
} // namespace detail

/// Pairs whose atoms transfer from x to y, as a relation my.states -/-> mx.states.
inline MonotoneRel atom_filter(const Model& mx, const Model& my) {
  detail::check_same_signature(mx, my);
  std::vector<std::vector<bool>> t(mx.states.size(), std::vector<bool>(my.states.size(), true));
  for (Index x = 0; x < mx.states.size(); ++x)
    for (Index y = 0; y < my.states.size(); ++y)
      for (Index a = 0; a < mx.atoms.size(); ++a)
        if (mx.val[a][x] && !my.val[a][y]) { t[x][y] = false; break; }
  return MonotoneRel(my.states, mx.states, std::move(t));
}

/// Checks the simulation conditions for a candidate relation.
inline bool is_simulation(const Model& mx, const Model& my, const MonotoneRel& s) {
  detail::check_same_signature(mx, my);
  if (!s.src().same_as(my.states) || !s.tgt().same_as(mx.states))
    throw TypeError("simulation: relation carriers do not match the models");
  MonotoneRel af = atom_filter(mx, my);
  auto rel = [&s](Index i, Index j) { return s.holds(i, j); };
  for (Index x = 0; x < mx.states.size(); ++x)
    for (Index y = 0; y < my.states.size(); ++y) {
      if (!s.holds(x, y)) continue;
      if (!af.holds(x, y)) return false;
      if (!lift_holds(mx.t, rel, mx.structure[x], my.structure[y])) return false;
    }
  return true;
}

/// Decreasing stage iteration from the full relation; the last entry is the
/// greatest simulation (the fixpoint).
inline std::vector<MonotoneRel> simulation_stages(const Model& mx, const Model& my) {
  detail::check_same_signature(mx, my);
  MonotoneRel af = atom_filter(mx, my);
  std::vector<MonotoneRel> stages;
  stages.push_back(full_rel(my.states, mx.states));
  for (;;) {
    const MonotoneRel& g = stages.back();
    auto rel = [&g](Index i, Index j) { return g.holds(i, j); };
    std::vector<std::vector<bool>> t(mx.states.size(),
                                     std::vector<bool>(my.states.size(), false));
    for (Index x = 0; x < mx.states.size(); ++x)
      for (Index y = 0; y < my.states.size(); ++y)
        t[x][y] = af.holds(x, y) && lift_holds(mx.t, rel, mx.structure[x], my.structure[y]);
    if (!MonotoneRel::is_monotone_table(my.states, mx.states, t))
      throw InvariantError("simulation: stage lost monotonicity");
    MonotoneRel next(my.states, mx.states, std::move(t));
    if (next.same_as(g)) break;
    stages.push_back(std::move(next));
  }
  return stages;
}

inline MonotoneRel greatest_simulation(const Model& mx, const Model& my) {
  MonotoneRel g = simulation_stages(mx, my).back();
  if (!is_simulation(mx, my, g)) throw InvariantError("simulation: fixpoint is not a simulation");
  return g;
}

inline bool similar(const Model& mx, Index x, const Model& my, Index y) {
  return greatest_simulation(mx, my).holds(x, y);
}

/// Least stage from which the pair is absent; nullopt when it survives to
/// the fixpoint (i.e. y simulates x).
inline std::optional<std::size_t> sim_rank(const std::vector<MonotoneRel>& stages, Index x,
                                           Index y) {
  for (std::size_t n = 0; n < stages.size(); ++n)
    if (!stages[n].holds(x, y)) return n;
  return std::nullopt;
}

/// Bounded logical comparison: every pool formula of depth at most k that
/// holds at x in mx also holds at y in my.  The pool is caller-supplied
/// (typically an enumeration of canonical formulas up to the depth bound);
/// deeper pool entries are skipped rather than rejected.
inline bool modally_stronger_upto(const FormulaArena& arena, const Model& mx, Index x,
                                  const Model& my, Index y, std::size_t k,
                                  const std::vector<FormulaId>& pool) {
  detail::check_same_signature(mx, my);
  if (!same_functor(arena.t(), mx.t) || !arena.atoms().same_as(mx.atoms))
    throw TypeError("simulation: arena and model signatures disagree");
  Evaluator evx(mx, arena), evy(my, arena);
  for (FormulaId a : pool) {
    if (arena.depth(a) > k) continue;
    if (evx.sat(a, x) && !evy.sat(a, y)) return false;
  }
  return true;
}

/// A formula satisfied at x but not at y, or nullopt when y simulates x.
/// The result is verified against both models before being returned.
inline std::optional<FormulaId> distinguishing_formula(FormulaArena& arena, const Model& mx,
                                                       Index x0, const Model& my, Index y0) {
  detail::check_same_signature(mx, my);
  if (!same_functor(arena.t(), mx.t) || !arena.atoms().same_as(mx.atoms))
    throw TypeError("simulation: arena and model signatures disagree");
  std::vector<MonotoneRel> stages = simulation_stages(mx, my);
  if (!sim_rank(stages, x0, y0)) return std::nullopt;

  Evaluator evx(mx, arena), evy(my, arena);
  std::map<std::pair<Index, Index>, FormulaId> memo;

  auto separate = [&](auto&& self, Index x, Index y) -> FormulaId {
    auto it = memo.find({x, y});
    if (it != memo.end()) return it->second;
    std::optional<std::size_t> r = sim_rank(stages, x, y);
    if (!r) throw InvariantError("distinguishing formula: pair is similar");
    FormulaId out = 0;
    bool atom_case = false;
    for (Index a = 0; a < mx.atoms.size() && !atom_case; ++a)
      if (mx.val[a][x] && !my.val[a][y]) {
        out = arena.atom(a);
        atom_case = true;
      }
    if (!atom_case) {
      // structural failure: build the payload over the base of c(x)
      IndexSet u = base_of(mx.t, mx.structure[x]);
      IndexSet w = base_of(my.t, my.structure[y]);
      FinPoset usub = sub_poset(mx.states, u);
      std::vector<FormulaId> cell(u.size());
      for (Index i = 0; i < u.size(); ++i) {
        std::vector<FormulaId> literals;
        for (Index j = 0; j < u.size(); ++j) {
          if (!mx.states.leq(u[j], u[i])) continue;
          for (Index wk : w)
            if (!stages[*r - 1].holds(u[j], wk)) literals.push_back(self(self, u[j], wk));
        }
        cell[i] = arena.conj(std::move(literals));
      }
      SupportPoset sp = arena.support_poset(cell);
      std::vector<Index> img(u.size());
      for (Index i = 0; i < u.size(); ++i)
        img[i] = std::lower_bound(sp.ids.begin(), sp.ids.end(), cell[i]) - sp.ids.begin();
      try {
        MonotoneMap f(usub.opposite(), sp.poset, std::move(img));
        Element payload = dual_el(mx.t, restrict_el(mx.t, mx.states, mx.structure[x], u));
        out = arena.nabla(apply_map(arena.td(), f, payload), sp.ids);
      } catch (const TypeError& e) {
        throw InvariantError(std::string("distinguishing formula: payload construction: ") +
                             e.what());
      }
    }
    if (!evx.sat(out, x) || evy.sat(out, y))
      throw InvariantError("distinguishing formula: verification failed at '" +
                           arena.print(out) + "'");
    memo.emplace(std::make_pair(x, y), out);
    return out;
  };
  return separate(separate, x0, y0);
}

} // namespace moss
