#pragma once

/**
 * @file logic.hpp
 * @brief Hash-consed modal formulas for a polynomial signature functor.
 *
 * Formula grammar (atoms come from a fixed atom poset):
 *
 *     f ::= ATOM | and(f, ...) | or(f, ...) | nabla EL | delta EL
 *
 * where EL is an element of the *dual* signature functor whose id-leaves are
 * formulas again.  Conjunctions keep the minimal antichain of their
 * arguments under the entailment order (stronger conjuncts subsume weaker
 * ones), disjunctions keep the maximal antichain, and modal payloads are
 * canonicalised with entailment at the leaves; canonical prints therefore
 * identify formulas, and the arena interns by print.
 *
 * The entailment order `leq` is the syntactic one used for axioms and proof
 * measures: atoms inherit the atom poset, and/or compare generator-wise,
 * modal formulas compare payloads under the lifted order, and distinct
 * constructors are incomparable.  It is decidable by descent on arena ids.
 */

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "moss/base.hpp"
#include "moss/element.hpp"
#include "moss/errors.hpp"
#include "moss/functor.hpp"
#include "moss/poset.hpp"

namespace moss {

using FormulaId = Index;

enum class FormKind { Atom, And, Or, Nabla, Delta };

struct Formula {
  FormKind kind = FormKind::Atom;
  Index atom = 0;                  ///< Atom: index into the atom poset.
  std::vector<FormulaId> args;     ///< And/Or: canonical generator antichain.
  Element payload;                 ///< Nabla/Delta: element over `support`.
  std::vector<FormulaId> support;  ///< Sorted; exactly the payload's base.
};

/// A list of formulas as a poset under entailment (labels are prints).
struct SupportPoset {
  FinPoset poset;
  std::vector<FormulaId> ids; ///< ids[k] is the formula at poset index k.
};

class FormulaArena {
public:
  /// The signature functor may use dual constructors; it is normalised here.
  /// Atom labels must be identifiers so prints stay unambiguous.
  FormulaArena(const FunctorPtr& t, FinPoset atoms)
      : t_(normalize_dual(t)), td_(normalize_dual(FunctorExpr::dual(t))),
        atoms_(std::move(atoms)) {
    for (const std::string& l : atoms_.labels()) {
      bool ok = !l.empty() && (std::isalpha(static_cast<unsigned char>(l[0])) || l[0] == '_');
      for (char c : l)
        ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
      if (!ok) throw TypeError("arena: atom label '" + l + "' is not an identifier");
    }
  }

  const FunctorPtr& t() const { return t_; }
  const FunctorPtr& td() const { return td_; }
  const FinPoset& atoms() const { return atoms_; }

  FormulaId atom(Index a) {
    if (a >= atoms_.size()) throw TypeError("arena: atom index out of range");
    Formula n;
    n.kind = FormKind::Atom;
    n.atom = a;
    return intern(std::move(n), atoms_.label(a), 0, 0, 0);
  }
  FormulaId atom(const std::string& label) { return atom(atoms_.index_of(label)); }

  FormulaId conj(std::vector<FormulaId> args) { return junction(FormKind::And, std::move(args)); }
  FormulaId disj(std::vector<FormulaId> args) { return junction(FormKind::Or, std::move(args)); }
  FormulaId top() { return conj({}); }
  FormulaId bottom() { return disj({}); }

  FormulaId nabla(Element payload, std::vector<FormulaId> support) {
    return modal(FormKind::Nabla, std::move(payload), std::move(support));
  }
  FormulaId delta(Element payload, std::vector<FormulaId> support) {
    return modal(FormKind::Delta, std::move(payload), std::move(support));
  }

  const Formula& node(FormulaId f) const { return nodes_.at(f); }
  const std::string& print(FormulaId f) const { return prints_.at(f); }
  std::size_t size() const { return nodes_.size(); }

  std::size_t depth(FormulaId f) const { return depth_.at(f); }
  /// Weights of a formula on the left resp. right of a sequent; the sum over
  /// a sequent is the secondary component of the termination measure.
  std::size_t weight_l(FormulaId f) const { return wl_.at(f); }
  std::size_t weight_r(FormulaId f) const { return wr_.at(f); }

  /// Entailment order (memoised; antisymmetric on interned formulas).
  bool leq(FormulaId a, FormulaId b) const {
    auto key = std::make_pair(a, b);
    auto it = leq_memo_.find(key);
    if (it != leq_memo_.end()) return it->second;
    const Formula& fa = nodes_[a];
    const Formula& fb = nodes_[b];
    bool r = false;
    if (fa.kind == fb.kind) {
      switch (fa.kind) {
        case FormKind::Atom: r = atoms_.leq(fa.atom, fb.atom); break;
        case FormKind::And: { // generators span uppersets: stronger has more
          r = true;
          for (FormulaId gb : fb.args) {
            bool covered = false;
            for (FormulaId ga : fa.args)
              if (leq(ga, gb)) { covered = true; break; }
            if (!covered) { r = false; break; }
          }
          break;
        }
        case FormKind::Or: {
          r = true;
          for (FormulaId ga : fa.args) {
            bool covered = false;
            for (FormulaId gb : fb.args)
              if (leq(ga, gb)) { covered = true; break; }
            if (!covered) { r = false; break; }
          }
          break;
        }
        case FormKind::Nabla:
        case FormKind::Delta:
          r = element_leq_leaf(td_, fa.payload, fb.payload, [&](Index i, Index j) {
            return leq(fa.support[i], fb.support[j]);
          });
          break;
      }
    }
    leq_memo_.emplace(key, r);
    return r;
  }

  /// Minimal antichain of a conjunctive side (drop entailed-by formulas).
  std::vector<FormulaId> minimal_antichain(std::vector<FormulaId> fs) const {
    return antichain_of(std::move(fs), /*keep_minimal=*/true);
  }
  /// Maximal antichain of a disjunctive side (drop entailing formulas).
  std::vector<FormulaId> maximal_antichain(std::vector<FormulaId> fs) const {
    return antichain_of(std::move(fs), /*keep_minimal=*/false);
  }

  /// Element-leaf policy over a support list: entailment order, print labels.
  LeafOps leaf_ops(std::vector<FormulaId> support) const {
    auto leq_fn = [this, support](Index i, Index j) { return leq(support[i], support[j]); };
    auto label_fn = [this, support](Index i) { return print(support[i]); };
    return LeafOps{std::move(leq_fn), std::move(label_fn)};
  }

  /// The given formulas (sorted, deduplicated) as a poset under entailment.
  SupportPoset support_poset(std::vector<FormulaId> ids) const {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    std::vector<std::string> labels;
    labels.reserve(ids.size());
    for (FormulaId f : ids) labels.push_back(print(f));
    std::vector<std::vector<bool>> table(ids.size(), std::vector<bool>(ids.size(), false));
    for (Index i = 0; i < ids.size(); ++i)
      for (Index j = 0; j < ids.size(); ++j) table[i][j] = leq(ids[i], ids[j]);
    return SupportPoset{FinPoset::from_closed_table(std::move(labels), std::move(table)),
                        std::move(ids)};
  }

private:
  FormulaId intern(Formula n, std::string print, std::size_t depth, std::size_t wl,
                   std::size_t wr) {
    auto it = by_print_.find(print);
    if (it != by_print_.end()) return it->second;
    FormulaId id = nodes_.size();
    nodes_.push_back(std::move(n));
    prints_.push_back(print);
    depth_.push_back(depth);
    wl_.push_back(wl);
    wr_.push_back(wr);
    by_print_.emplace(std::move(print), id);
    return id;
  }

  std::vector<FormulaId> antichain_of(std::vector<FormulaId> fs, bool keep_minimal) const {
    std::sort(fs.begin(), fs.end());
    fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
    std::vector<FormulaId> out;
    for (FormulaId a : fs) {
      bool dominated = false;
      for (FormulaId b : fs) {
        if (a == b) continue;
        if (keep_minimal ? leq(b, a) : leq(a, b)) { dominated = true; break; }
      }
      if (!dominated) out.push_back(a);
    }
    return out;
  }

  FormulaId junction(FormKind kind, std::vector<FormulaId> args) {
    for (FormulaId a : args)
      if (a >= nodes_.size()) throw TypeError("arena: formula id out of range");
    args = kind == FormKind::And ? minimal_antichain(std::move(args))
                                 : maximal_antichain(std::move(args));
    std::sort(args.begin(), args.end(),
              [this](FormulaId a, FormulaId b) { return print(a) < print(b); });
    std::string p = kind == FormKind::And ? "and(" : "or(";
    for (Index i = 0; i < args.size(); ++i) {
      if (i) p += ", ";
      p += print(args[i]);
    }
    p += ")";
    std::size_t d = 0, wl = 1, wr = 1;
    for (FormulaId a : args) {
      d = std::max(d, depth(a));
      wl += weight_l(a);
      wr += weight_r(a);
    }
    Formula n;
    n.kind = kind;
    n.args = std::move(args);
    return intern(std::move(n), std::move(p), d, wl, wr);
  }

  FormulaId modal(FormKind kind, Element payload, std::vector<FormulaId> support) {
    for (FormulaId f : support)
      if (f >= nodes_.size()) throw TypeError("arena: formula id out of range");
    // sort + dedupe the support, rewriting payload leaves accordingly
    std::vector<FormulaId> sorted = support;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::vector<Index> to_sorted(support.size());
    for (Index i = 0; i < support.size(); ++i)
      to_sorted[i] =
          std::lower_bound(sorted.begin(), sorted.end(), support[i]) - sorted.begin();
    payload = remap_leaves(td_, std::move(payload), to_sorted);
    payload = canon_el_leaf(td_, std::move(payload), leaf_ops(sorted));
    // canonicalisation may drop generators: shrink the support to the base
    IndexSet used = base_of(td_, payload);
    std::vector<Index> compact(sorted.size(), 0);
    std::vector<FormulaId> final_support;
    for (Index pos : used) {
      compact[pos] = final_support.size();
      final_support.push_back(sorted[pos]);
    }
    payload = remap_leaves(td_, std::move(payload), compact);
    std::string p = (kind == FormKind::Nabla ? "nabla " : "delta ") +
                    print_el_leaf(td_, payload, leaf_ops(final_support));
    std::size_t d = 1;
    for (FormulaId f : final_support) d = std::max(d, depth(f) + 1);
    Formula n;
    n.kind = kind;
    n.payload = std::move(payload);
    n.support = std::move(final_support);
    return intern(std::move(n), std::move(p), d, kind == FormKind::Nabla ? 2 : 3,
                  kind == FormKind::Nabla ? 3 : 2);
  }

  static Element remap_leaves(const FunctorPtr& f, Element e, const std::vector<Index>& to) {
    switch (f->kind) {
      case FKind::Const: return e;
      case FKind::Id:
        if (e.pt >= to.size()) throw TypeError("arena: payload leaf outside the support");
        e.pt = to[e.pt];
        return e;
      case FKind::Sum:
        e.kids[0] = remap_leaves(e.kind == EKind::InL ? f->lhs : f->rhs, std::move(e.kids[0]), to);
        return e;
      case FKind::Prod:
        e.kids[0] = remap_leaves(f->lhs, std::move(e.kids[0]), to);
        e.kids[1] = remap_leaves(f->rhs, std::move(e.kids[1]), to);
        return e;
      case FKind::Exp:
      case FKind::Low:
      case FKind::Up:
        for (Element& k : e.kids) k = remap_leaves(f->lhs, std::move(k), to);
        return e;
      case FKind::Dual: throw TypeError("arena: normalize dual constructors away first");
    }
    throw InvariantError("remap_leaves: unreachable");
  }

  FunctorPtr t_, td_;
  FinPoset atoms_;
  std::vector<Formula> nodes_;
  std::vector<std::string> prints_;
  std::vector<std::size_t> depth_, wl_, wr_;
  std::unordered_map<std::string, FormulaId> by_print_;
  mutable std::map<std::pair<FormulaId, FormulaId>, bool> leq_memo_;
};

} // namespace moss
