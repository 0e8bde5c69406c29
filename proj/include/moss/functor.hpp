#pragma once

/**
 * @file functor.hpp
 * @brief Expression trees for polynomial functors on posets.
 *
 * Grammar of functor expressions:
 *
 *     F ::= const(P)      constant at a finite poset P
 *         | id            identity
 *         | F + F         coproduct
 *         | F * F         product
 *         | F ^ E         power with finite poset exponent E
 *         | dual(F)       F-dual:  dual(F)(X) = (F(X^op))^op
 *         | low(F)        finitely generated lowersets of F
 *         | up(F)         finitely generated uppersets of F
 *
 * Every functor here preserves embeddings and exact squares, so the whole
 * grammar is safe for relation lifting; `normalize_dual` rewrites any
 * expression into an equivalent dual-free one, which the element and lifting
 * code assumes.
 */

#include <memory>
#include <string>

#include "moss/errors.hpp"
#include "moss/poset.hpp"

namespace moss {

enum class FKind { Const, Id, Sum, Prod, Exp, Dual, Low, Up };

struct FunctorExpr;
using FunctorPtr = std::shared_ptr<const FunctorExpr>;

struct FunctorExpr {
  FKind kind;
  FunctorPtr lhs;   ///< Sum/Prod left, Exp/Dual/Low/Up child.
  FunctorPtr rhs;   ///< Sum/Prod right.
  FinPoset param;   ///< Const value or Exp exponent.
  std::string name; ///< Declared name of `param` (used when printing).

  static FunctorPtr constant(FinPoset p, std::string name) {
    return make(FKind::Const, nullptr, nullptr, std::move(p), std::move(name));
  }
  static FunctorPtr identity() { return make(FKind::Id, nullptr, nullptr, FinPoset::discrete({}), ""); }
  static FunctorPtr sum(FunctorPtr a, FunctorPtr b) {
    return make(FKind::Sum, std::move(a), std::move(b), FinPoset::discrete({}), "");
  }
  static FunctorPtr prod(FunctorPtr a, FunctorPtr b) {
    return make(FKind::Prod, std::move(a), std::move(b), FinPoset::discrete({}), "");
  }
  static FunctorPtr exp(FunctorPtr f, FinPoset e, std::string name) {
    return make(FKind::Exp, std::move(f), nullptr, std::move(e), std::move(name));
  }
  static FunctorPtr dual(FunctorPtr f) {
    return make(FKind::Dual, std::move(f), nullptr, FinPoset::discrete({}), "");
  }
  static FunctorPtr low(FunctorPtr f) {
    return make(FKind::Low, std::move(f), nullptr, FinPoset::discrete({}), "");
  }
  static FunctorPtr up(FunctorPtr f) {
    return make(FKind::Up, std::move(f), nullptr, FinPoset::discrete({}), "");
  }

private:
  static FunctorPtr make(FKind k, FunctorPtr a, FunctorPtr b, FinPoset p, std::string n) {
    auto e = std::make_shared<FunctorExpr>();
    e->kind = k;
    e->lhs = std::move(a);
    e->rhs = std::move(b);
    e->param = std::move(p);
    e->name = std::move(n);
    return e;
  }
};

/// Canonical textual form; doubles as a structural equality key.
inline std::string print(const FunctorPtr& f) {
  switch (f->kind) {
    case FKind::Const: return "const(" + f->name + ")";
    case FKind::Id: return "id";
    case FKind::Sum: return "(" + print(f->lhs) + " + " + print(f->rhs) + ")";
    case FKind::Prod: return "(" + print(f->lhs) + " * " + print(f->rhs) + ")";
    case FKind::Exp: return "(" + print(f->lhs) + " ^ " + f->name + ")";
    case FKind::Dual: return "dual(" + print(f->lhs) + ")";
    case FKind::Low: return "low(" + print(f->lhs) + ")";
    case FKind::Up: return "up(" + print(f->lhs) + ")";
  }
  throw InvariantError("print(functor): unreachable");
}

inline bool same_functor(const FunctorPtr& a, const FunctorPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FKind::Const: return a->param.same_as(b->param);
    case FKind::Id: return true;
    case FKind::Sum:
    case FKind::Prod: return same_functor(a->lhs, b->lhs) && same_functor(a->rhs, b->rhs);
    case FKind::Exp: return a->param.same_as(b->param) && same_functor(a->lhs, b->lhs);
    case FKind::Dual:
    case FKind::Low:
    case FKind::Up: return same_functor(a->lhs, b->lhs);
  }
  throw InvariantError("same_functor: unreachable");
}

namespace detail {
inline FunctorPtr norm(const FunctorPtr& f, bool flip);
}

/// Rewrites to an equivalent expression without `dual` nodes, pushing each
/// dualisation onto constants and exponents and swapping low <-> up.
inline FunctorPtr normalize_dual(const FunctorPtr& f) { return detail::norm(f, false); }

namespace detail {
inline FunctorPtr norm(const FunctorPtr& f, bool flip) {
  switch (f->kind) {
    case FKind::Const:
      return flip ? FunctorExpr::constant(f->param.opposite(), f->name + "^op")
                  : FunctorExpr::constant(f->param, f->name);
    case FKind::Id: return FunctorExpr::identity();
    case FKind::Sum: return FunctorExpr::sum(norm(f->lhs, flip), norm(f->rhs, flip));
    case FKind::Prod: return FunctorExpr::prod(norm(f->lhs, flip), norm(f->rhs, flip));
    case FKind::Exp:
      return flip ? FunctorExpr::exp(norm(f->lhs, true), f->param.opposite(), f->name + "^op")
                  : FunctorExpr::exp(norm(f->lhs, false), f->param, f->name);
    case FKind::Dual: return norm(f->lhs, !flip);
    case FKind::Low:
      return flip ? FunctorExpr::up(norm(f->lhs, true)) : FunctorExpr::low(norm(f->lhs, false));
    case FKind::Up:
      return flip ? FunctorExpr::low(norm(f->lhs, true)) : FunctorExpr::up(norm(f->lhs, false));
  }
  throw InvariantError("normalize_dual: unreachable");
}
} // namespace detail

/// Number of constructor nodes (for diagnostics / enumeration budgets).
inline std::size_t functor_size(const FunctorPtr& f) {
  switch (f->kind) {
    case FKind::Const:
    case FKind::Id: return 1;
    case FKind::Sum:
    case FKind::Prod: return 1 + functor_size(f->lhs) + functor_size(f->rhs);
    default: return 1 + functor_size(f->lhs);
  }
}

/// Every functor in this grammar preserves embeddings and exact squares,
/// so liftings and bases are well behaved for all of them.
inline bool is_tame(const FunctorPtr&) { return true; }

} // namespace moss
