#pragma once

/**
 * @file relation.hpp
 * @brief Monotone relations between posets and their calculus.
 *
 * A monotone relation R: X -/-> Y is a monotone map Y^op x X -> 2.  We write
 * holds(y, x) for "x is related to y"; monotonicity means
 *
 *     holds(y, x)  and  y' <= y  and  x <= x'   imply   holds(y', x').
 *
 * Both carriers are stored explicitly so that converse and negation (which
 * land on opposite posets) always validate against the correct order.
 */

#include <vector>

#include "moss/errors.hpp"
#include "moss/poset.hpp"

namespace moss {

class MonotoneRel {
public:
  /// Builds a relation and verifies the monotonicity invariant.
  MonotoneRel(FinPoset src, FinPoset tgt, std::vector<std::vector<bool>> holds)
      : src_(std::move(src)), tgt_(std::move(tgt)), holds_(std::move(holds)) {
    if (holds_.size() != tgt_.size()) throw TypeError("relation: table height mismatch");
    for (const auto& row : holds_)
      if (row.size() != src_.size()) throw TypeError("relation: table width mismatch");
    if (!is_monotone_table(src_, tgt_, holds_))
      throw TypeError("relation: table is not monotone");
  }

  static bool is_monotone_table(const FinPoset& src, const FinPoset& tgt,
                                const std::vector<std::vector<bool>>& holds) {
    for (Index y = 0; y < tgt.size(); ++y)
      for (Index x = 0; x < src.size(); ++x) {
        if (!holds[y][x]) continue;
        for (Index y2 = 0; y2 < tgt.size(); ++y2) {
          if (!tgt.leq(y2, y)) continue;
          for (Index x2 = 0; x2 < src.size(); ++x2)
            if (src.leq(x, x2) && !holds[y2][x2]) return false;
        }
      }
    return true;
  }

  const FinPoset& src() const { return src_; }
  const FinPoset& tgt() const { return tgt_; }
  bool holds(Index y, Index x) const { return holds_[y][x]; }
  const std::vector<std::vector<bool>>& table() const { return holds_; }

  bool same_as(const MonotoneRel& o) const {
    return src_.same_as(o.src_) && tgt_.same_as(o.tgt_) && holds_ == o.holds_;
  }

  /// Containment of relation tables (carriers must agree).
  bool contained_in(const MonotoneRel& o) const {
    if (!src_.same_as(o.src_) || !tgt_.same_as(o.tgt_)) throw TypeError("relation: carrier mismatch");
    for (Index y = 0; y < tgt_.size(); ++y)
      for (Index x = 0; x < src_.size(); ++x)
        if (holds_[y][x] && !o.holds_[y][x]) return false;
    return true;
  }

private:
  FinPoset src_, tgt_;
  std::vector<std::vector<bool>> holds_;
};

/// Identity relation on X: the order itself, holds(y, x) iff y <= x.
inline MonotoneRel id_rel(const FinPoset& x) {
  std::vector<std::vector<bool>> t(x.size(), std::vector<bool>(x.size(), false));
  for (Index i = 0; i < x.size(); ++i)
    for (Index j = 0; j < x.size(); ++j) t[i][j] = x.leq(i, j);
  return MonotoneRel(x, x, std::move(t));
}

/// Everywhere-true relation X -/-> Y (monotone for any orders).
inline MonotoneRel full_rel(const FinPoset& src, const FinPoset& tgt) {
  return MonotoneRel(src, tgt,
                     std::vector<std::vector<bool>>(tgt.size(),
                                                    std::vector<bool>(src.size(), true)));
}

/// Empty relation X -/-> Y.
inline MonotoneRel empty_rel(const FinPoset& src, const FinPoset& tgt) {
  return MonotoneRel(src, tgt,
                     std::vector<std::vector<bool>>(tgt.size(),
                                                    std::vector<bool>(src.size(), false)));
}

/// Composite S . R : X -/-> Z of R: X -/-> Y and S: Y -/-> Z
/// (holds(z, x) iff some y satisfies S(z, y) and R(y, x)).
inline MonotoneRel compose(const MonotoneRel& s, const MonotoneRel& r) {
  if (!r.tgt().same_as(s.src())) throw TypeError("relation compose: tgt(R) != src(S)");
  std::vector<std::vector<bool>> t(s.tgt().size(), std::vector<bool>(r.src().size(), false));
  for (Index z = 0; z < s.tgt().size(); ++z)
    for (Index x = 0; x < r.src().size(); ++x)
      for (Index y = 0; y < r.tgt().size(); ++y)
        if (s.holds(z, y) && r.holds(y, x)) { t[z][x] = true; break; }
  return MonotoneRel(r.src(), s.tgt(), std::move(t));
}

/// Graph of a monotone map f: X -> Y, as f_dia: X -/-> Y with
/// holds(y, x) iff y <= f(x).
inline MonotoneRel graph(const MonotoneMap& f) {
  std::vector<std::vector<bool>> t(f.cod().size(), std::vector<bool>(f.dom().size(), false));
  for (Index y = 0; y < f.cod().size(); ++y)
    for (Index x = 0; x < f.dom().size(); ++x) t[y][x] = f.cod().leq(y, f(x));
  return MonotoneRel(f.dom(), f.cod(), std::move(t));
}

/// Cograph of f: X -> Y, as f^dia: Y -/-> X with holds(x, y) iff f(x) <= y.
inline MonotoneRel cograph(const MonotoneMap& f) {
  std::vector<std::vector<bool>> t(f.dom().size(), std::vector<bool>(f.cod().size(), false));
  for (Index x = 0; x < f.dom().size(); ++x)
    for (Index y = 0; y < f.cod().size(); ++y) t[x][y] = f.cod().leq(f(x), y);
  return MonotoneRel(f.cod(), f.dom(), std::move(t));
}

/// Converse R^con: Y^op -/-> X^op of R: X -/-> Y; same pairs, carriers
/// flipped to the opposite orders.
inline MonotoneRel converse(const MonotoneRel& r) {
  std::vector<std::vector<bool>> t(r.src().size(), std::vector<bool>(r.tgt().size(), false));
  for (Index x = 0; x < r.src().size(); ++x)
    for (Index y = 0; y < r.tgt().size(); ++y) t[x][y] = r.holds(y, x);
  return MonotoneRel(r.tgt().opposite(), r.src().opposite(), std::move(t));
}

/// Negation not-R: X^op -/-> Y^op; complemented pairs, carriers flipped.
inline MonotoneRel negate(const MonotoneRel& r) {
  std::vector<std::vector<bool>> t(r.tgt().size(), std::vector<bool>(r.src().size(), false));
  for (Index y = 0; y < r.tgt().size(); ++y)
    for (Index x = 0; x < r.src().size(); ++x) t[y][x] = !r.holds(y, x);
  return MonotoneRel(r.src().opposite(), r.tgt().opposite(), std::move(t));
}

/// Restriction R(g-, f-) = g^dia . R . f_dia : A -/-> B along f: A -> src(R)
/// and g: B -> tgt(R); concretely holds(b, a) = R(g(b), f(a)).
inline MonotoneRel restrict_rel(const MonotoneRel& r, const MonotoneMap& f, const MonotoneMap& g) {
  if (!f.cod().same_as(r.src())) throw TypeError("restrict: cod(f) != src(R)");
  if (!g.cod().same_as(r.tgt())) throw TypeError("restrict: cod(g) != tgt(R)");
  std::vector<std::vector<bool>> t(g.dom().size(), std::vector<bool>(f.dom().size(), false));
  for (Index b = 0; b < g.dom().size(); ++b)
    for (Index a = 0; a < f.dom().size(); ++a) t[b][a] = r.holds(g(b), f(a));
  return MonotoneRel(f.dom(), g.dom(), std::move(t));
}

/// Largest monotone subrelation of an arbitrary boolean table; used to
/// re-normalise defensively where a fixpoint iteration expects monotone
/// intermediate values.
inline MonotoneRel monotone_interior(const FinPoset& src, const FinPoset& tgt,
                                     const std::vector<std::vector<bool>>& raw) {
  std::vector<std::vector<bool>> t(tgt.size(), std::vector<bool>(src.size(), false));
  for (Index y = 0; y < tgt.size(); ++y)
    for (Index x = 0; x < src.size(); ++x) {
      bool keep = raw[y][x];
      for (Index y2 = 0; keep && y2 < tgt.size(); ++y2) {
        if (!tgt.leq(y2, y)) continue;
        for (Index x2 = 0; keep && x2 < src.size(); ++x2)
          if (src.leq(x, x2) && !raw[y2][x2]) keep = false;
      }
      t[y][x] = keep;
    }
  return MonotoneRel(src, tgt, std::move(t));
}

/// Lax square (f . p0 <= g . p1 pointwise); throws TypeError otherwise.
/// Exactness: whenever f(a) <= g(b) there is w with a <= p0(w) and p1(w) <= b.
inline bool is_exact_square(const MonotoneMap& p0, const MonotoneMap& p1, const MonotoneMap& f,
                            const MonotoneMap& g) {
  if (!p0.dom().same_as(p1.dom())) throw TypeError("exact square: leg domains differ");
  if (!f.dom().same_as(p0.cod()) || !g.dom().same_as(p1.cod()))
    throw TypeError("exact square: legs do not compose");
  if (!f.cod().same_as(g.cod())) throw TypeError("exact square: codomains differ");
  for (Index w = 0; w < p0.dom().size(); ++w)
    if (!f.cod().leq(f(p0(w)), g(p1(w)))) throw TypeError("exact square: square is not lax");
  for (Index a = 0; a < f.dom().size(); ++a)
    for (Index b = 0; b < g.dom().size(); ++b) {
      if (!f.cod().leq(f(a), g(b))) continue;
      bool found = false;
      for (Index w = 0; !found && w < p0.dom().size(); ++w)
        found = f.dom().leq(a, p0(w)) && g.dom().leq(p1(w), b);
      if (!found) return false;
    }
  return true;
}

} // namespace moss
