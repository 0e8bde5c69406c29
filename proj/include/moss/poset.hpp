#pragma once

/**
 * @file poset.hpp
 * @brief Finite posets, monotone maps, and the (surjection, embedding)
 *        factorisation system.
 *
 * A FinPoset stores named elements together with the full reflexive,
 * transitive and antisymmetric order table.  Everything downstream (monotone
 * relations, functor evaluation, the logic) works with element indices into
 * such tables, so the order query `leq(i, j)` is a single array lookup.
 */

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "moss/errors.hpp"

namespace moss {

using Index = std::size_t;
using IndexSet = std::vector<Index>; // kept sorted and duplicate-free

/// Finite poset with string-labelled elements and a closed order table.
class FinPoset {
public:
  FinPoset() = default;

  /// Builds a poset from labels and a relation given as (lo, hi) label
  /// pairs.  The pairs may be any generating relation (covers included);
  /// the reflexive-transitive closure is taken and antisymmetry checked.
  static FinPoset make(std::vector<std::string> labels,
                       const std::vector<std::pair<std::string, std::string>>& leq_pairs) {
    FinPoset p(std::move(labels));
    for (const auto& [lo, hi] : leq_pairs) {
      p.leq_[p.index_of(lo)][p.index_of(hi)] = true;
    }
    p.close_and_check();
    return p;
  }

  /// Same as make() but with index pairs.
  static FinPoset make_indexed(std::vector<std::string> labels,
                               const std::vector<std::pair<Index, Index>>& leq_pairs) {
    FinPoset p(std::move(labels));
    for (const auto& [lo, hi] : leq_pairs) {
      if (lo >= p.size() || hi >= p.size()) throw TypeError("poset: index out of range");
      p.leq_[lo][hi] = true;
    }
    p.close_and_check();
    return p;
  }

  /// Builds a poset directly from a full boolean table (closed and checked).
  static FinPoset from_table(std::vector<std::string> labels,
                             std::vector<std::vector<bool>> table) {
    FinPoset p(std::move(labels));
    if (table.size() != p.size()) throw TypeError("poset: table size mismatch");
    for (auto& row : table)
      if (row.size() != p.size()) throw TypeError("poset: table size mismatch");
    p.leq_ = std::move(table);
    p.close_and_check();
    return p;
  }

  /// Builds a poset from a table that is already reflexive and transitive
  /// (as all tables derived from existing posets are).  Reflexivity and
  /// antisymmetry are still checked; the cubic closure pass is skipped.
  static FinPoset from_closed_table(std::vector<std::string> labels,
                                    std::vector<std::vector<bool>> table) {
    FinPoset p(std::move(labels));
    if (table.size() != p.size()) throw TypeError("poset: table size mismatch");
    for (auto& row : table)
      if (row.size() != p.size()) throw TypeError("poset: table size mismatch");
    p.leq_ = std::move(table);
    for (Index i = 0; i < p.size(); ++i) {
      if (!p.leq_[i][i]) throw TypeError("poset: table not reflexive");
      for (Index j = i + 1; j < p.size(); ++j)
        if (p.leq_[i][j] && p.leq_[j][i])
          throw TypeError("poset: order has a cycle through '" + p.labels_[i] + "' and '" +
                          p.labels_[j] + "'");
    }
    return p;
  }

  /// Discrete poset (equality order) on the given labels.
  static FinPoset discrete(std::vector<std::string> labels) {
    FinPoset p(std::move(labels));
    p.close_and_check();
    return p;
  }

  /// Linear order e0 < e1 < ... < e(n-1) with labels prefix+i.
  static FinPoset chain(std::size_t n, const std::string& prefix = "c") {
    std::vector<std::string> ls;
    ls.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ls.push_back(prefix + std::to_string(i));
    FinPoset p(std::move(ls));
    for (std::size_t i = 0; i + 1 < n; ++i) p.leq_[i][i + 1] = true;
    p.close_and_check();
    return p;
  }

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  bool leq(Index i, Index j) const { return leq_[i][j]; }
  bool lt(Index i, Index j) const { return i != j && leq_[i][j]; }

  const std::string& label(Index i) const { return labels_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  /// Index of a label; throws TypeError when absent.
  Index index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw TypeError("poset: unknown element '" + label + "'");
    return it->second;
  }

  std::optional<Index> find(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  /// Same carrier with the order reversed.
  FinPoset opposite() const {
    FinPoset p(labels_);
    for (Index i = 0; i < size(); ++i)
      for (Index j = 0; j < size(); ++j) p.leq_[i][j] = leq_[j][i];
    // already closed: the reverse of a partial order is one
    return p;
  }

  /// Covering pairs (i covered-by j), useful for compact printing.
  std::vector<std::pair<Index, Index>> covers() const {
    std::vector<std::pair<Index, Index>> out;
    for (Index i = 0; i < size(); ++i)
      for (Index j = 0; j < size(); ++j) {
        if (!lt(i, j)) continue;
        bool direct = true;
        for (Index k = 0; direct && k < size(); ++k)
          if (lt(i, k) && lt(k, j)) direct = false;
        if (direct) out.emplace_back(i, j);
      }
    return out;
  }

  bool is_antichain(const IndexSet& s) const {
    for (Index a : s)
      for (Index b : s)
        if (a != b && leq_[a][b]) return false;
    return true;
  }

  /// Minimal elements of a subset.
  IndexSet minimal_of(const IndexSet& s) const {
    IndexSet out;
    for (Index a : s) {
      bool minimal = true;
      for (Index b : s)
        if (b != a && leq_[b][a] && !leq_[a][b]) { minimal = false; break; }
      if (minimal) out.push_back(a);
    }
    return dedupe_equivalent(out, /*keep_lowest_index=*/true);
  }

  /// Maximal elements of a subset.
  IndexSet maximal_of(const IndexSet& s) const {
    IndexSet out;
    for (Index a : s) {
      bool maximal = true;
      for (Index b : s)
        if (b != a && leq_[a][b] && !leq_[b][a]) { maximal = false; break; }
      if (maximal) out.push_back(a);
    }
    return dedupe_equivalent(out, true);
  }

  IndexSet up_closure(const IndexSet& s) const {
    IndexSet out;
    for (Index j = 0; j < size(); ++j)
      for (Index i : s)
        if (leq_[i][j]) { out.push_back(j); break; }
    return out;
  }

  IndexSet down_closure(const IndexSet& s) const {
    IndexSet out;
    for (Index j = 0; j < size(); ++j)
      for (Index i : s)
        if (leq_[j][i]) { out.push_back(j); break; }
    return out;
  }

  bool is_up_closed(const IndexSet& s) const { return up_closure(s) == sorted(s); }
  bool is_down_closed(const IndexSet& s) const { return down_closure(s) == sorted(s); }

  bool same_as(const FinPoset& other) const {
    return labels_ == other.labels_ && leq_ == other.leq_;
  }

private:
  explicit FinPoset(std::vector<std::string> labels) : labels_(std::move(labels)) {
    leq_.assign(labels_.size(), std::vector<bool>(labels_.size(), false));
    for (Index i = 0; i < labels_.size(); ++i) {
      leq_[i][i] = true;
      if (!index_.emplace(labels_[i], i).second)
        throw TypeError("poset: duplicate element '" + labels_[i] + "'");
    }
  }

  static IndexSet sorted(IndexSet s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
  }

  // In a valid poset antisymmetry rules out distinct equivalent elements,
  // so this only sorts; kept separate for clarity at call sites.
  IndexSet dedupe_equivalent(IndexSet s, bool) const { return sorted(std::move(s)); }

  void close_and_check() {
    const std::size_t n = size();
    for (Index k = 0; k < n; ++k)
      for (Index i = 0; i < n; ++i) {
        if (!leq_[i][k]) continue;
        for (Index j = 0; j < n; ++j)
          if (leq_[k][j]) leq_[i][j] = true;
      }
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (leq_[i][j] && leq_[j][i])
          throw TypeError("poset: order has a cycle through '" + labels_[i] + "' and '" +
                          labels_[j] + "'");
  }

  std::vector<std::string> labels_;
  std::vector<std::vector<bool>> leq_;
  std::unordered_map<std::string, Index> index_;
};

/// Monotone map between two fixed posets, stored as an image table.
class MonotoneMap {
public:
  MonotoneMap(FinPoset dom, FinPoset cod, std::vector<Index> img)
      : dom_(std::move(dom)), cod_(std::move(cod)), img_(std::move(img)) {
    if (img_.size() != dom_.size()) throw TypeError("monotone map: image table size mismatch");
    for (Index v : img_)
      if (v >= cod_.size()) throw TypeError("monotone map: image index out of range");
    for (Index i = 0; i < dom_.size(); ++i)
      for (Index j = 0; j < dom_.size(); ++j)
        if (dom_.leq(i, j) && !cod_.leq(img_[i], img_[j]))
          throw TypeError("monotone map: not monotone at '" + dom_.label(i) + "' <= '" +
                          dom_.label(j) + "'");
  }

  static MonotoneMap identity(const FinPoset& x) {
    std::vector<Index> img(x.size());
    for (Index i = 0; i < x.size(); ++i) img[i] = i;
    return MonotoneMap(x, x, std::move(img));
  }

  const FinPoset& dom() const { return dom_; }
  const FinPoset& cod() const { return cod_; }
  Index operator()(Index i) const { return img_[i]; }
  const std::vector<Index>& table() const { return img_; }

  bool is_surjective() const {
    std::vector<bool> hit(cod_.size(), false);
    for (Index v : img_) hit[v] = true;
    return std::all_of(hit.begin(), hit.end(), [](bool b) { return b; });
  }

  /// Order-embedding: x <= y iff f(x) <= f(y) (injectivity follows).
  bool is_embedding() const {
    for (Index i = 0; i < dom_.size(); ++i)
      for (Index j = 0; j < dom_.size(); ++j)
        if (dom_.leq(i, j) != cod_.leq(img_[i], img_[j])) return false;
    return true;
  }

private:
  FinPoset dom_, cod_;
  std::vector<Index> img_;
};

inline MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f) {
  if (!f.cod().same_as(g.dom())) throw TypeError("compose: cod(f) != dom(g)");
  std::vector<Index> img(f.dom().size());
  for (Index i = 0; i < f.dom().size(); ++i) img[i] = g(f(i));
  return MonotoneMap(f.dom(), g.cod(), std::move(img));
}

/// Product poset; element (i, j) lives at flat index i * |B| + j.
inline FinPoset product(const FinPoset& a, const FinPoset& b) {
  std::vector<std::string> labels;
  labels.reserve(a.size() * b.size());
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < b.size(); ++j)
      labels.push_back("(" + a.label(i) + "," + b.label(j) + ")");
  std::vector<std::vector<bool>> table(labels.size(), std::vector<bool>(labels.size(), false));
  for (Index i = 0; i < a.size(); ++i)
    for (Index j = 0; j < b.size(); ++j)
      for (Index k = 0; k < a.size(); ++k)
        for (Index l = 0; l < b.size(); ++l)
          table[i * b.size() + j][k * b.size() + l] = a.leq(i, k) && b.leq(j, l);
  return FinPoset::from_closed_table(std::move(labels), std::move(table));
}

inline Index product_index(const FinPoset&, const FinPoset& b, Index i, Index j) {
  return i * b.size() + j;
}

/// Coproduct (disjoint union, no order across the two summands).
inline FinPoset coproduct(const FinPoset& a, const FinPoset& b) {
  std::vector<std::string> labels;
  labels.reserve(a.size() + b.size());
  for (Index i = 0; i < a.size(); ++i) labels.push_back("inl:" + a.label(i));
  for (Index j = 0; j < b.size(); ++j) labels.push_back("inr:" + b.label(j));
  std::vector<std::vector<bool>> table(labels.size(), std::vector<bool>(labels.size(), false));
  for (Index i = 0; i < a.size(); ++i)
    for (Index k = 0; k < a.size(); ++k) table[i][k] = a.leq(i, k);
  for (Index j = 0; j < b.size(); ++j)
    for (Index l = 0; l < b.size(); ++l) table[a.size() + j][a.size() + l] = b.leq(j, l);
  return FinPoset::from_closed_table(std::move(labels), std::move(table));
}

/// Sub-poset spanned by the given element indices, with the induced order.
/// Labels are inherited; `indices` is sorted and deduplicated.
inline FinPoset sub_poset(const FinPoset& x, IndexSet indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  std::vector<std::string> labels;
  labels.reserve(indices.size());
  for (Index i : indices) labels.push_back(x.label(i));
  std::vector<std::vector<bool>> table(indices.size(), std::vector<bool>(indices.size(), false));
  for (Index i = 0; i < indices.size(); ++i)
    for (Index j = 0; j < indices.size(); ++j) table[i][j] = x.leq(indices[i], indices[j]);
  return FinPoset::from_closed_table(std::move(labels), std::move(table));
}

/// Inclusion of sub_poset(x, indices) into x (an order-embedding).
inline MonotoneMap inclusion(const FinPoset& x, IndexSet indices) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  FinPoset sub = sub_poset(x, indices);
  return MonotoneMap(sub, x, std::move(indices));
}

/// Factorisation f = m . e with e a monotone surjection onto the image
/// (inherited order) and m an order-embedding.
struct Factorisation {
  MonotoneMap e; ///< dom(f) ->> image
  MonotoneMap m; ///< image  >-> cod(f)
};

inline Factorisation factorize(const MonotoneMap& f) {
  IndexSet image;
  for (Index i = 0; i < f.dom().size(); ++i) image.push_back(f(i));
  std::sort(image.begin(), image.end());
  image.erase(std::unique(image.begin(), image.end()), image.end());
  FinPoset img_poset = sub_poset(f.cod(), image);
  std::unordered_map<Index, Index> pos;
  for (Index k = 0; k < image.size(); ++k) pos[image[k]] = k;
  std::vector<Index> e_img(f.dom().size());
  for (Index i = 0; i < f.dom().size(); ++i) e_img[i] = pos[f(i)];
  return Factorisation{MonotoneMap(f.dom(), img_poset, std::move(e_img)),
                       MonotoneMap(img_poset, f.cod(), std::move(image))};
}

/// All monotone maps E -> X in pointwise order, as both a poset (labelled by
/// the map tables) and the tables themselves (maps[k][e] = value at e).
struct HomPoset {
  FinPoset poset;
  std::vector<std::vector<Index>> maps;
};

inline HomPoset hom_poset(const FinPoset& e, const FinPoset& x, std::size_t cap = 2'000'000) {
  std::vector<std::vector<Index>> maps;
  std::vector<Index> cur(e.size(), 0);
  // depth-first assignment with monotonicity pruning against earlier slots
  auto rec = [&](auto&& self, Index pos) -> void {
    if (pos == e.size()) {
      maps.push_back(cur);
      if (maps.size() > cap) throw CapacityError("hom_poset: more than cap monotone maps");
      return;
    }
    for (Index v = 0; v < x.size(); ++v) {
      bool ok = true;
      for (Index q = 0; ok && q < pos; ++q) {
        if (e.leq(q, pos) && !x.leq(cur[q], v)) ok = false;
        if (e.leq(pos, q) && !x.leq(v, cur[q])) ok = false;
      }
      if (!ok) continue;
      cur[pos] = v;
      self(self, pos + 1);
    }
  };
  if (e.size() == 0) {
    maps.push_back({});
  } else {
    rec(rec, 0);
  }
  std::vector<std::string> labels;
  labels.reserve(maps.size());
  for (const auto& m : maps) {
    std::string s = "[";
    for (Index i = 0; i < m.size(); ++i) {
      if (i) s += ",";
      s += e.label(i) + "->" + x.label(m[i]);
    }
    s += "]";
    labels.push_back(std::move(s));
  }
  std::vector<std::vector<bool>> table(maps.size(), std::vector<bool>(maps.size(), false));
  for (Index i = 0; i < maps.size(); ++i)
    for (Index j = 0; j < maps.size(); ++j) {
      bool le = true;
      for (Index p = 0; le && p < e.size(); ++p) le = x.leq(maps[i][p], maps[j][p]);
      table[i][j] = le;
    }
  HomPoset out{FinPoset::from_closed_table(std::move(labels), std::move(table)), std::move(maps)};
  return out;
}

/// All posets on k elements labelled prefix0..prefix(k-1), i.e. every closed
/// antisymmetric order table.  Deterministic order; grows fast (19 at k = 3,
/// 219 at k = 4).
inline std::vector<FinPoset> enumerate_posets(std::size_t k, const std::string& prefix = "x") {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < k; ++i) labels.push_back(prefix + std::to_string(i));
  std::vector<FinPoset> out;
  if (k == 0) {
    out.push_back(FinPoset::discrete({}));
    return out;
  }
  std::vector<std::pair<Index, Index>> slots;
  for (Index i = 0; i < k; ++i)
    for (Index j = 0; j < k; ++j)
      if (i != j) slots.emplace_back(i, j);
  const std::size_t total = std::size_t{1} << slots.size();
  for (std::size_t bits = 0; bits < total; ++bits) {
    std::vector<std::vector<bool>> t(k, std::vector<bool>(k, false));
    for (Index i = 0; i < k; ++i) t[i][i] = true;
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (bits >> s & 1) t[slots[s].first][slots[s].second] = true;
    // must already be transitive and acyclic to count exactly once
    bool ok = true;
    for (Index a = 0; ok && a < k; ++a)
      for (Index b = 0; ok && b < k; ++b) {
        if (!t[a][b]) continue;
        if (a != b && t[b][a]) ok = false;
        for (Index c = 0; ok && c < k; ++c)
          if (t[b][c] && !t[a][c]) ok = false;
      }
    if (!ok) continue;
    out.push_back(FinPoset::from_table(labels, std::move(t)));
  }
  return out;
}

} // namespace moss
