#pragma once

// Shared fixtures for the test suite: small posets, a functor catalogue, and
// seeded random monotone relations.

#include <random>
#include <string>
#include <utility>
#include <vector>

#include "moss/functor.hpp"
#include "moss/poset.hpp"
#include "moss/relation.hpp"

namespace mosstest {

using namespace moss;

inline FinPoset diamond() {
  return FinPoset::make({"bot", "l", "r", "top"},
                        {{"bot", "l"}, {"bot", "r"}, {"l", "top"}, {"r", "top"}});
}

inline FinPoset vee() {
  return FinPoset::make({"x0", "x1", "x2"}, {{"x0", "x2"}, {"x1", "x2"}});
}

inline FinPoset bool2() { return FinPoset::chain(2, "b"); }

/// Small carriers exercised in exhaustive cross-checks.
inline std::vector<FinPoset> small_posets() {
  return {FinPoset::chain(1), FinPoset::chain(2), FinPoset::discrete({"a", "b"}), vee(),
          FinPoset::chain(3)};
}

/// Functor expressions up to two constructors deep over a two-point chain
/// constant; every constructor of the grammar appears.
inline std::vector<FunctorPtr> functor_catalogue() {
  using F = FunctorExpr;
  FinPoset c2 = bool2();
  std::vector<FunctorPtr> out;
  out.push_back(F::identity());
  out.push_back(F::constant(c2, "B"));
  out.push_back(F::low(F::identity()));
  out.push_back(F::up(F::identity()));
  out.push_back(F::sum(F::identity(), F::constant(c2, "B")));
  out.push_back(F::prod(F::constant(c2, "B"), F::identity()));
  out.push_back(F::prod(F::identity(), F::identity()));
  out.push_back(F::exp(F::identity(), c2, "B"));
  out.push_back(F::low(F::prod(F::identity(), F::identity())));
  out.push_back(F::up(F::sum(F::identity(), F::identity())));
  out.push_back(F::low(F::up(F::identity())));
  out.push_back(F::exp(F::low(F::identity()), c2, "B"));
  return out;
}

/// Deterministic random monotone relation (interior of a coin-flip table).
inline MonotoneRel random_rel(const FinPoset& src, const FinPoset& tgt, unsigned seed) {
  std::mt19937 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::vector<std::vector<bool>> raw(tgt.size(), std::vector<bool>(src.size(), false));
  for (auto& row : raw)
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = coin(rng);
  return monotone_interior(src, tgt, raw);
}

} // namespace mosstest
