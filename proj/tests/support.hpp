#pragma once

#include <cstdint>
#include <vector>

#include "tfx/ordinal.hpp"
#include "tfx/rng.hpp"

namespace tfx::testsupport {

// Random ordinal with exponent-tower height at most `height`. Heights up to 3
// already exercise nontrivial towers like w^(w^2*3 + 1)*2 + w*4 + 2.
inline Ordinal random_ordinal(Rng& rng, int height, int max_terms = 4,
                              std::uint64_t max_coeff = 5) {
  if (height <= 0) return Ordinal::nat(rng.below(max_coeff + 1));
  std::uint64_t k = rng.below(static_cast<std::uint64_t>(max_terms) + 1);
  if (k == 0) return Ordinal::nat(rng.below(max_coeff + 1));

  std::vector<Ordinal> exps;
  exps.reserve(k);
  for (std::uint64_t i = 0; i < k; ++i)
    exps.push_back(random_ordinal(rng, height - 1, max_terms, max_coeff));

  // Sort descending and drop duplicates to honor strict CNF exponent order.
  for (std::size_t i = 0; i < exps.size(); ++i)
    for (std::size_t j = i + 1; j < exps.size(); ++j)
      if (exps[i] < exps[j]) std::swap(exps[i], exps[j]);
  std::vector<Ordinal> uniq;
  for (const Ordinal& e : exps)
    if (uniq.empty() || uniq.back() != e) uniq.push_back(e);

  std::vector<OrdTerm> terms;
  terms.reserve(uniq.size());
  for (const Ordinal& e : uniq)
    terms.push_back(OrdTerm{e, Nat(1 + rng.below(max_coeff))});
  return Ordinal::from_terms(std::move(terms));
}

}  // namespace tfx::testsupport
