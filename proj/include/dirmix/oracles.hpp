#pragma once

#include <vector>

#include "dirmix/model.hpp"

namespace dirmix {

// Brute-force oracles for desk-scale verification.  They refuse (BudgetError)
// instead of silently truncating when the instance exceeds their budget.

// Sum over all cause assignments z in Z^n of
//   prod_i beta(w_i|z_i) * prod_z (alpha_z)_{count of z}.
// Refuses when m^n exceeds the budget.
double brute_force_ptilde(const Model& model, const ObservationSeq& obs,
                          double budget = 1e8);

// Sum over all set partitions of the positions of
//   prod over blocks J of <beta_J> * (|J|-1)!,
// enumerated by restricted-growth strings.  Refuses when Bell(n) exceeds
// the budget.
double partition_ptilde(const Model& model, const ObservationSeq& obs,
                        double budget = 1e8);

// Product over causes of sum_{I} (alpha_z)_{|I|} * beta_I(z) * X^I in the
// truncated algebra; returns the coefficient at the full mask.  O(m * 3^n).
double factor_product_ptilde(const Model& model, const ObservationSeq& obs,
                             int cap = kDefaultMaskCap);

// Ryser inclusion-exclusion permanent; refuses above max_n.
double permanent(const std::vector<std::vector<double>>& matrix, int max_n = 12);

}  // namespace dirmix
