#include "dirmix/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dirmix/dense_inference.hpp"

namespace dirmix {

namespace {

// Gamma-moment table poch[z][k] = (alpha_z)_k for k <= n.
std::vector<std::vector<double>> pochhammer_table(const Model& model, int n) {
  std::vector<std::vector<double>> table(model.num_causes());
  for (int z = 0; z < model.num_causes(); ++z) {
    table[z].resize(static_cast<std::size_t>(n) + 1);
    table[z][0] = 1.0;
    for (int k = 1; k <= n; ++k) {
      table[z][k] = table[z][k - 1] * (model.alpha(z) + (k - 1));
    }
  }
  return table;
}

}  // namespace

double brute_force_ptilde(const Model& model, const ObservationSeq& obs, double budget) {
  validate_observations(model, obs);
  const int n = obs.size();
  const int m = model.num_causes();
  if (std::pow(static_cast<double>(m), n) > budget) {
    throw BudgetError("brute_force_ptilde: m^n exceeds the enumeration budget");
  }
  if (n == 0) return 1.0;

  const auto poch = pochhammer_table(model, n);
  std::vector<int> assign(n, 0);
  std::vector<int> counts(m, 0);
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 1.0);
  counts[0] = n;
  for (int i = 0; i < n; ++i) {
    prefix[i + 1] = prefix[i] * model.beta(obs.tokens[i], 0);
  }

  double total = 0.0;
  for (;;) {
    double term = prefix[n];
    for (int z = 0; z < m; ++z) {
      if (counts[z] > 0) term *= poch[z][counts[z]];
    }
    total += term;

    // Odometer step; prefix products above the incremented digit are rebuilt.
    int i = n - 1;
    while (i >= 0 && assign[i] == m - 1) {
      counts[assign[i]]--;
      assign[i] = 0;
      counts[0]++;
      --i;
    }
    if (i < 0) break;
    counts[assign[i]]--;
    assign[i]++;
    counts[assign[i]]++;
    for (int k = i; k < n; ++k) {
      prefix[k + 1] = prefix[k] * model.beta(obs.tokens[k], assign[k]);
    }
  }
  return total;
}

double partition_ptilde(const Model& model, const ObservationSeq& obs, double budget) {
  validate_observations(model, obs);
  const int n = obs.size();
  if (n == 0) return 1.0;

  // Bell numbers via the Bell triangle.
  std::vector<double> row{1.0};
  for (int k = 1; k < n; ++k) {
    std::vector<double> next(row.size() + 1);
    next[0] = row.back();
    for (std::size_t i = 0; i < row.size(); ++i) next[i + 1] = next[i] + row[i];
    row = std::move(next);
  }
  if (row.back() > budget) {
    throw BudgetError("partition_ptilde: Bell(n) exceeds the enumeration budget");
  }

  const MomentTable mom = moments(model, obs, kMaxMaskCap);
  const std::vector<double> fact = factorial_table(n);

  // Restricted-growth strings: a[0] = 0 and a[i] <= 1 + max(a[0..i-1]).
  std::vector<int> rgs(n, 0);
  std::vector<SubsetMask> blocks(n, 0);
  double total = 0.0;
  for (;;) {
    int nblocks = 0;
    for (int i = 0; i < n; ++i) {
      if (rgs[i] + 1 > nblocks) nblocks = rgs[i] + 1;
      blocks[rgs[i]] |= bit(i);
    }
    double term = 1.0;
    for (int b = 0; b < nblocks; ++b) {
      term *= mom.values[blocks[b]] * fact[popcount(blocks[b]) - 1];
      blocks[b] = 0;
    }
    total += term;

    int i = n - 1;
    for (; i >= 1; --i) {
      int prefix_max = 0;
      for (int k = 0; k < i; ++k) prefix_max = std::max(prefix_max, rgs[k]);
      if (rgs[i] <= prefix_max) break;
    }
    if (i < 1) break;
    rgs[i]++;
    for (int k = i + 1; k < n; ++k) rgs[k] = 0;
  }
  return total;
}

double factor_product_ptilde(const Model& model, const ObservationSeq& obs, int cap) {
  validate_observations(model, obs);
  const int n = obs.size();
  check_mask_cap(n, cap);
  const auto poch = pochhammer_table(model, n);

  TruncatedPoly acc = TruncatedPoly::one(n, cap);
  TruncatedPoly factor = TruncatedPoly::one(n, cap);
  for (int z = 0; z < model.num_causes(); ++z) {
    const std::vector<double> prod = cause_subset_products(model, obs, z, cap);
    for (SubsetMask i = 0; i < prod.size(); ++i) {
      factor[i] = poch[z][popcount(i)] * prod[i];
    }
    acc = poly_mul(acc, factor);
  }
  return acc[full_mask(n)];
}

double permanent(const std::vector<std::vector<double>>& matrix, int max_n) {
  const int n = static_cast<int>(matrix.size());
  if (n > max_n) {
    throw BudgetError("permanent: matrix size " + std::to_string(n) +
                      " exceeds the limit " + std::to_string(max_n));
  }
  for (const auto& row : matrix) {
    if (static_cast<int>(row.size()) != n) {
      throw DomainError("permanent: matrix must be square");
    }
  }
  if (n == 0) return 1.0;

  double sum = 0.0;
  const SubsetMask count = SubsetMask{1} << n;
  for (SubsetMask s = 1; s != count; ++s) {
    double rowsum_prod = 1.0;
    for (int i = 0; i < n; ++i) {
      double rowsum = 0.0;
      for (int j = 0; j < n; ++j) {
        if ((s >> j) & 1) rowsum += matrix[i][j];
      }
      rowsum_prod *= rowsum;
    }
    sum += (popcount(s) & 1) ? -rowsum_prod : rowsum_prod;
  }
  return (n & 1) ? -sum : sum;
}

}  // namespace dirmix
