#include "dirmix/dense_inference.hpp"

#include <cmath>
#include <string>

namespace dirmix {

double pochhammer(double x, int k) {
  if (k < 0) throw DomainError("pochhammer: negative exponent");
  double r = 1.0;
  for (int i = 0; i < k; ++i) r *= x + i;
  return r;
}

std::vector<double> factorial_table(int n) {
  std::vector<double> fact(static_cast<std::size_t>(n) + 1, 1.0);
  for (int k = 1; k <= n; ++k) fact[k] = fact[k - 1] * k;
  return fact;
}

TruncatedPoly ptilde_all(const Model& model, const ObservationSeq& obs, int cap) {
  const int n = obs.size();
  const MomentTable mom = moments(model, obs, cap);
  const std::vector<double> fact = factorial_table(n);
  TruncatedPoly p = TruncatedPoly::one(n, cap);
  // Factors in ascending mask order; Gamma(|J|) = (|J|-1)!.
  for (SubsetMask j = 1; j < mom.values.size(); ++j) {
    const double c = mom.values[j] * fact[popcount(j) - 1];
    if (c != 0.0) p.mul_affine(j, c);
  }
  return p;
}

namespace {

void require_statistical(const Model& model, const char* what) {
  if (model.algebraic()) {
    throw DomainError(std::string(what) + " requires a statistical-mode model");
  }
  if (model.alpha_total() <= 0.0) {
    throw DomainError(std::string(what) + ": total prior weight must be positive");
  }
}

}  // namespace

double probability(const Model& model, const ObservationSeq& obs, int cap) {
  require_statistical(model, "probability");
  const int n = obs.size();
  const TruncatedPoly p = ptilde_all(model, obs, cap);
  return p[full_mask(n)] / pochhammer(model.alpha_total(), n);
}

InferenceResult posterior_mean(const Model& model, const ObservationSeq& obs, int cap) {
  require_statistical(model, "posterior_mean");
  const int n = obs.size();
  const SubsetMask full = full_mask(n);
  const TruncatedPoly pt = ptilde_all(model, obs, cap);
  const double pt_full = pt[full];
  if (pt_full <= 0.0) {
    throw DegenerateEvidenceError("the observations have probability zero under the model");
  }

  const int m = model.num_causes();
  const double alpha_total = model.alpha_total();
  const std::vector<double> fact = factorial_table(n);

  InferenceResult result;
  result.method = "exact";
  result.ptilde_full = pt_full;
  result.probability = pt_full / pochhammer(alpha_total, n);
  result.log_probability = std::log(pt_full) - std::log(pochhammer(alpha_total, n));
  result.theta_mean.resize(m);

  // Second pass over the causes; the per-cause product table is rebuilt each
  // time so memory stays O(2^n) independent of m.
  std::vector<double> prod(std::size_t{1} << n);
  for (int z = 0; z < m; ++z) {
    prod[0] = 1.0;
    for (SubsetMask j = 1; j < prod.size(); ++j) {
      const SubsetMask low = j & (~j + 1);
      prod[j] = prod[j ^ low] * model.beta(obs.tokens[std::countr_zero(j)], z);
    }
    double acc = 0.0;
    for (SubsetMask j = 0; j < prod.size(); ++j) {
      acc += prod[j] * fact[popcount(j)] * pt[full ^ j];
    }
    result.theta_mean[z] = model.alpha(z) / (n + alpha_total) * acc / pt_full;
  }

  result.diagnostics["n"] = std::to_string(n);
  result.diagnostics["m"] = std::to_string(m);
  return result;
}

}  // namespace dirmix
