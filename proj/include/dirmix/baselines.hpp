#pragma once

#include <cstdint>
#include <vector>

#include "dirmix/model.hpp"

namespace dirmix {

// Digamma via the upward recurrence psi(x) = psi(x+1) - 1/x into the
// asymptotic series for x >= 10; absolute accuracy better than 1e-12.
double digamma(double x);

struct EMOptions {
  int max_iters = 100000;
  double tol = 1e-10;  // on the log-likelihood change
};

struct EMResult {
  std::vector<double> theta;
  int iterations = 0;
  double log_likelihood = 0.0;
};

// Maximum-likelihood mixture weights from uniform initialization:
// r_i(z) proportional to theta(z) beta(w_i|z), theta(z) = mean_i r_i(z).
// The log-likelihood is checked to be non-decreasing at every step.
EMResult em_max_likelihood(const Model& model, const ObservationSeq& obs,
                           const EMOptions& opts = {});

struct VBOptions {
  int max_iters = 100000;
  double tol = 1e-10;  // on max |gamma change|
};

struct VBResult {
  std::vector<double> gamma;               // Dirichlet surrogate parameters
  std::vector<std::vector<double>> phi;    // phi[i][z] responsibilities
  std::vector<double> theta_mean;          // gamma / sum(gamma)
  int iterations = 0;
};

// Mean-field iteration started from gamma(z) = alpha(z) + n/m:
//   phi_i(z) proportional to beta(w_i|z) * exp(psi(gamma(z)) - psi(sum gamma)),
//   gamma(z) = alpha(z) + sum_i phi_i(z).
VBResult variational_bayes(const Model& model, const ObservationSeq& obs,
                           const VBOptions& opts = {});

struct GibbsOptions {
  long iterations = 1000000;
  long burn_in = -1;  // -1 selects 10% of iterations
  std::uint64_t seed = 1;
  int batches = 100;
};

struct GibbsResult {
  std::vector<double> theta_mean;
  std::vector<double> theta_stderr;  // batch-means standard error per cause
  long kept = 0;                     // samples behind the mean (burn-in and
                                     // partial-batch remainder excluded)
  long burn_in = 0;
  int batches = 0;
  std::uint64_t seed = 0;
};

// Collapsed alternation: sample z_i with p(z_i) proportional to
// theta * beta(w_i|.), then theta ~ Dir(alpha + [z]); the mean is taken over
// post-burn-in theta samples.  Deterministic for a fixed seed (std::mt19937_64,
// see rng.hpp).
GibbsResult gibbs_sample(const Model& model, const ObservationSeq& obs,
                         const GibbsOptions& opts = {});

}  // namespace dirmix
