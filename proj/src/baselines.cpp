#include "dirmix/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dirmix/rng.hpp"

namespace dirmix {

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma is evaluated on positive arguments only");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      1.0 / 12 -
      inv2 * (1.0 / 120 -
              inv2 * (1.0 / 252 -
                      inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760)))));
  return acc + std::log(x) - 0.5 * inv - inv2 * series;
}

namespace {

void require_statistical(const Model& model, const char* what) {
  if (model.algebraic()) {
    throw DomainError(std::string(what) + " requires a statistical-mode model");
  }
}

// Every token must be generatable by some cause.
void require_generatable(const Model& model, const ObservationSeq& obs, const char* what) {
  for (int i = 0; i < obs.size(); ++i) {
    double best = 0.0;
    for (int z = 0; z < model.num_causes(); ++z) {
      best = std::max(best, model.beta(obs.tokens[i], z));
    }
    if (best <= 0.0) {
      throw DegenerateEvidenceError(std::string(what) + ": token at position " +
                                    std::to_string(i) + " has an all-zero beta row");
    }
  }
}

}  // namespace

EMResult em_max_likelihood(const Model& model, const ObservationSeq& obs,
                           const EMOptions& opts) {
  require_statistical(model, "em_max_likelihood");
  validate_observations(model, obs);
  require_generatable(model, obs, "em_max_likelihood");
  const int n = obs.size();
  const int m = model.num_causes();

  EMResult result;
  result.theta.assign(m, 1.0 / m);
  if (n == 0) return result;

  double prev_ll = -std::numeric_limits<double>::infinity();
  std::vector<double> next(m);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    double ll = 0.0;
    std::fill(next.begin(), next.end(), 0.0);
    for (int i = 0; i < n; ++i) {
      double pw = 0.0;
      for (int z = 0; z < m; ++z) pw += result.theta[z] * model.beta(obs.tokens[i], z);
      ll += std::log(pw);
      for (int z = 0; z < m; ++z) {
        next[z] += result.theta[z] * model.beta(obs.tokens[i], z) / pw;
      }
    }
    if (ll < prev_ll - 1e-9 * (1.0 + std::abs(ll))) {
      throw Error("EM log-likelihood decreased; this should be impossible");
    }
    result.log_likelihood = ll;
    result.iterations = iter;
    if (std::abs(ll - prev_ll) < opts.tol) break;
    prev_ll = ll;
    for (int z = 0; z < m; ++z) result.theta[z] = next[z] / n;
    result.iterations = iter + 1;
  }
  return result;
}

VBResult variational_bayes(const Model& model, const ObservationSeq& obs,
                           const VBOptions& opts) {
  require_statistical(model, "variational_bayes");
  validate_observations(model, obs);
  require_generatable(model, obs, "variational_bayes");
  const int n = obs.size();
  const int m = model.num_causes();

  VBResult result;
  result.gamma.resize(m);
  for (int z = 0; z < m; ++z) {
    result.gamma[z] = model.alpha(z) + static_cast<double>(n) / m;
  }
  result.phi.assign(n, std::vector<double>(m, 0.0));

  std::vector<double> weight(m);
  for (int iter = 0; iter < opts.max_iters; ++iter) {
    double gamma_total = 0.0;
    for (int z = 0; z < m; ++z) gamma_total += result.gamma[z];
    const double psi_total = digamma(gamma_total);
    for (int z = 0; z < m; ++z) {
      weight[z] = std::exp(digamma(result.gamma[z]) - psi_total);
    }
    for (int i = 0; i < n; ++i) {
      double norm = 0.0;
      for (int z = 0; z < m; ++z) {
        result.phi[i][z] = model.beta(obs.tokens[i], z) * weight[z];
        norm += result.phi[i][z];
      }
      if (norm <= 0.0) {
        throw DegenerateEvidenceError("variational_bayes: all phi numerators vanish");
      }
      for (int z = 0; z < m; ++z) result.phi[i][z] /= norm;
    }
    double delta = 0.0;
    for (int z = 0; z < m; ++z) {
      double g = model.alpha(z);
      for (int i = 0; i < n; ++i) g += result.phi[i][z];
      delta = std::max(delta, std::abs(g - result.gamma[z]));
      result.gamma[z] = g;
    }
    result.iterations = iter + 1;
    if (delta < opts.tol) break;
  }

  double total = 0.0;
  for (int z = 0; z < m; ++z) total += result.gamma[z];
  result.theta_mean.resize(m);
  for (int z = 0; z < m; ++z) result.theta_mean[z] = result.gamma[z] / total;
  return result;
}

GibbsResult gibbs_sample(const Model& model, const ObservationSeq& obs,
                         const GibbsOptions& opts) {
  require_statistical(model, "gibbs_sample");
  validate_observations(model, obs);
  require_generatable(model, obs, "gibbs_sample");
  const int n = obs.size();
  const int m = model.num_causes();
  const long burn_in = opts.burn_in >= 0 ? opts.burn_in : opts.iterations / 10;
  if (opts.iterations <= burn_in) {
    throw DomainError("gibbs_sample: iterations must exceed the burn-in");
  }

  const long kept_raw = opts.iterations - burn_in;
  const int batches = static_cast<int>(std::min<long>(opts.batches, kept_raw));
  const long batch_len = kept_raw / batches;
  const long used = static_cast<long>(batches) * batch_len;

  Rng rng(opts.seed);
  std::vector<double> theta = rng.dirichlet(model.alpha());
  std::vector<double> dir_param(m);
  std::vector<int> counts(m, 0);
  std::vector<double> batch_sum(static_cast<std::size_t>(batches) * m, 0.0);

  for (long iter = 0; iter < opts.iterations; ++iter) {
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      double total = 0.0;
      for (int z = 0; z < m; ++z) total += theta[z] * model.beta(obs.tokens[i], z);
      const double u = rng.uniform() * total;
      double cum = 0.0;
      int pick = m - 1;
      for (int z = 0; z < m; ++z) {
        cum += theta[z] * model.beta(obs.tokens[i], z);
        if (u < cum) {
          pick = z;
          break;
        }
      }
      ++counts[pick];
    }
    for (int z = 0; z < m; ++z) dir_param[z] = model.alpha(z) + counts[z];
    theta = rng.dirichlet(dir_param);

    const long k = iter - burn_in;
    if (k >= 0 && k < used) {
      double* batch = &batch_sum[static_cast<std::size_t>(k / batch_len) * m];
      for (int z = 0; z < m; ++z) batch[z] += theta[z];
    }
  }

  GibbsResult result;
  result.kept = used;
  result.burn_in = burn_in;
  result.batches = batches;
  result.seed = opts.seed;
  result.theta_mean.assign(m, 0.0);
  result.theta_stderr.assign(m, 0.0);
  for (int b = 0; b < batches; ++b) {
    for (int z = 0; z < m; ++z) {
      result.theta_mean[z] += batch_sum[static_cast<std::size_t>(b) * m + z];
    }
  }
  for (int z = 0; z < m; ++z) result.theta_mean[z] /= used;
  if (batches > 1) {
    for (int z = 0; z < m; ++z) {
      double var = 0.0;
      for (int b = 0; b < batches; ++b) {
        const double mb = batch_sum[static_cast<std::size_t>(b) * m + z] / batch_len;
        var += (mb - result.theta_mean[z]) * (mb - result.theta_mean[z]);
      }
      var /= batches - 1;
      result.theta_stderr[z] = std::sqrt(var / batches);
    }
  }
  return result;
}

}  // namespace dirmix
