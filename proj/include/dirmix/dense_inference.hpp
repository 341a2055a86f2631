#pragma once

#include <map>
#include <string>
#include <vector>

#include "dirmix/model.hpp"

namespace dirmix {

// Rising factorial x(x+1)...(x+k-1); k = 0 gives 1.
double pochhammer(double x, int k);

// fact[k] = k! for k = 0..n.
std::vector<double> factorial_table(int n);

struct InferenceResult {
  double ptilde_full = 0.0;     // p~(W)
  double probability = 0.0;     // p(w_1..w_n | alpha, beta)
  double log_probability = 0.0;
  std::vector<double> theta_mean;  // E[theta_z | w], one entry per cause
  std::string method;
  std::map<std::string, std::string> diagnostics;
};

// Truncated product over nonempty J of (1 + <beta_J> * (|J|-1)! * X^J);
// the coefficient at mask I is p~(I) for every I simultaneously.
// Accepts algebraic-mode models (needed for the permanent identity).
TruncatedPoly ptilde_all(const Model& model, const ObservationSeq& obs,
                         int cap = kDefaultMaskCap);

// p = p~(W) / (|alpha|)_n.  Statistical mode only.
double probability(const Model& model, const ObservationSeq& obs, int cap = kDefaultMaskCap);

// Exact posterior means via one ptilde_all pass followed by a second pass
// over the causes.  Statistical mode only; throws DegenerateEvidenceError
// when p~(W) = 0.
InferenceResult posterior_mean(const Model& model, const ObservationSeq& obs,
                               int cap = kDefaultMaskCap);

}  // namespace dirmix
