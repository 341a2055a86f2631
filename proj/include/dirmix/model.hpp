#pragma once

#include <vector>

#include "dirmix/subset_algebra.hpp"

namespace dirmix {

// Problem instance: prior weights alpha(z) and emission table beta(w|z).
// Statistical mode requires alpha > 0 and beta >= 0; algebraic mode lifts
// the positivity constraint on alpha (used by the permanent identity).
// Columns of beta need not sum to anything.
class Model {
 public:
  Model(std::vector<double> alpha, std::vector<std::vector<double>> beta_rows,
        bool algebraic = false);

  int num_causes() const { return m_; }
  int vocab_size() const { return v_; }
  bool algebraic() const { return algebraic_; }

  double alpha(int z) const { return alpha_[z]; }
  const std::vector<double>& alpha() const { return alpha_; }
  double alpha_total() const { return alpha_total_; }

  double beta(int v, int z) const { return beta_[static_cast<std::size_t>(v) * m_ + z]; }

 private:
  int m_ = 0;
  int v_ = 0;
  bool algebraic_ = false;
  std::vector<double> alpha_;
  std::vector<double> beta_;  // row-major, beta_[v*m + z]
  double alpha_total_ = 0.0;
};

// Observed tokens as vocabulary indices; repeats allowed.  Every token gets
// its own formal variable, so position i <-> mask bit i.
struct ObservationSeq {
  std::vector<int> tokens;

  int size() const { return static_cast<int>(tokens.size()); }
};

void validate_observations(const Model& model, const ObservationSeq& obs);

// The 2^n prior-weighted product moments <beta_J>.
struct MomentTable {
  int n = 0;
  std::vector<double> values;  // values[J] = sum_z alpha(z) * prod_{i in J} beta(w_i|z)

  double operator[](SubsetMask j) const { return values[j]; }
};

// Entry J = prod_{i in J} beta(w_i|z), filled with the doubling recurrence
// prod[J] = prod[J \ {i}] * beta(w_i|z) for the lowest set bit i.
std::vector<double> cause_subset_products(const Model& model, const ObservationSeq& obs,
                                          int z, int cap = kDefaultMaskCap);

MomentTable moments(const Model& model, const ObservationSeq& obs, int cap = kDefaultMaskCap);

// Mask of token positions i with beta(w_i|z) > eps.
SubsetMask support(const Model& model, const ObservationSeq& obs, int z, double eps = 0.0);

}  // namespace dirmix
