#include "dirmix/model.hpp"

#include <cmath>
#include <string>

namespace dirmix {

Model::Model(std::vector<double> alpha, std::vector<std::vector<double>> beta_rows,
             bool algebraic)
    : algebraic_(algebraic), alpha_(std::move(alpha)) {
  m_ = static_cast<int>(alpha_.size());
  v_ = static_cast<int>(beta_rows.size());
  if (m_ < 1) throw DomainError("model: at least one cause is required");
  if (v_ < 1) throw DomainError("model: at least one vocabulary item is required");
  for (double a : alpha_) {
    if (!std::isfinite(a)) throw DomainError("model: alpha entries must be finite");
    if (!algebraic_ && a <= 0.0) {
      throw DomainError("model: alpha entries must be positive in statistical mode");
    }
    alpha_total_ += a;
  }
  beta_.reserve(static_cast<std::size_t>(v_) * m_);
  for (const auto& row : beta_rows) {
    if (static_cast<int>(row.size()) != m_) {
      throw DomainError("model: every beta row needs one entry per cause");
    }
    for (double b : row) {
      if (!std::isfinite(b) || b < 0.0) {
        throw DomainError("model: beta entries must be finite and non-negative");
      }
      beta_.push_back(b);
    }
  }
}

void validate_observations(const Model& model, const ObservationSeq& obs) {
  for (int t : obs.tokens) {
    if (t < 0 || t >= model.vocab_size()) {
      throw DomainError("observation index " + std::to_string(t) +
                        " outside the vocabulary of size " +
                        std::to_string(model.vocab_size()));
    }
  }
  if (obs.size() > 63) {
    throw CapacityError("more than 63 observation positions cannot be masked");
  }
}

std::vector<double> cause_subset_products(const Model& model, const ObservationSeq& obs,
                                          int z, int cap) {
  validate_observations(model, obs);
  if (z < 0 || z >= model.num_causes()) throw DomainError("cause index out of range");
  const int n = obs.size();
  check_mask_cap(n, cap);
  std::vector<double> prod(std::size_t{1} << n, 1.0);
  for (SubsetMask m = 1; m < prod.size(); ++m) {
    const SubsetMask low = m & (~m + 1);
    const int i = std::countr_zero(m);
    prod[m] = prod[m ^ low] * model.beta(obs.tokens[i], z);
  }
  return prod;
}

MomentTable moments(const Model& model, const ObservationSeq& obs, int cap) {
  validate_observations(model, obs);
  const int n = obs.size();
  check_mask_cap(n, cap);
  MomentTable table;
  table.n = n;
  table.values.assign(std::size_t{1} << n, 0.0);
  std::vector<double> prod(std::size_t{1} << n);
  for (int z = 0; z < model.num_causes(); ++z) {
    prod[0] = 1.0;
    for (SubsetMask m = 1; m < prod.size(); ++m) {
      const SubsetMask low = m & (~m + 1);
      const int i = std::countr_zero(m);
      prod[m] = prod[m ^ low] * model.beta(obs.tokens[i], z);
    }
    const double a = model.alpha(z);
    for (SubsetMask m = 0; m < prod.size(); ++m) {
      table.values[m] += a * prod[m];
    }
  }
  return table;
}

SubsetMask support(const Model& model, const ObservationSeq& obs, int z, double eps) {
  validate_observations(model, obs);
  if (z < 0 || z >= model.num_causes()) throw DomainError("cause index out of range");
  if (!(eps >= 0.0)) throw DomainError("support: eps must be non-negative");
  SubsetMask s = 0;
  for (int i = 0; i < obs.size(); ++i) {
    if (model.beta(obs.tokens[i], z) > eps) s |= bit(i);
  }
  return s;
}

}  // namespace dirmix
