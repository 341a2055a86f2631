#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "dirmix/errors.hpp"

namespace dirmix {

// A subset of observation positions {0,...,n-1} packed into a machine word.
// Bit i corresponds to position i.
using SubsetMask = std::uint64_t;

inline constexpr SubsetMask bit(int i) { return SubsetMask{1} << i; }

inline constexpr SubsetMask full_mask(int n) {
  return n == 0 ? 0 : ((SubsetMask{1} << n) - 1);
}

inline int popcount(SubsetMask m) { return std::popcount(m); }

// Largest n for which a dense 2^n table is allocated without explicit
// opt-in, and the hard limit that cannot be raised (128 MiB of doubles).
inline constexpr int kDefaultMaskCap = 20;
inline constexpr int kMaxMaskCap = 24;

// Throws CapacityError unless 0 <= n <= min(cap, kMaxMaskCap).
void check_mask_cap(int n, int cap = kDefaultMaskCap);

// Element of R[X_1,...,X_n]/(X_1^2,...,X_n^2): one coefficient per subset
// of positions, stored densely in mask order.
class TruncatedPoly {
 public:
  TruncatedPoly() : n_(0), coeff_(1, 1.0) {}

  static TruncatedPoly one(int n, int cap = kDefaultMaskCap);

  int vars() const { return n_; }
  std::size_t size() const { return coeff_.size(); }
  double operator[](SubsetMask m) const { return coeff_[m]; }
  double& operator[](SubsetMask m) { return coeff_[m]; }
  const std::vector<double>& coeff() const { return coeff_; }

  // In-place p *= (1 + c * X^J), J nonempty.  Destination masks are visited
  // in descending order so no slot is read after it has been written.
  void mul_affine(SubsetMask j, double c);

 private:
  int n_;
  std::vector<double> coeff_;
};

TruncatedPoly poly_one(int n, int cap = kDefaultMaskCap);
TruncatedPoly mul_affine(const TruncatedPoly& p, SubsetMask j, double c);

// Disjoint-subset convolution: r[M] = sum over A subset of M of p[A]*q[M\A].
TruncatedPoly poly_mul(const TruncatedPoly& p, const TruncatedPoly& q);

double coefficient(const TruncatedPoly& p, SubsetMask m);

// Keeps monomials M with required subset of M and M disjoint from forbidden,
// then divides by X^required.  The result involves only variables outside
// required | forbidden.
TruncatedPoly restrict_and_divide(const TruncatedPoly& p, SubsetMask required,
                                  SubsetMask forbidden);

}  // namespace dirmix
