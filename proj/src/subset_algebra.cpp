#include "dirmix/subset_algebra.hpp"

#include <string>

namespace dirmix {

void check_mask_cap(int n, int cap) {
  if (cap > kMaxMaskCap) cap = kMaxMaskCap;
  if (n < 0 || n > cap) {
    throw CapacityError("dense table for n = " + std::to_string(n) +
                        " positions exceeds the mask cap " + std::to_string(cap));
  }
}

TruncatedPoly TruncatedPoly::one(int n, int cap) {
  check_mask_cap(n, cap);
  TruncatedPoly p;
  p.n_ = n;
  p.coeff_.assign(std::size_t{1} << n, 0.0);
  p.coeff_[0] = 1.0;
  return p;
}

void TruncatedPoly::mul_affine(SubsetMask j, double c) {
  if (j == 0) {
    throw DomainError("mul_affine: the affine factor index set must be nonempty");
  }
  if ((j & ~full_mask(n_)) != 0) {
    throw DomainError("mul_affine: index set outside the variable range");
  }
  const SubsetMask comp = full_mask(n_) & ~j;
  // Descending subsets of comp, so coeff[sub] is read before coeff[sub|j]
  // could overwrite it.
  SubsetMask sub = comp;
  for (;;) {
    coeff_[sub | j] += c * coeff_[sub];
    if (sub == 0) break;
    sub = (sub - 1) & comp;
  }
}

TruncatedPoly poly_one(int n, int cap) { return TruncatedPoly::one(n, cap); }

TruncatedPoly mul_affine(const TruncatedPoly& p, SubsetMask j, double c) {
  TruncatedPoly r = p;
  r.mul_affine(j, c);
  return r;
}

TruncatedPoly poly_mul(const TruncatedPoly& p, const TruncatedPoly& q) {
  if (p.vars() != q.vars()) {
    throw DomainError("poly_mul: operands have different variable counts");
  }
  TruncatedPoly r = TruncatedPoly::one(p.vars(), kMaxMaskCap);
  r[0] = 0.0;
  const SubsetMask full = full_mask(p.vars());
  for (SubsetMask m = 0;; ++m) {
    double acc = 0.0;
    SubsetMask sub = m;
    for (;;) {
      acc += p[sub] * q[m ^ sub];
      if (sub == 0) break;
      sub = (sub - 1) & m;
    }
    r[m] = acc;
    if (m == full) break;
  }
  return r;
}

double coefficient(const TruncatedPoly& p, SubsetMask m) {
  if ((m & ~full_mask(p.vars())) != 0) {
    throw DomainError("coefficient: mask outside the variable range");
  }
  return p[m];
}

TruncatedPoly restrict_and_divide(const TruncatedPoly& p, SubsetMask required,
                                  SubsetMask forbidden) {
  if ((required & forbidden) != 0) {
    throw DomainError("restrict_and_divide: required and forbidden masks overlap");
  }
  const SubsetMask full = full_mask(p.vars());
  if (((required | forbidden) & ~full) != 0) {
    throw DomainError("restrict_and_divide: masks outside the variable range");
  }
  TruncatedPoly r = TruncatedPoly::one(p.vars(), kMaxMaskCap);
  r[0] = 0.0;
  const SubsetMask comp = full & ~(required | forbidden);
  SubsetMask sub = comp;
  for (;;) {
    r[sub] = p[sub | required];
    if (sub == 0) break;
    sub = (sub - 1) & comp;
  }
  return r;
}

}  // namespace dirmix
