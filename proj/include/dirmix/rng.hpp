#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dirmix {

// Deterministic, portable draws on top of std::mt19937_64 (whose output
// sequence is fixed by the C++ standard).  All transforms below are
// hand-rolled so results are bit-identical across platforms and standard
// library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() { return (static_cast<double>(gen_() >> 11) + 1.0) * 0x1p-53; }

  // Standard normal via the basic Box-Muller transform.
  double normal();

  // Gamma(shape, 1) via Marsaglia-Tsang, with the power boost for shape < 1.
  double gamma(double shape);

  // Dirichlet(alpha) by normalizing independent Gamma draws.
  std::vector<double> dirichlet(const std::vector<double>& alpha);

 private:
  std::mt19937_64 gen_;
};

}  // namespace dirmix
