#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "dirmix/dense_inference.hpp"
#include "test_support.hpp"

using namespace dirmix;
using testsupport::rel_close;
using testsupport::subdivided_toy_model;
using testsupport::toy_model;
using testsupport::toy_obs;

// Exact rational values for the toy tables, derived by hand from
// <beta_J> = {4/75, 1/20, 59/30000} and the partition sum p~ = 139/30000.
namespace golden {
constexpr double kPtildeThird = 139.0 / 30000.0;
constexpr double kThetaThird[3] = {46.0 / 139.0, 148.0 / 417.0, 131.0 / 417.0};
constexpr double kThetaOne[3] = {502.0 / 1495.0, 504.0 / 1495.0, 489.0 / 1495.0};
constexpr double kThetaSub[4] = {23.0 / 139.0, 23.0 / 139.0, 148.0 / 417.0, 131.0 / 417.0};
}  // namespace golden

TEST_CASE("pochhammer rising factorial") {
  CHECK(pochhammer(5.3, 0) == 1.0);
  CHECK(pochhammer(2.0, 3) == 24.0);
  CHECK(pochhammer(-1.0, 2) == 0.0);
  CHECK(pochhammer(0.5, 2) == doctest::Approx(0.75));
}

TEST_CASE("ptilde_all coefficients") {
  const TruncatedPoly pt = ptilde_all(toy_model(), toy_obs());
  CHECK(pt[0] == 1.0);  // p~(empty) is exactly one
  CHECK(rel_close(pt[0b11], golden::kPtildeThird, 1e-12));

  // Single observation: the only nonempty factor contributes <beta_{1}>.
  const Model model = toy_model();
  const ObservationSeq one_obs{{0}};
  const TruncatedPoly pt1 = ptilde_all(model, one_obs);
  CHECK(rel_close(pt1[bit(0)], 0.16 / 3, 1e-12));

  CHECK_THROWS_AS(ptilde_all(toy_model(), ObservationSeq{{0, 1}}, 1), CapacityError);
}

TEST_CASE("ptilde_all accepts algebraic-mode models") {
  // n = m = 2, alpha = -1, all-ones beta: p~(W) = (-2) + (-2)(-2) = 2.
  const Model model({-1.0, -1.0}, {{1.0, 1.0}, {1.0, 1.0}}, true);
  const TruncatedPoly pt = ptilde_all(model, ObservationSeq{{0, 1}});
  CHECK(rel_close(pt[0b11], 2.0, 1e-12));
}

TEST_CASE("probability normalizes by the Pochhammer symbol") {
  CHECK(rel_close(probability(toy_model(), toy_obs()), golden::kPtildeThird / 2.0, 1e-12));
  CHECK(probability(toy_model(), ObservationSeq{}) == 1.0);

  // One cause: the mixture is deterministic and the prior cancels.
  const Model single({0.37}, {{0.2}, {0.5}});
  const ObservationSeq obs{{0, 1, 1}};
  CHECK(rel_close(probability(single, obs), 0.2 * 0.5 * 0.5, 1e-12));

  const Model algebraic({-1.0}, {{0.5}}, true);
  CHECK_THROWS_AS(probability(algebraic, ObservationSeq{{0}}), DomainError);
}

TEST_CASE("posterior mean reproduces the toy tables") {
  const InferenceResult third = posterior_mean(toy_model(), toy_obs());
  for (int z = 0; z < 3; ++z) {
    CHECK(rel_close(third.theta_mean[z], golden::kThetaThird[z], 1e-12));
  }
  CHECK(rel_close(third.probability, golden::kPtildeThird / 2.0, 1e-12));
  CHECK(rel_close(third.probability, third.ptilde_full / pochhammer(1.0, 2), 1e-12));

  const InferenceResult one = posterior_mean(toy_model(1.0), toy_obs());
  for (int z = 0; z < 3; ++z) {
    CHECK(rel_close(one.theta_mean[z], golden::kThetaOne[z], 1e-12));
  }

  const InferenceResult sub = posterior_mean(subdivided_toy_model(), toy_obs());
  for (int z = 0; z < 4; ++z) {
    CHECK(rel_close(sub.theta_mean[z], golden::kThetaSub[z], 1e-12));
  }
}

TEST_CASE("posterior mean with no observations is the prior mean") {
  const Model model({0.2, 0.5, 1.3}, {{0.1, 0.2, 0.3}});
  const InferenceResult r = posterior_mean(model, ObservationSeq{});
  for (int z = 0; z < 3; ++z) {
    CHECK(r.theta_mean[z] == model.alpha(z) / model.alpha_total());
  }
  CHECK(r.probability == 1.0);
}

TEST_CASE("posterior mean rejects impossible evidence and algebraic mode") {
  const Model impossible({1.0, 1.0}, {{0.0, 0.0}, {0.5, 0.5}});
  CHECK_THROWS_AS(posterior_mean(impossible, ObservationSeq{{0}}), DegenerateEvidenceError);
  const Model algebraic({-1.0, -1.0}, {{1.0, 1.0}, {1.0, 1.0}}, true);
  CHECK_THROWS_AS(posterior_mean(algebraic, ObservationSeq{{0, 1}}), DomainError);
}

TEST_CASE("posterior means are a probability vector") {
  std::mt19937_64 g(31);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = testsupport::random_instance(g, 8, 16);
    const InferenceResult r = posterior_mean(inst.model, inst.obs);
    double total = 0.0;
    for (const double t : r.theta_mean) {
      CHECK(t >= 0.0);
      CHECK(t <= 1.0 + 1e-12);
      total += t;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("probability and posterior are invariant under observation shuffles") {
  std::mt19937_64 g(37);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testsupport::random_instance(g, 7, 8);
    ObservationSeq shuffled = inst.obs;
    std::shuffle(shuffled.tokens.begin(), shuffled.tokens.end(), g);
    const InferenceResult a = posterior_mean(inst.model, inst.obs);
    const InferenceResult b = posterior_mean(inst.model, shuffled);
    CHECK(rel_close(a.probability, b.probability, 1e-12));
    for (int z = 0; z < inst.model.num_causes(); ++z) {
      CHECK(rel_close(a.theta_mean[z], b.theta_mean[z], 1e-12));
    }
  }
}

TEST_CASE("splitting a cause in two equal halves changes nothing observable") {
  std::mt19937_64 g(41);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testsupport::random_instance(g, 6, 6);
    const int m = inst.model.num_causes();
    const int split = static_cast<int>(g() % m);
    const double frac = 0.1 + 0.8 * unit(g);

    std::vector<double> alpha;
    std::vector<std::vector<double>> beta(inst.model.vocab_size());
    for (int z = 0; z < m; ++z) {
      if (z == split) {
        alpha.push_back(inst.model.alpha(z) * frac);
        alpha.push_back(inst.model.alpha(z) * (1.0 - frac));
      } else {
        alpha.push_back(inst.model.alpha(z));
      }
    }
    for (int v = 0; v < inst.model.vocab_size(); ++v) {
      for (int z = 0; z < m; ++z) {
        beta[v].push_back(inst.model.beta(v, z));
        if (z == split) beta[v].push_back(inst.model.beta(v, z));
      }
    }
    const Model wide(alpha, beta);

    const InferenceResult before = posterior_mean(inst.model, inst.obs);
    const InferenceResult after = posterior_mean(wide, inst.obs);
    CHECK(rel_close(before.probability, after.probability, 1e-12));
    int zw = 0;
    for (int z = 0; z < m; ++z, ++zw) {
      if (z == split) {
        CHECK(rel_close(before.theta_mean[z], after.theta_mean[zw] + after.theta_mean[zw + 1],
                        1e-12));
        ++zw;
      } else {
        CHECK(rel_close(before.theta_mean[z], after.theta_mean[zw], 1e-12));
      }
    }
  }
}

TEST_CASE("a virtual observation turns the posterior mean into a ratio") {
  std::mt19937_64 g(43);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = testsupport::random_instance(g, 6, 6);
    const int m = inst.model.num_causes();
    const int target = static_cast<int>(g() % m);

    std::vector<std::vector<double>> beta(inst.model.vocab_size() + 1);
    for (int v = 0; v < inst.model.vocab_size(); ++v) {
      for (int z = 0; z < m; ++z) beta[v].push_back(inst.model.beta(v, z));
    }
    for (int z = 0; z < m; ++z) beta.back().push_back(z == target ? 1.0 : 0.0);
    const Model extended(inst.model.alpha(), beta);

    ObservationSeq with_virtual = inst.obs;
    with_virtual.tokens.push_back(inst.model.vocab_size());

    const double p_plain = probability(extended, inst.obs);
    const InferenceResult r = posterior_mean(extended, inst.obs);
    const double p_virtual = probability(extended, with_virtual);
    CHECK(rel_close(p_virtual / p_plain, r.theta_mean[target], 1e-10));
  }
}
