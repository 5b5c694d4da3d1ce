#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "warstats/fit.hpp"
#include "warstats/nls.hpp"

using namespace warstats;

namespace {

struct LinearModel {
  static constexpr std::size_t kParams = 1;
  using Params = std::array<double, 1>;
  double value(double x, const Params& p) const { return p[0] * x; }
  Params gradient(double x, const Params&) const { return {x}; }
};

// y = (p0 + p1) x: the normal equations are singular at zero damping.
struct RedundantModel {
  static constexpr std::size_t kParams = 2;
  using Params = std::array<double, 2>;
  double value(double x, const Params& p) const { return (p[0] + p[1]) * x; }
  Params gradient(double x, const Params&) const { return {x, x}; }
};

struct DecayModel {
  static constexpr std::size_t kParams = 3;
  using Params = std::array<double, 3>;
  double value(double x, const Params& p) const { return p[0] * std::exp(-p[1] * x) + p[2]; }
  Params gradient(double x, const Params& p) const {
    const double e = std::exp(-p[1] * x);
    return {e, -p[0] * x * e, 1.0};
  }
};

struct BlowsUp {
  static constexpr std::size_t kParams = 1;
  using Params = std::array<double, 1>;
  double value(double x, const Params& p) const { return std::log(p[0]) * x; }
  Params gradient(double x, const Params& p) const { return {x / p[0]}; }
};

}  // namespace

TEST(NlsSolve, LinearModelInAtMostTwoIterations) {
  const std::vector<double> xs = {1, 2, 3, 4, 5};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(2.75 * x);
  const auto r = nls_solve(LinearModel{}, {10.0}, xs, ys);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.iterations, 2);
  EXPECT_NEAR(r.params[0], 2.75, 1e-15);
}

TEST(NlsSolve, NanInitIsPreconditionError) {
  const std::vector<double> xs = {1, 2, 3};
  const std::vector<double> ys = {1, 2, 3};
  EXPECT_THROW(nls_solve(LinearModel{}, {std::numeric_limits<double>::quiet_NaN()}, xs, ys),
               std::invalid_argument);
}

TEST(NlsSolve, TooFewPoints) {
  const std::vector<double> xs = {1, 2};
  const std::vector<double> ys = {1, 2};
  EXPECT_THROW(nls_solve(DecayModel{}, {1.0, 1.0, 0.0}, xs, ys), std::invalid_argument);
}

TEST(NlsSolve, NonFiniteAtInitIsNumericError) {
  const std::vector<double> xs = {1, 2, 3};
  const std::vector<double> ys = {1, 2, 3};
  EXPECT_THROW(nls_solve(BlowsUp{}, {-1.0}, xs, ys), NumericError);
}

TEST(NlsSolve, SingularNormalEquationsHandledByDamping) {
  const std::vector<double> xs = {1, 2, 3, 4};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * x);
  const auto r = nls_solve(RedundantModel{}, {0.0, 0.0}, xs, ys);
  EXPECT_NEAR(r.params[0] + r.params[1], 3.0, 1e-9);
  EXPECT_LT(r.sse, 1e-15);
}

TEST(NlsSolve, NonlinearDecayFromRoughStart) {
  const DecayModel model;
  const DecayModel::Params truth = {2.5, 0.7, 0.3};
  std::vector<double> xs, ys;
  for (int i = 0; i < 40; ++i) {
    xs.push_back(0.25 * i);
    ys.push_back(model.value(xs.back(), truth));
  }
  const auto r = nls_solve(model, {1.0, 2.0, 0.0}, xs, ys);
  ASSERT_TRUE(r.converged);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(r.params[k], truth[k], 1e-8);
}

TEST(NlsSolve, NeverIncreasesSse) {
  const DecayModel model;
  std::mt19937_64 gen(17);
  std::normal_distribution<double> noise(0, 0.05);
  std::vector<double> xs, ys;
  for (int i = 0; i < 30; ++i) {
    xs.push_back(0.3 * i);
    ys.push_back(model.value(xs.back(), {1.5, 0.4, 0.1}) + noise(gen));
  }
  const DecayModel::Params init = {0.5, 1.5, -0.5};
  const double start = detail::sum_squares(model, init, xs, ys);
  for (int cap = 1; cap <= 30; ++cap) {
    const auto r = nls_solve(model, init, xs, ys, {.max_iterations = cap});
    const auto longer = nls_solve(model, init, xs, ys, {.max_iterations = cap + 1});
    ASSERT_LE(r.sse, start);
    ASSERT_LE(longer.sse, r.sse);
  }
}

TEST(NlsSolve, NoisyPowerLawExponentWithinTwoHundredths) {
  // 1% multiplicative noise, log-log least squares as the seed.
  const double a = 150.5, b = -0.5937;
  std::vector<double> xs;
  for (int k = 5; k <= 200; ++k) xs.push_back(1000.0 * k);
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> noise(0, 0.01);
    std::vector<double> ys;
    for (double x : xs) ys.push_back(a * std::pow(x, b) * (1 + noise(gen)));
    const auto init = loglog_power_law(xs, ys);
    const auto r = nls_solve(PowerLawModel{}, init.params(), xs, ys);
    EXPECT_TRUE(r.converged) << "seed " << seed;
    EXPECT_NEAR(r.params[1], b, 0.02) << "seed " << seed;
  }
}
