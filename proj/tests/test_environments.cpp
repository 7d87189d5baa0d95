#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "tsspl/environments.hpp"
#include "tsspl/types.hpp"

using namespace tsspl;

namespace {

double sign(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

}  // namespace

TEST(SplEnvironment, LieRateMatchesPi) {
  const SplEnvironment env{0.3, 0.8};
  Rng rng(10);
  const int n = 100000;
  int lies = 0;
  for (int i = 0; i < n; ++i) {
    const double x = uniform01(rng);
    if (x == env.lambda_star) continue;
    const Direction truth = env.lambda_star < x ? Direction::Left : Direction::Right;
    lies += spl_query(env, x, rng) != truth ? 1 : 0;
  }
  EXPECT_NEAR(lies / static_cast<double>(n), 0.2, 4 * std::sqrt(0.16 / n));
}

TEST(SplEnvironment, DeterministicWhenFullyTruthfulOrDeceptive) {
  Rng rng(1);
  EXPECT_EQ(spl_query({0.3, 1.0}, 0.5, rng), Direction::Left);
  EXPECT_EQ(spl_query({0.3, 1.0}, 0.1, rng), Direction::Right);
  EXPECT_EQ(spl_query({0.3, 0.0}, 0.5, rng), Direction::Right);
}

TEST(SplEnvironment, QueryAtTargetIsAFairCoin) {
  Rng rng(2);
  const int n = 40000;
  int left = 0;
  for (int i = 0; i < n; ++i) left += spl_query({0.5, 0.9}, 0.5, rng) == Direction::Left ? 1 : 0;
  EXPECT_NEAR(left / static_cast<double>(n), 0.5, 4 * std::sqrt(0.25 / n));
}

TEST(SplEnvironment, Validation) {
  EXPECT_NO_THROW((SplEnvironment{0.5, 0.5}.validate()));
  EXPECT_THROW((SplEnvironment{1.5, 0.8}.validate()), ConfigError);
  EXPECT_THROW((SplEnvironment{0.5, -0.1}.validate()), ConfigError);
}

TEST(BenchmarkFunctions, SingleSignChangeAtStatedRoot) {
  for (const char* id : {"A", "B", "C"}) {
    const RootOracle f = benchmark_function(id, 1.0);
    const int points = 10000;
    int changes = 0;
    double where = -1.0;
    double prev = sign(f.g(0.5 / points));
    for (int i = 1; i < points; ++i) {
      const double x = (i + 0.5) / points;
      const double s = sign(f.g(x));
      if (s != prev) {
        ++changes;
        where = x;
      }
      prev = s;
    }
    EXPECT_EQ(changes, 1) << id;
    EXPECT_LE(std::fabs(where - f.x_star), 1.0 / points) << id;
    EXPECT_NE(sign(f.g(f.x_star - 1e-6)), sign(f.g(f.x_star + 1e-6))) << id;
  }
  EXPECT_DOUBLE_EQ(benchmark_function("A", 1.0).x_star, 0.07104);
  EXPECT_DOUBLE_EQ(benchmark_function("B", 1.0).x_star, 0.9270);
  EXPECT_DOUBLE_EQ(benchmark_function("C", 1.0).x_star, 0.8675);
}

TEST(BenchmarkFunctions, Shapes) {
  const RootOracle a = benchmark_function("a", 1.0);
  EXPECT_LT(a.g(0.05), 0.0);
  EXPECT_GT(a.g(0.1), 0.0);
  for (int i = 1; i < 100; ++i) EXPECT_GT(a.g(i / 100.0), a.g((i - 1) / 100.0));
  const RootOracle b = benchmark_function("B", 1.0);
  EXPECT_NE(sign(b.g(0.5)), sign(b.g(0.99)));
  EXPECT_EQ(b.shape, ShapeClass::QuadricB);
  EXPECT_EQ(benchmark_function("C", 1.0).shape, ShapeClass::SinusoidC);
  EXPECT_THROW(benchmark_function("D", 1.0), std::invalid_argument);
}

TEST(SrfSample, NoiseFlipsSignOnly) {
  const RootOracle a = benchmark_function("A", 0.7);
  Rng rng(4);
  const double x = 0.6;
  const double m = std::fabs(a.g(x));
  int flipped = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    const SrfSample s = srf_sample(a, x, rng);
    ASSERT_DOUBLE_EQ(std::fabs(s.y), m);
    ASSERT_EQ(static_cast<double>(s.s), sign(s.y));
    flipped += s.s < 0 ? 1 : 0;
  }
  EXPECT_NEAR(flipped / static_cast<double>(n), 0.3, 4 * std::sqrt(0.21 / n));

  const RootOracle exact = benchmark_function("A", 1.0);
  EXPECT_EQ(srf_sample(exact, 0.5, rng).s, 1);
}

TEST(SrfToDirection, Convention) {
  EXPECT_EQ(srf_to_direction(1, 1), Direction::Left);
  EXPECT_EQ(srf_to_direction(1, -1), Direction::Right);
  EXPECT_EQ(srf_to_direction(-1, 1), Direction::Right);
  EXPECT_EQ(srf_to_direction(-1, -1), Direction::Left);
  EXPECT_THROW(srf_to_direction(1, 0), std::invalid_argument);
}

TEST(SrfToDirection, CorrectConventionGivesSplEnvironment) {
  // Composing sampling with the right convention yields directional answers
  // that are truthful with probability pi; the wrong convention yields 1 - pi.
  const double pi = 0.75;
  const RootOracle c = benchmark_function("C", pi);  // decreasing through its root
  const SplEnvironment spl{c.x_star, pi};
  Rng rng(8);
  const int n = 100000;
  int srf_left = 0;
  int spl_left = 0;
  int wrong_left = 0;
  for (int i = 0; i < n; ++i) {
    const double x = 0.6;
    srf_left += srf_to_direction(srf_sample(c, x, rng).s, -1) == Direction::Left ? 1 : 0;
    wrong_left += srf_to_direction(srf_sample(c, x, rng).s, 1) == Direction::Left ? 1 : 0;
    spl_left += spl_query(spl, x, rng) == Direction::Left ? 1 : 0;
  }
  // x = 0.6 lies left of the root, so the truthful answer is Right.
  const double se = std::sqrt(2 * 0.1875 / n);
  EXPECT_NEAR(srf_left / static_cast<double>(n), spl_left / static_cast<double>(n), 4 * se);
  EXPECT_NEAR(spl_left / static_cast<double>(n), 1 - pi, 4 * std::sqrt(0.1875 / n));
  EXPECT_NEAR(wrong_left / static_cast<double>(n), pi, 4 * std::sqrt(0.1875 / n));
}
