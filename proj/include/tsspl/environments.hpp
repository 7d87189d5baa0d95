#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "tsspl/random.hpp"
#include "tsspl/types.hpp"

namespace tsspl {

/// Hidden ground truth of a point-location instance: the target point and
/// the probability that a single directional answer is truthful.
struct SplEnvironment {
  double lambda_star = 0.5;
  double pi_star = 1.0;

  void validate() const {
    if (!(lambda_star >= 0.0 && lambda_star <= 1.0)) throw ConfigError("lambda-star must lie in [0, 1]");
    if (!(pi_star >= 0.0 && pi_star <= 1.0)) throw ConfigError("pi must lie in [0, 1]");
  }
};

/// Answers where lambda* lies relative to `x`, truthfully with probability
/// pi*. A query exactly on lambda* has no true side; its answer is a fair
/// coin (one extra draw).
inline Direction spl_query(const SplEnvironment& env, double x, Rng& rng) {
  Direction truth;
  if (env.lambda_star < x) {
    truth = Direction::Left;
  } else if (env.lambda_star > x) {
    truth = Direction::Right;
  } else {
    truth = bernoulli(rng, 0.5) ? Direction::Left : Direction::Right;
  }
  return bernoulli(rng, env.pi_star) ? truth : flip(truth);
}

enum class ShapeClass { MonotoneA, QuadricB, SinusoidC };

/// Noisy root-finding oracle: Y(x) = g(x) with probability pi, -g(x)
/// otherwise. g changes sign exactly once on (0, 1), at x_star.
struct RootOracle {
  std::function<double(double)> g;
  double x_star = 0.5;
  double pi = 1.0;
  ShapeClass shape = ShapeClass::MonotoneA;
};

struct SrfSample {
  double y = 0.0;
  int s = 1;
};

inline SrfSample srf_sample(const RootOracle& oracle, double x, Rng& rng) {
  const double gx = oracle.g(x);
  const double y = bernoulli(rng, oracle.pi) ? gx : -gx;
  if (y > 0.0) return {y, 1};
  if (y < 0.0) return {y, -1};
  return {y, bernoulli(rng, 0.5) ? 1 : -1};
}

/// Maps an observed sign to a direction under `convention`: Left iff
/// s * convention == +1. For increasing g the correct convention is +1
/// (a positive sample means the query is past the root).
inline Direction srf_to_direction(int s, int convention) {
  if (convention != 1 && convention != -1) throw std::invalid_argument("convention must be +1 or -1");
  if (s != 1 && s != -1) throw std::invalid_argument("sign must be +1 or -1");
  return s * convention == 1 ? Direction::Left : Direction::Right;
}

namespace benchmark_roots {
inline constexpr double kA = 0.07104;
inline constexpr double kB = 0.9270;
inline constexpr double kC = 0.8675;
}  // namespace benchmark_roots

/// Benchmark root-finding oracles A, B and C.
///
/// Only the roots and shape classes are fixed by the benchmark; the closed
/// forms are chosen to match them:
///   A(x) = tanh(4 (x - 0.07104))                 monotone increasing
///   B(x) = -0.8 (x - 0.9270) (x + 0.3)^2         rises then falls, root 0.9270
///   C(x) = sin(2.2 (0.8675 - x))                 sinusoid, decreasing through 0.8675
inline RootOracle benchmark_function(std::string_view id, double pi) {
  if (!(pi >= 0.0 && pi <= 1.0)) throw ConfigError("pi must lie in [0, 1]");
  using namespace benchmark_roots;
  if (id == "A" || id == "a") {
    return {[](double x) { return std::tanh(4.0 * (x - kA)); }, kA, pi, ShapeClass::MonotoneA};
  }
  if (id == "B" || id == "b") {
    return {[](double x) { return -0.8 * (x - kB) * (x + 0.3) * (x + 0.3); }, kB, pi,
            ShapeClass::QuadricB};
  }
  if (id == "C" || id == "c") {
    return {[](double x) { return std::sin(2.2 * (kC - x)); }, kC, pi, ShapeClass::SinusoidC};
  }
  throw std::invalid_argument("unknown benchmark function '" + std::string(id) + "' (expected A, B or C)");
}

}  // namespace tsspl
