#pragma once

// Robbins-Monro baseline for noisy root finding and the edge-sampling phase
// that informative-only schemes need before they can map signs to directions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "tsspl/environments.hpp"
#include "tsspl/random.hpp"

namespace tsspl {

struct SaState {
  double x = 0.5;
  /// Step scale: a_n = c / n.
  double c = 1.0;
  std::size_t n = 1;
  /// +1 when g is taken to be increasing.
  int sign_convention = 1;
  double margin = 0.001;
};

/// x_{n+1} = clamp(x_n - (c / n) * convention * y, margin, 1 - margin).
inline SaState sa_step(SaState state, double y_value) {
  const double step = state.c / static_cast<double>(state.n);
  state.x = std::clamp(state.x - step * state.sign_convention * y_value, state.margin, 1.0 - state.margin);
  ++state.n;
  return state;
}

/// Samples used by the direction-estimation phase unless configured
/// otherwise.
inline constexpr std::size_t kDefaultDirectionSamples = 62;

/// Smallest n with 2 exp(-2 n delta^2) <= 1 - confidence, i.e. the
/// two-sided Hoeffding sample count for estimating a mean to within delta.
inline std::size_t hoeffding_samples(double delta, double confidence) {
  if (!(delta > 0.0 && delta <= 0.5)) throw std::invalid_argument("delta must lie in (0, 0.5]");
  if (!(confidence >= 0.0 && confidence < 1.0)) throw std::invalid_argument("confidence must lie in [0, 1)");
  const double n = -std::log((1.0 - confidence) / 2.0) / (2.0 * delta * delta);
  // Shave rounding noise so exact integers are not bumped up by one.
  const double rounded = std::ceil(n - 1e-9);
  return rounded < 1.0 ? 1 : static_cast<std::size_t>(rounded);
}

/// Convention implied by a signed vote total taken at `x_edge`.
inline int direction_from_votes(long votes, double x_edge) noexcept {
  if (votes == 0) return 1;
  const int majority = votes > 0 ? 1 : -1;
  return x_edge < 0.5 ? -majority : majority;
}

/// Majority vote of `n` signs sampled at `x_edge`. At the left edge (below
/// the root) a negative majority means g is increasing; at the right edge a
/// positive one does. Returns the convention for srf_to_direction: +1 for
/// increasing g. Ties resolve to +1.
inline int estimate_direction(const RootOracle& oracle, double x_edge, std::size_t n, Rng& rng) {
  if (n == 0) throw std::invalid_argument("direction estimate needs at least one sample");
  long votes = 0;
  for (std::size_t i = 0; i < n; ++i) votes += srf_sample(oracle, x_edge, rng).s;
  return direction_from_votes(votes, x_edge);
}

}  // namespace tsspl
