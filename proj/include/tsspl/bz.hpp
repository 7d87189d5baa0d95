#pragma once

// Burnashev-Zigangirov bisection over bins.
//
// Bins are the doors of the grid; boundary k is the guard between bins k and
// k + 1 (0-based), so bins 0..k lie left of it.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsspl/discrete.hpp"
#include "tsspl/random.hpp"
#include "tsspl/types.hpp"

namespace tsspl {

struct BzState {
  std::vector<double> doors;
  std::vector<double> bin_probs;
  /// Assumed answer-error probability, in [0, 0.5].
  double assumed_alpha = 0.0;
};

/// Boundary index for a median-bracketing query. If the CDF hits 1/2 exactly
/// on a boundary, that boundary is returned. Otherwise the two closest
/// boundaries to the median (the edges of the median bin, or the two nearest
/// interior boundaries when the median bin touches the end of the line) are
/// chosen between uniformly. Always consumes exactly one uniform draw.
inline std::size_t bz_next_boundary(std::span<const double> bin_probs, Rng& rng) {
  const std::size_t m = bin_probs.size();
  if (m < 2) throw std::invalid_argument("BZ needs at least two bins");
  const double u = uniform01(rng);

  double total = 0.0;
  for (double a : bin_probs) total += a;
  const std::size_t med = median_index(bin_probs);
  double cdf = 0.0;
  for (std::size_t i = 0; i <= med; ++i) cdf += bin_probs[i];
  if (med + 1 < m && std::fabs(cdf - 0.5 * total) <= 1e-12 * total) return med;

  // Edges of bin `med` are boundaries med - 1 and med; the outer edges of
  // the first and last bins are not queryable.
  std::size_t lo;
  std::size_t hi;
  if (med == 0) {
    lo = 0;
    hi = m > 2 ? 1 : 0;
  } else if (med + 1 == m) {
    hi = m - 2;
    lo = m > 2 ? m - 3 : m - 2;
  } else {
    lo = med - 1;
    hi = med;
  }
  return u < 0.5 ? lo : hi;
}

inline QueryPoint bz_next(const BzState& state, Rng& rng) {
  const std::size_t k = bz_next_boundary(state.bin_probs, rng);
  return {guard_position(state.doors, k), QueryKind::Guard, k};
}

/// Response Y = 1{X >= theta*}: the query is at or right of the target,
/// i.e. the answer points left.
inline int bz_response(Direction answer) noexcept { return answer == Direction::Left ? 1 : 0; }

/// Multiplicative update with the normalizer folded in. With
/// tau = 2 A(k) - 1 and beta = 1 - alpha, bins i <= k are scaled by
/// 2 alpha / (1 - tau (beta - alpha)) when Y = 0 and by
/// 2 beta / (1 + tau (beta - alpha)) when Y = 1; bins i > k take the
/// complementary factors.
inline void bz_update_known(std::vector<double>& bin_probs, std::size_t k, int y, double alpha) {
  if (k + 1 >= bin_probs.size()) throw std::invalid_argument("boundary index out of range");
  if (y != 0 && y != 1) throw std::invalid_argument("BZ response must be 0 or 1");
  if (!(alpha >= 0.0 && alpha <= 0.5)) throw std::invalid_argument("alpha must lie in [0, 0.5]");
  const double beta = 1.0 - alpha;
  double cdf = 0.0;
  for (std::size_t i = 0; i <= k; ++i) cdf += bin_probs[i];
  const double tau = 2.0 * cdf - 1.0;
  const double gap = beta - alpha;

  const double denom = y == 0 ? 1.0 - tau * gap : 1.0 + tau * gap;
  if (!(denom > 0.0)) throw std::domain_error("answer contradicts a noiseless belief");
  double left;
  double right;
  if (y == 0) {
    left = 2.0 * alpha / denom;
    right = 2.0 * beta / denom;
  } else {
    left = 2.0 * beta / denom;
    right = 2.0 * alpha / denom;
  }
  for (std::size_t i = 0; i < bin_probs.size(); ++i) bin_probs[i] *= i <= k ? left : right;
}

inline void bz_update_known(BzState& state, std::size_t k, Direction answer) {
  bz_update_known(state.bin_probs, k, bz_response(answer), state.assumed_alpha);
}

}  // namespace tsspl
