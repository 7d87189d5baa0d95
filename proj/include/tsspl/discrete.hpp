#pragma once

// Small helpers over finite probability vectors shared by the grid and the
// policies: evenly spaced supports, normalization, inverse-CDF sampling and
// the leftward-tie median.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsspl/random.hpp"

namespace tsspl {

/// `n` evenly spaced points from `lo` to `hi` inclusive (n == 1 gives the midpoint).
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = 0.5 * (lo + hi);
    return out;
  }
  const double span = hi - lo;
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + span * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  out.back() = hi;
  return out;
}

/// Door layout on the unit line: d_i = i / (n - 1), endpoints included, so
/// every grid with n - 1 a multiple of 20 carries 0.05-step targets exactly.
inline std::vector<double> door_positions(std::size_t n) {
  if (n < 2) throw std::invalid_argument("door grid needs at least two doors");
  return linspace(0.0, 1.0, n);
}

/// Guard k sits halfway between doors k and k + 1.
inline double guard_position(std::span<const double> doors, std::size_t k) {
  return 0.5 * (doors[k] + doors[k + 1]);
}

/// Scales `w` to unit sum in place and returns the pre-scaling total.
inline double normalize(std::span<double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw std::invalid_argument("cannot normalize a vector with non-positive mass");
  }
  const double inv = 1.0 / total;
  for (double& v : w) v *= inv;
  return total;
}

/// Draws index i with probability w[i] / sum(w) using one uniform draw.
/// Weights need not be normalized.
inline std::size_t sample_index(std::span<const double> w, Rng& rng) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double target = uniform01(rng) * total;
  double cum = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    cum += w[i];
    last_positive = i;
    if (target < cum) return i;
  }
  // Rounding can leave target a hair above the final cumulative sum.
  return last_positive;
}

/// Smallest index whose cumulative mass reaches half of the total.
inline std::size_t median_index(std::span<const double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double half = 0.5 * total - 1e-12 * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    cum += w[i];
    if (cum >= half) return i;
  }
  return w.empty() ? 0 : w.size() - 1;
}

/// Mass of the entries whose support point lies in the closed interval
/// [lo, hi]. Endpoints get a 1e-12 slack so that targets such as 0.15 - 0.01
/// still include a point stored as 0.14.
inline double interval_mass(std::span<const double> points, std::span<const double> mass, double lo,
                            double hi) {
  if (hi < lo) return 0.0;
  constexpr double kSlack = 1e-12;
  const auto b = std::lower_bound(points.begin(), points.end(), lo - kSlack);
  const auto e = std::upper_bound(b, points.end(), hi + kSlack);
  double s = 0.0;
  for (auto it = b; it != e; ++it) s += mass[static_cast<std::size_t>(it - points.begin())];
  return s;
}

}  // namespace tsspl
