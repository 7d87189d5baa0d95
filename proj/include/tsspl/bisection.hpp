#pragma once

// Probabilistic bisection with a known answer-noise level, plus the median
// query it shares with its marginalized variant.

#include <span>
#include <stdexcept>
#include <vector>

#include "tsspl/discrete.hpp"
#include "tsspl/types.hpp"

namespace tsspl {

/// Door query at the posterior median (smallest door with CDF >= 0.5).
inline QueryPoint pbs_next(std::span<const double> door_probs, std::span<const double> doors) {
  const std::size_t i = median_index(door_probs);
  return {doors[i], QueryKind::Door, i};
}

/// Bayes step assuming answers are correct with probability `p`: doors on
/// the side the answer points to are multiplied by p, doors on the other side
/// by 1 - p, a door at the query by 1/2; then renormalized.
inline void pbs_update_known(std::vector<double>& door_probs, std::span<const double> doors,
                             const QueryPoint& query, Direction answer, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("answer accuracy must lie in [0, 1]");
  if (door_probs.size() != doors.size()) throw std::invalid_argument("belief length does not match doors");
  const double x = query.position;
  const double left_factor = answer == Direction::Left ? p : 1.0 - p;
  const double right_factor = 1.0 - left_factor;
  for (std::size_t i = 0; i < doors.size(); ++i) {
    if (doors[i] < x) {
      door_probs[i] *= left_factor;
    } else if (doors[i] > x) {
      door_probs[i] *= right_factor;
    } else {
      door_probs[i] *= 0.5;
    }
  }
  normalize(door_probs);
}

}  // namespace tsspl
