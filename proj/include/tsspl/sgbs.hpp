#pragma once

// Soft-decision generalized binary search over threshold hypotheses.
//
// Hypothesis i says the target is door i; as a classifier it labels a query
// x with h_i(x) = +1 when x lies right of door i (answer "Left") and -1 when
// x lies left of it.

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "tsspl/discrete.hpp"
#include "tsspl/types.hpp"

namespace tsspl {

struct SgbsState {
  std::vector<double> doors;
  std::vector<double> hypothesis_probs;
  /// Assumed probability that an answer is wrong, in [0, 0.5).
  double assumed_beta = 0.0;
};

inline int hypothesis_label(double door, double x) noexcept {
  return x > door ? 1 : (x < door ? -1 : 0);
}

/// Answer as a +-1 label: +1 for "Left" (query right of the target).
inline int answer_label(Direction answer) noexcept { return answer == Direction::Left ? 1 : -1; }

/// |sum_h p(h) h(x)|; for thresholds this equals |2 CDF(x) - 1|.
inline double sgbs_objective(std::span<const double> probs, std::span<const double> doors, double x) {
  double s = 0.0;
  for (std::size_t i = 0; i < doors.size(); ++i) s += probs[i] * hypothesis_label(doors[i], x);
  return std::fabs(s);
}

/// Candidate with the smallest objective; ties go to the earliest candidate,
/// which for candidates in increasing order is the smallest position.
inline QueryPoint sgbs_next(std::span<const double> probs, std::span<const double> doors,
                            std::span<const QueryPoint> candidates) {
  if (candidates.empty()) throw std::invalid_argument("no candidate queries");
  if (probs.size() != doors.size()) throw std::invalid_argument("belief length does not match doors");
  // Prefix and suffix sums turn each objective into two lookups. The
  // suffix is accumulated separately so that a tiny tail mass survives even
  // when the objective itself rounds to 1.
  const std::size_t n = doors.size();
  std::vector<double> prefix(n + 1, 0.0);
  std::vector<double> suffix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + probs[i];
  for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + probs[i];
  const double total = prefix.back();
  const double median = doors[median_index(probs)];

  // Rounding ties on the objective are resolved by the larger minority mass
  // (the exact-arithmetic minimizer), exact ties by distance to the median
  // door, and remaining ties by the smallest position.
  std::size_t best = 0;
  double best_value = 0.0;
  double best_minority = 0.0;
  double best_distance = 0.0;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const double x = candidates[c].position;
    const auto below = static_cast<std::size_t>(std::lower_bound(doors.begin(), doors.end(), x) - doors.begin());
    const auto not_above = static_cast<std::size_t>(std::upper_bound(doors.begin(), doors.end(), x) - doors.begin());
    const double lo = prefix[below];
    const double hi = suffix[not_above];
    const double value = std::fabs(lo - hi);
    const double minority = std::min(lo, hi);
    const double distance = std::fabs(x - median);
    bool better = c == 0 || value < best_value - 1e-12 * total;
    if (!better && value <= best_value + 1e-12 * total) {
      if (minority > best_minority * (1.0 + 1e-9)) {
        better = true;
      } else if (minority >= best_minority * (1.0 - 1e-9) && distance < best_distance - 1e-12) {
        better = true;
      }
    }
    if (better) {
      best = c;
      best_value = value;
      best_minority = minority;
      best_distance = distance;
    }
  }
  return candidates[best];
}

/// All guards of a door grid, in increasing order.
inline std::vector<QueryPoint> guard_queries(std::span<const double> doors) {
  std::vector<QueryPoint> out;
  out.reserve(doors.size() - 1);
  for (std::size_t k = 0; k + 1 < doors.size(); ++k) {
    out.push_back({guard_position(doors, k), QueryKind::Guard, k});
  }
  return out;
}

/// Hypotheses whose label agrees with the answer are multiplied by
/// 1 - beta, the rest by beta (a hypothesis sitting exactly on the query
/// carries no label and gets 1/2); then renormalized.
inline void sgbs_update_known(SgbsState& state, const QueryPoint& query, Direction answer, double beta) {
  if (!(beta >= 0.0 && beta < 0.5)) throw std::invalid_argument("beta must lie in [0, 0.5)");
  const int y = answer_label(answer);
  for (std::size_t i = 0; i < state.doors.size(); ++i) {
    const int z = hypothesis_label(state.doors[i], query.position) * y;
    state.hypothesis_probs[i] *= z > 0 ? 1.0 - beta : (z < 0 ? beta : 0.5);
  }
  normalize(state.hypothesis_probs);
}

inline void sgbs_update_known(SgbsState& state, const QueryPoint& query, Direction answer) {
  sgbs_update_known(state, query, answer, state.assumed_beta);
}

}  // namespace tsspl
