#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tsspl {

/// Answer alphabet of a guard: where the target lies relative to the query.
enum class Direction { Left, Right };

inline Direction flip(Direction d) noexcept {
  return d == Direction::Left ? Direction::Right : Direction::Left;
}

inline std::string_view to_string(Direction d) noexcept {
  return d == Direction::Left ? "L" : "R";
}

/// Guards sit between adjacent doors; door queries sit on a door itself
/// (the midpoint of that door's cell, as probabilistic bisection uses).
/// Free queries are arbitrary points (the stochastic-approximation iterate,
/// the edge point of a direction-estimation phase).
enum class QueryKind { Guard, Door, Free };

struct QueryPoint {
  double position = 0.5;
  QueryKind kind = QueryKind::Guard;
  /// Guard index k (between doors k and k+1) or door index.
  std::size_t index = 0;

  friend bool operator==(const QueryPoint&, const QueryPoint&) = default;
};

/// One move of a policy: the query it sends and the point it is charged
/// regret for. Thompson sampling plays the sampled door and asks one of its
/// guards; the other policies play their query point.
struct Selection {
  QueryPoint query;
  double point = 0.5;
};

/// Raised when a run configuration names an unknown policy, environment or
/// function, or carries out-of-range parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tsspl
