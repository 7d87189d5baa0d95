#pragma once

#include <span>

#include "tsspl/discrete.hpp"
#include "tsspl/random.hpp"
#include "tsspl/solution_grid.hpp"
#include "tsspl/types.hpp"

namespace tsspl {

/// Chooses a guard next to `door`. The left guard (between door - 1 and
/// door) is weighted by the mass of those two doors, the right guard by the
/// mass of door and door + 1. Edge doors have a single guard and consume no
/// draw; interior doors consume one.
inline std::size_t adjacent_guard(std::span<const double> door_mass, std::size_t door, Rng& rng) {
  const std::size_t n = door_mass.size();
  if (door == 0) return 0;
  if (door + 1 == n) return n - 2;
  const double w_left = door_mass[door - 1] + door_mass[door];
  const double w_right = door_mass[door] + door_mass[door + 1];
  return uniform01(rng) * (w_left + w_right) < w_left ? door - 1 : door;
}

/// Thompson step: sample a door from the door marginal, then ask one of its
/// adjacent guards. The sampled door is the point played.
inline Selection ts_spl_next(const SolutionGrid& grid, Rng& rng) {
  const auto& mass = grid.door_marginal();
  const std::size_t door = sample_index(mass, rng);
  const std::size_t k = adjacent_guard(mass, door, rng);
  return {QueryPoint{guard_position(grid.doors(), k), QueryKind::Guard, k}, grid.doors()[door]};
}

inline void ts_spl_observe(SolutionGrid& grid, const QueryPoint& query, Direction answer) {
  grid.update(query, answer);
}

}  // namespace tsspl
