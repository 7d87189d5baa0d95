#pragma once

// One sequential contract over every query policy, so the harness can step
// any of them: next() proposes a move from the current belief, observe()
// folds in the environment's answer. Policies never see the hidden
// parameters of the environment.

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tsspl/bisection.hpp"
#include "tsspl/bz.hpp"
#include "tsspl/sgbs.hpp"
#include "tsspl/solution_grid.hpp"
#include "tsspl/stochastic_approximation.hpp"
#include "tsspl/ts_spl.hpp"
#include "tsspl/types.hpp"

namespace tsspl {

enum class PolicyId { TsSpl, TsSplInf, Pbs, PbsM, Sgbs, SgbsM, Bz, BzM, Sa };

inline constexpr std::array<PolicyId, 9> kAllPolicies = {
    PolicyId::TsSpl, PolicyId::TsSplInf, PolicyId::Pbs, PolicyId::PbsM, PolicyId::Sgbs,
    PolicyId::SgbsM, PolicyId::Bz,       PolicyId::BzM, PolicyId::Sa};

inline std::string_view policy_name(PolicyId id) noexcept {
  switch (id) {
    case PolicyId::TsSpl: return "ts-spl";
    case PolicyId::TsSplInf: return "ts-spl-inf";
    case PolicyId::Pbs: return "pbs";
    case PolicyId::PbsM: return "pbs-m";
    case PolicyId::Sgbs: return "sgbs";
    case PolicyId::SgbsM: return "sgbs-m";
    case PolicyId::Bz: return "bz";
    case PolicyId::BzM: return "bz-m";
    case PolicyId::Sa: return "sa";
  }
  return "?";
}

inline PolicyId parse_policy(std::string_view name) {
  for (PolicyId id : kAllPolicies) {
    if (policy_name(id) == name) return id;
  }
  // The marginalized SGBS is also known as NGBS-M.
  if (name == "ngbs-m") return PolicyId::SgbsM;
  if (name == "ngbs") return PolicyId::Sgbs;
  throw ConfigError("unknown policy '" + std::string(name) + "'");
}

/// Policies that keep a joint (door, truth) grid.
inline bool uses_grid(PolicyId id) noexcept {
  return id == PolicyId::TsSpl || id == PolicyId::TsSplInf || id == PolicyId::PbsM ||
         id == PolicyId::SgbsM || id == PolicyId::BzM;
}

/// Policies with a fixed answer-noise level supplied up front.
inline bool uses_known_noise(PolicyId id) noexcept {
  return id == PolicyId::Pbs || id == PolicyId::Sgbs || id == PolicyId::Bz;
}

/// Policies that can only follow informative feedback and so need the
/// direction-estimation phase before root finding. TS-SPL learns the sign
/// mapping itself; SA assumes an increasing function.
inline bool needs_direction_phase(PolicyId id) noexcept {
  return id != PolicyId::TsSpl && id != PolicyId::Sa;
}

/// What the environment returned for one query: the direction, plus the
/// signed magnitude that stochastic approximation steps on (+-1 for pure
/// directional feedback, Y(x) for root finding).
struct Observation {
  Direction direction = Direction::Left;
  double value = 1.0;
};

class Policy {
 public:
  virtual ~Policy() = default;

  [[nodiscard]] virtual PolicyId id() const noexcept = 0;
  [[nodiscard]] virtual Selection next(Rng& rng) const = 0;
  virtual void observe(const QueryPoint& query, const Observation& obs) = 0;

  /// Current belief over the door grid; empty when the policy keeps none.
  [[nodiscard]] virtual std::span<const double> door_belief() const noexcept = 0;
  [[nodiscard]] virtual std::span<const double> doors() const noexcept = 0;
  [[nodiscard]] virtual const SolutionGrid* grid() const noexcept { return nullptr; }
};

// --- grid-posterior policies -------------------------------------------------

class GridPolicy : public Policy {
 public:
  explicit GridPolicy(SolutionGrid grid) : grid_(std::move(grid)) {}

  void observe(const QueryPoint& query, const Observation& obs) override {
    grid_.update(query, obs.direction);
  }
  [[nodiscard]] std::span<const double> door_belief() const noexcept override {
    return grid_.door_marginal();
  }
  [[nodiscard]] std::span<const double> doors() const noexcept override { return grid_.doors(); }
  [[nodiscard]] const SolutionGrid* grid() const noexcept override { return &grid_; }

 protected:
  SolutionGrid grid_;
};

/// Thompson sampling over the joint grid. The informative variant differs
/// only in the truth grid it is built with.
class TsSplPolicy final : public GridPolicy {
 public:
  TsSplPolicy(SolutionGrid grid, bool informative)
      : GridPolicy(std::move(grid)), informative_(informative) {}

  [[nodiscard]] PolicyId id() const noexcept override {
    return informative_ ? PolicyId::TsSplInf : PolicyId::TsSpl;
  }
  [[nodiscard]] Selection next(Rng& rng) const override { return ts_spl_next(grid_, rng); }

 private:
  bool informative_;
};

/// Posterior-median door queries on the marginalized grid.
class PbsMPolicy final : public GridPolicy {
 public:
  using GridPolicy::GridPolicy;
  [[nodiscard]] PolicyId id() const noexcept override { return PolicyId::PbsM; }
  [[nodiscard]] Selection next(Rng&) const override {
    const QueryPoint q = pbs_next(grid_.door_marginal(), grid_.doors());
    return {q, q.position};
  }
};

/// Guard minimizing |sum_h p(h) h(x)| under the door marginal.
class SgbsMPolicy final : public GridPolicy {
 public:
  explicit SgbsMPolicy(SolutionGrid grid)
      : GridPolicy(std::move(grid)), candidates_(guard_queries(grid_.doors())) {}
  [[nodiscard]] PolicyId id() const noexcept override { return PolicyId::SgbsM; }
  [[nodiscard]] Selection next(Rng&) const override {
    const QueryPoint q = sgbs_next(grid_.door_marginal(), grid_.doors(), candidates_);
    return {q, q.position};
  }

 private:
  std::vector<QueryPoint> candidates_;
};

/// One of the two guards closest to the median of the door marginal.
class BzMPolicy final : public GridPolicy {
 public:
  using GridPolicy::GridPolicy;
  [[nodiscard]] PolicyId id() const noexcept override { return PolicyId::BzM; }
  [[nodiscard]] Selection next(Rng& rng) const override {
    const std::size_t k = bz_next_boundary(grid_.door_marginal(), rng);
    const QueryPoint q{guard_position(grid_.doors(), k), QueryKind::Guard, k};
    return {q, q.position};
  }
};

// --- known-noise policies ----------------------------------------------------

class PbsPolicy final : public Policy {
 public:
  PbsPolicy(std::vector<double> doors, double p)
      : doors_(std::move(doors)), probs_(doors_.size(), 1.0 / static_cast<double>(doors_.size())), p_(p) {}

  [[nodiscard]] PolicyId id() const noexcept override { return PolicyId::Pbs; }
  [[nodiscard]] Selection next(Rng&) const override {
    const QueryPoint q = pbs_next(probs_, doors_);
    return {q, q.position};
  }
  void observe(const QueryPoint& query, const Observation& obs) override {
    pbs_update_known(probs_, doors_, query, obs.direction, p_);
  }
  [[nodiscard]] std::span<const double> door_belief() const noexcept override { return probs_; }
  [[nodiscard]] std::span<const double> doors() const noexcept override { return doors_; }

 private:
  std::vector<double> doors_;
  std::vector<double> probs_;
  double p_;
};

class SgbsPolicy final : public Policy {
 public:
  SgbsPolicy(std::vector<double> doors, double beta) : candidates_(guard_queries(doors)) {
    const std::size_t n = doors.size();
    state_ = SgbsState{std::move(doors), std::vector<double>(n, 1.0 / static_cast<double>(n)), beta};
  }

  [[nodiscard]] PolicyId id() const noexcept override { return PolicyId::Sgbs; }
  [[nodiscard]] Selection next(Rng&) const override {
    const QueryPoint q = sgbs_next(state_.hypothesis_probs, state_.doors, candidates_);
    return {q, q.position};
  }
  void observe(const QueryPoint& query, const Observation& obs) override {
    sgbs_update_known(state_, query, obs.direction);
  }
  [[nodiscard]] std::span<const double> door_belief() const noexcept override {
    return state_.hypothesis_probs;
  }
  [[nodiscard]] std::span<const double> doors() const noexcept override { return state_.doors; }

 private:
  SgbsState state_;
  std::vector<QueryPoint> candidates_;
};

class BzPolicy final : public Policy {
 public:
  BzPolicy(std::vector<double> doors, double alpha) {
    const std::size_t n = doors.size();
    state_ = BzState{std::move(doors), std::vector<double>(n, 1.0 / static_cast<double>(n)), alpha};
  }

  [[nodiscard]] PolicyId id() const noexcept override { return PolicyId::Bz; }
  [[nodiscard]] Selection next(Rng& rng) const override {
    const QueryPoint q = bz_next(state_, rng);
    return {q, q.position};
  }
  void observe(const QueryPoint& query, const Observation& obs) override {
    if (query.kind != QueryKind::Guard) throw std::invalid_argument("BZ only queries bin boundaries");
    bz_update_known(state_, query.index, obs.direction);
    // The update preserves the total exactly in real arithmetic; this keeps
    // long runs from drifting.
    normalize(state_.bin_probs);
  }
  [[nodiscard]] std::span<const double> door_belief() const noexcept override { return state_.bin_probs; }
  [[nodiscard]] std::span<const double> doors() const noexcept override { return state_.doors; }

 private:
  BzState state_;
};

// --- stochastic approximation -----------------------------------------------

class SaPolicy final : public Policy {
 public:
  explicit SaPolicy(SaState state) : state_(state) {}

  [[nodiscard]] PolicyId id() const noexcept override { return PolicyId::Sa; }
  [[nodiscard]] Selection next(Rng&) const override {
    return {QueryPoint{state_.x, QueryKind::Free, 0}, state_.x};
  }
  void observe(const QueryPoint&, const Observation& obs) override { state_ = sa_step(state_, obs.value); }
  [[nodiscard]] std::span<const double> door_belief() const noexcept override { return {}; }
  [[nodiscard]] std::span<const double> doors() const noexcept override { return {}; }
  [[nodiscard]] const SaState& state() const noexcept { return state_; }

 private:
  SaState state_;
};

/// Inputs for make_policy. Grid policies take `grid`; known-noise policies
/// build a uniform belief over `num_doors` doors and assume each answer is
/// correct with probability `assumed_truth`; SA starts from `sa`.
struct PolicySetup {
  std::optional<SolutionGrid> grid;
  std::size_t num_doors = 201;
  double assumed_truth = 0.85;
  SaState sa;
};

inline std::unique_ptr<Policy> make_policy(PolicyId id, PolicySetup setup) {
  if (uses_grid(id) && !setup.grid) throw ConfigError(std::string(policy_name(id)) + " needs a solution grid");
  if (uses_known_noise(id) && !(setup.assumed_truth > 0.5 && setup.assumed_truth <= 1.0)) {
    throw ConfigError(std::string(policy_name(id)) + " needs an assumed truthfulness in (0.5, 1]");
  }
  const double noise = 1.0 - setup.assumed_truth;
  switch (id) {
    case PolicyId::TsSpl: return std::make_unique<TsSplPolicy>(std::move(*setup.grid), false);
    case PolicyId::TsSplInf: return std::make_unique<TsSplPolicy>(std::move(*setup.grid), true);
    case PolicyId::PbsM: return std::make_unique<PbsMPolicy>(std::move(*setup.grid));
    case PolicyId::SgbsM: return std::make_unique<SgbsMPolicy>(std::move(*setup.grid));
    case PolicyId::BzM: return std::make_unique<BzMPolicy>(std::move(*setup.grid));
    case PolicyId::Pbs: return std::make_unique<PbsPolicy>(door_positions(setup.num_doors), setup.assumed_truth);
    case PolicyId::Sgbs: return std::make_unique<SgbsPolicy>(door_positions(setup.num_doors), noise);
    case PolicyId::Bz: return std::make_unique<BzPolicy>(door_positions(setup.num_doors), noise);
    case PolicyId::Sa: return std::make_unique<SaPolicy>(setup.sa);
  }
  throw ConfigError("unhandled policy");
}

}  // namespace tsspl
