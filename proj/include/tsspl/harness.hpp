#pragma once

// Seeded trial runner and ensemble aggregation.
//
// A trial alternates policy.next / environment / policy.observe for a fixed
// horizon and records the regret of every move, the posterior mass around
// the target (for policies with a door belief), and optional snapshots of
// the truthfulness marginal. Root-finding trials of informative-only
// policies may open with a direction-estimation phase; those steps are
// charged at the edge point and counted inside the horizon.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "tsspl/environments.hpp"
#include "tsspl/policy.hpp"
#include "tsspl/random.hpp"
#include "tsspl/solution_grid.hpp"

namespace tsspl {

enum class PriorKind { Flat, Gaussian, InverseGaussian };

/// Prior shape over a support. Gaussian is N(mu, sigma); the inverse shape
/// mirrors it around 1/2, i.e. N(1 - mu, sigma).
struct PriorShape {
  PriorKind kind = PriorKind::Flat;
  double mu = 0.85;
  double sigma = 0.3;

  [[nodiscard]] std::vector<double> weights(std::span<const double> points) const {
    switch (kind) {
      case PriorKind::Flat: return std::vector<double>(points.size(), 1.0);
      case PriorKind::Gaussian: return gaussian_weights(points, mu, sigma);
      case PriorKind::InverseGaussian: return gaussian_weights(points, 1.0 - mu, sigma);
    }
    return {};
  }
};

/// Single-letter labels: F (flat), C (correct, centred on mu), I (incorrect).
inline char prior_label(const PriorShape& p) noexcept {
  switch (p.kind) {
    case PriorKind::Flat: return 'F';
    case PriorKind::Gaussian: return 'C';
    case PriorKind::InverseGaussian: return 'I';
  }
  return '?';
}

inline PriorKind parse_prior_kind(std::string_view s) {
  if (s == "flat" || s == "F") return PriorKind::Flat;
  if (s == "gaussian" || s == "C") return PriorKind::Gaussian;
  if (s == "inverse-gaussian" || s == "I") return PriorKind::InverseGaussian;
  throw ConfigError("unknown prior shape '" + std::string(s) + "' (flat|gaussian|inverse-gaussian or F|C|I)");
}

struct GridSpec {
  std::size_t doors = 201;
  /// Unset: 101 levels for TS-SPL, 51 for the informative schemes.
  std::optional<std::size_t> truth_levels;
  /// Unset: [0, 1] for TS-SPL, (0.5, 1] for the informative schemes.
  std::optional<TruthRange> truth_range;
  /// Collapse T to the environment's true pi (a single known level).
  bool truth_at_environment_pi = false;
  PriorShape door_prior;
  PriorShape truth_prior;
};

struct SplSpec {
  double lambda_star = 0.85;
  double pi = 0.85;
};

struct SrfSpec {
  std::string function = "A";
  double pi = 0.85;
};

using EnvironmentSpec = std::variant<SplSpec, SrfSpec>;

struct TrialConfig {
  PolicyId policy = PolicyId::TsSpl;
  EnvironmentSpec environment = SplSpec{};
  GridSpec grid;
  std::size_t horizon = 1000;
  /// Convergence interval is target +- epsilon.
  double epsilon = 0.01;
  double mass_threshold = 0.95;
  std::uint64_t seed = 0;
  /// End the trial at the first converged step (convergence sweeps).
  bool stop_at_convergence = false;

  /// Root finding: run the direction-estimation phase for policies that need it.
  bool sampling_phase = false;
  std::size_t sampling_samples = kDefaultDirectionSamples;
  /// Edge queried by the phase. Unset: alternate between 0 and 1, which
  /// costs a root-independent 1/2 per sample.
  std::optional<double> sampling_edge;
  /// Sign-to-direction convention used when no phase runs.
  int fixed_convention = 1;

  double sa_c = 1.0;
  double sa_x0 = 0.5;
  /// Known-noise policies: assumed answer accuracy. Unset means the
  /// environment's true pi (correctly specified noise).
  std::optional<double> assumed_truth;

  /// Steps at which to record the truthfulness marginal (grid policies).
  std::vector<std::size_t> truth_snapshots;
  bool record_steps = false;

  void validate() const {
    if (!(mass_threshold > 0.0 && mass_threshold < 1.0)) throw ConfigError("mass threshold must lie in (0, 1)");
    if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
    if (grid.doors < 2) throw ConfigError("need at least two doors");
    if (grid.truth_levels && *grid.truth_levels == 0) throw ConfigError("need at least one truth level");
    if (!(sa_c > 0.0)) throw ConfigError("SA step scale must be positive");
    if (!(sa_x0 > 0.0 && sa_x0 < 1.0)) throw ConfigError("SA start must lie in (0, 1)");
    if (fixed_convention != 1 && fixed_convention != -1) throw ConfigError("convention must be +1 or -1");
    if (sampling_edge && !(*sampling_edge >= 0.0 && *sampling_edge <= 1.0 && *sampling_edge != 0.5)) {
      throw ConfigError("sampling edge must lie in [0, 1] and off the midpoint");
    }
    if (sampling_phase && sampling_samples == 0) throw ConfigError("sampling phase needs at least one sample");
    if (const auto* spl = std::get_if<SplSpec>(&environment)) {
      SplEnvironment{spl->lambda_star, spl->pi}.validate();
    } else {
      const auto& srf = std::get<SrfSpec>(environment);
      try {
        (void)benchmark_function(srf.function, srf.pi);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  }
};

inline double environment_pi(const EnvironmentSpec& env) {
  return std::visit([](const auto& e) { return e.pi; }, env);
}

/// Point whose distance is charged as regret: lambda* or the root x*.
inline double environment_target(const EnvironmentSpec& env) {
  if (const auto* spl = std::get_if<SplSpec>(&env)) return spl->lambda_star;
  return benchmark_function(std::get<SrfSpec>(env).function, 1.0).x_star;
}

inline std::size_t default_truth_levels(PolicyId id) noexcept { return id == PolicyId::TsSpl ? 101 : 51; }

inline TruthRange default_truth_range(PolicyId id) noexcept {
  return id == PolicyId::TsSpl ? TruthRange::full() : TruthRange::informative();
}

/// The joint grid a grid policy starts from under `config`.
inline SolutionGrid build_grid(const TrialConfig& config) {
  const GridSpec& g = config.grid;
  std::size_t levels = g.truth_levels.value_or(default_truth_levels(config.policy));
  TruthRange range = g.truth_range.value_or(default_truth_range(config.policy));
  if (g.truth_at_environment_pi) {
    levels = 1;
    range = TruthRange::single(environment_pi(config.environment));
  }
  SolutionGrid grid = SolutionGrid::uniform(g.doors, levels, range);
  if (g.door_prior.kind == PriorKind::Flat && g.truth_prior.kind == PriorKind::Flat) return grid;
  return grid.with_prior(g.door_prior.weights(grid.doors()), g.truth_prior.weights(grid.truths()));
}

struct StepRecord {
  std::size_t step = 0;
  double query = 0.0;
  Direction answer = Direction::Left;
  double point = 0.0;
  double regret = 0.0;
  /// Door-belief mass around the target before this step; NaN without a belief.
  double interval_mass = 0.0;
  bool sampling = false;
};

struct TruthSnapshot {
  std::size_t iteration = 0;
  std::vector<double> marginal;
};

struct TrialResult {
  std::vector<double> regret;
  double cumulative_regret = 0.0;
  std::optional<std::size_t> convergence_step;
  /// Interval mass after 0, 1, 2, ... observations (empty without a belief).
  std::vector<double> mass_trace;
  std::vector<TruthSnapshot> truth_snapshots;
  std::vector<double> truth_levels;
  std::size_t sampling_steps = 0;
  /// Regret accumulated after the direction-estimation phase.
  double post_sampling_regret = 0.0;
  int convention = 1;
  std::vector<StepRecord> steps;
};

/// First index whose mass strictly exceeds `threshold`.
inline std::optional<std::size_t> convergence_step(std::span<const double> mass_trace, double threshold) {
  for (std::size_t i = 0; i < mass_trace.size(); ++i) {
    if (mass_trace[i] > threshold) return i;
  }
  return std::nullopt;
}

inline PolicySetup make_policy_setup(const TrialConfig& config) {
  PolicySetup setup;
  if (uses_grid(config.policy)) setup.grid = build_grid(config);
  setup.num_doors = config.grid.doors;
  setup.assumed_truth = config.assumed_truth.value_or(environment_pi(config.environment));
  setup.sa = SaState{config.sa_x0, config.sa_c, 1, 1, 0.001};
  return setup;
}

inline TrialResult run_trial(const TrialConfig& config) {
  config.validate();
  Rng rng(config.seed);
  auto policy = make_policy(config.policy, make_policy_setup(config));

  const bool is_srf = std::holds_alternative<SrfSpec>(config.environment);
  std::optional<SplEnvironment> spl;
  std::optional<RootOracle> oracle;
  if (is_srf) {
    const auto& s = std::get<SrfSpec>(config.environment);
    oracle = benchmark_function(s.function, s.pi);
  } else {
    const auto& s = std::get<SplSpec>(config.environment);
    spl = SplEnvironment{s.lambda_star, s.pi};
  }
  const double target = environment_target(config.environment);
  const double lo = target - config.epsilon;
  const double hi = target + config.epsilon;

  TrialResult result;
  result.regret.reserve(config.horizon);
  const bool tracks_mass = !policy->door_belief().empty();
  auto current_mass = [&] {
    return tracks_mass ? interval_mass(policy->doors(), policy->door_belief(), lo, hi)
                       : std::nan("");
  };
  if (const SolutionGrid* g = policy->grid()) result.truth_levels = g->truths();

  std::vector<std::size_t> snapshots = config.truth_snapshots;
  std::sort(snapshots.begin(), snapshots.end());
  auto next_snapshot = snapshots.begin();
  auto take_snapshots = [&](std::size_t step) {
    const SolutionGrid* g = policy->grid();
    while (next_snapshot != snapshots.end() && *next_snapshot <= step) {
      if (g && *next_snapshot == step) result.truth_snapshots.push_back({step, g->truth_marginal()});
      ++next_snapshot;
    }
  };

  auto record = [&](std::size_t step, double query, Direction answer, double point, double mass,
                    bool sampling) {
    const double r = std::fabs(point - target);
    result.regret.push_back(r);
    result.cumulative_regret += r;
    if (!sampling) result.post_sampling_regret += r;
    if (config.record_steps) result.steps.push_back({step, query, answer, point, r, mass, sampling});
  };

  std::size_t step = 0;
  int convention = config.fixed_convention;

  if (is_srf && config.sampling_phase && needs_direction_phase(config.policy)) {
    const std::size_t n = std::min(config.sampling_samples, config.horizon);
    // Votes are folded into "g increasing" evidence: a negative sign left of
    // the root or a positive sign right of it.
    long increasing = 0;
    for (; step < n; ++step) {
      const double mass = current_mass();
      if (tracks_mass) result.mass_trace.push_back(mass);
      take_snapshots(step);
      const double edge = config.sampling_edge.value_or(step % 2 == 0 ? 0.0 : 1.0);
      const SrfSample s = srf_sample(*oracle, edge, rng);
      increasing += edge < 0.5 ? -s.s : s.s;
      record(step, edge, srf_to_direction(s.s, convention), edge, mass, true);
    }
    result.sampling_steps = n;
    convention = direction_from_votes(increasing, 1.0);
  }
  result.convention = convention;

  for (; step < config.horizon; ++step) {
    const double mass = current_mass();
    if (tracks_mass) {
      result.mass_trace.push_back(mass);
      if (!result.convergence_step && mass > config.mass_threshold) {
        result.convergence_step = step;
        if (config.stop_at_convergence) break;
      }
    }
    take_snapshots(step);

    const Selection sel = policy->next(rng);
    Observation obs;
    if (is_srf) {
      const SrfSample s = srf_sample(*oracle, sel.query.position, rng);
      obs = {srf_to_direction(s.s, convention), s.y};
    } else {
      const Direction d = spl_query(*spl, sel.query.position, rng);
      obs = {d, d == Direction::Left ? 1.0 : -1.0};
    }
    record(step, sel.query.position, obs.direction, sel.point, mass, false);
    policy->observe(sel.query, obs);
  }

  if (step == config.horizon) {
    if (tracks_mass) {
      const double mass = current_mass();
      result.mass_trace.push_back(mass);
      if (!result.convergence_step && mass > config.mass_threshold) result.convergence_step = step;
    }
    take_snapshots(step);
  }
  return result;
}

struct EnsembleStats {
  std::size_t trials = 0;
  std::uint64_t master_seed = 0;
  double mean_regret = 0.0;
  /// Sample standard deviation (n - 1); 0 for a single trial.
  double sd_regret = 0.0;
  double se_regret = 0.0;
  double mean_post_sampling_regret = 0.0;
  /// Mean over the trials that converged; NaN if none did.
  double mean_convergence = std::nan("");
  double sd_convergence = std::nan("");
  std::size_t converged = 0;
};

struct Ensemble {
  EnsembleStats stats;
  std::vector<TrialResult> results;
};

struct EnsembleOptions {
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned parallelism = 0;
  /// Keep per-step traces of every trial (memory grows with trials x horizon).
  bool keep_traces = false;
};

inline EnsembleStats summarize(std::span<const TrialResult> results, std::uint64_t master_seed) {
  EnsembleStats s;
  s.trials = results.size();
  s.master_seed = master_seed;
  if (results.empty()) return s;
  const auto n = static_cast<double>(results.size());

  double sum = 0.0;
  double post = 0.0;
  for (const auto& r : results) {
    sum += r.cumulative_regret;
    post += r.post_sampling_regret;
  }
  s.mean_regret = sum / n;
  s.mean_post_sampling_regret = post / n;
  double ss = 0.0;
  for (const auto& r : results) ss += (r.cumulative_regret - s.mean_regret) * (r.cumulative_regret - s.mean_regret);
  s.sd_regret = results.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  s.se_regret = s.sd_regret / std::sqrt(n);

  double csum = 0.0;
  for (const auto& r : results) {
    if (r.convergence_step) {
      csum += static_cast<double>(*r.convergence_step);
      ++s.converged;
    }
  }
  if (s.converged > 0) {
    const auto c = static_cast<double>(s.converged);
    s.mean_convergence = csum / c;
    double css = 0.0;
    for (const auto& r : results) {
      if (r.convergence_step) {
        const double d = static_cast<double>(*r.convergence_step) - s.mean_convergence;
        css += d * d;
      }
    }
    s.sd_convergence = s.converged > 1 ? std::sqrt(css / (c - 1.0)) : 0.0;
  }
  return s;
}

/// Runs `trials` independent trials. Trial i is seeded with
/// trial_seed(config.seed, i) and results are stored by index, so the output
/// does not depend on `parallelism` or scheduling.
inline Ensemble run_ensemble(const TrialConfig& config, std::size_t trials, EnsembleOptions options = {}) {
  if (trials == 0) throw ConfigError("ensemble needs at least one trial");
  config.validate();

  Ensemble out;
  out.results.resize(trials);
  unsigned workers = options.parallelism ? options.parallelism : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < trials; i = next++) {
      try {
        TrialConfig c = config;
        c.seed = trial_seed(config.seed, i);
        TrialResult r = run_trial(c);
        if (!options.keep_traces) {
          r.regret = {};
          r.mass_trace = {};
          r.steps = {};
        }
        out.results[i] = std::move(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  out.stats = summarize(out.results, config.seed);
  return out;
}

}  // namespace tsspl
