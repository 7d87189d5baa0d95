#pragma once

// Experiment suites behind the command-line tool. Each command expands an
// ExperimentSpec into a list of trial configurations, runs an ensemble per
// configuration (all sharing the master seed, so configurations are
// compared on common random numbers) and writes self-describing CSV.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "tsspl/harness.hpp"
#include "tsspl/policy.hpp"

namespace tsspl {

enum class SamplingMode { Off, On, Both };

inline SamplingMode parse_sampling_mode(std::string_view s) {
  if (s == "off" || s == "false" || s == "0" || s == "no") return SamplingMode::Off;
  if (s == "on" || s == "true" || s == "1" || s == "yes") return SamplingMode::On;
  if (s == "both") return SamplingMode::Both;
  throw ConfigError("sampling phase must be on, off or both");
}

/// Truth grid selector as written on the command line and in CSV:
/// "default", "full", "informative", "true" (collapse to the environment's
/// pi) or "LO:HI" (closed range).
struct TruthRangeSpec {
  std::string text = "default";
  std::optional<TruthRange> range;
  bool at_environment_pi = false;
};

inline TruthRangeSpec parse_truth_range(std::string_view s) {
  TruthRangeSpec spec;
  spec.text = std::string(s);
  if (s == "default") return spec;
  if (s == "full") {
    spec.range = TruthRange::full();
  } else if (s == "informative") {
    spec.range = TruthRange::informative();
  } else if (s == "true") {
    spec.at_environment_pi = true;
  } else {
    const auto colon = s.find(':');
    if (colon == std::string_view::npos) throw ConfigError("truth range must be default|full|informative|true|LO:HI");
    try {
      std::size_t used = 0;
      const std::string lo_text(s.substr(0, colon));
      const std::string hi_text(s.substr(colon + 1));
      const double lo = std::stod(lo_text, &used);
      if (used != lo_text.size()) throw ConfigError("bad truth range bound '" + lo_text + "'");
      const double hi = std::stod(hi_text, &used);
      if (used != hi_text.size()) throw ConfigError("bad truth range bound '" + hi_text + "'");
      if (!(lo >= 0.0 && hi <= 1.0 && lo <= hi)) throw ConfigError("truth range must satisfy 0 <= LO <= HI <= 1");
      spec.range = TruthRange{lo, hi, false};
    } catch (const std::logic_error&) {
      throw ConfigError("bad truth range '" + std::string(s) + "'");
    }
  }
  return spec;
}

/// "D/T" with D, T in {F, C, I}, e.g. "C/F" (correct door prior, flat truth prior).
inline std::pair<PriorShape, PriorShape> parse_prior_pair(std::string_view s, double mu, double sigma) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos) throw ConfigError("prior must look like DOOR/TRUTH, e.g. C/F");
  PriorShape door{parse_prior_kind(s.substr(0, slash)), mu, sigma};
  PriorShape truth{parse_prior_kind(s.substr(slash + 1)), mu, sigma};
  return {door, truth};
}

inline std::string prior_pair_label(const PriorShape& door, const PriorShape& truth) {
  return std::string{prior_label(door), '/', prior_label(truth)};
}

struct ExperimentSpec {
  std::vector<PolicyId> policies{PolicyId::TsSpl};
  std::vector<double> lambda_stars{0.85};
  std::vector<double> pis{0.85};
  std::vector<std::string> functions{"A"};
  std::vector<std::size_t> doors{201};
  /// Empty: policy default.
  std::vector<std::size_t> truth_levels;
  TruthRangeSpec truth_range;
  std::vector<std::string> priors{"F/F"};
  double prior_mu = 0.85;
  double prior_sigma = 0.3;
  std::size_t horizon = 1000;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  double epsilon = 0.01;
  double threshold = 0.95;
  SamplingMode sampling = SamplingMode::On;
  std::size_t sampling_samples = kDefaultDirectionSamples;
  std::optional<double> sampling_edge;
  std::optional<double> assumed_truth;
  double sa_c = 1.0;
  double sa_x0 = 0.5;
  /// track-truth: iterations at which the truth marginal is reported.
  std::vector<std::size_t> snapshots{0, 1, 2, 5, 10, 20, 50, 100};
  /// track-truth: half-width of the "mode near pi" hit window.
  double mode_tolerance = 0.05;
  unsigned parallelism = 0;

  void validate() const {
    if (policies.empty()) throw ConfigError("no policy given");
    if (pis.empty() || doors.empty() || priors.empty()) {
      throw ConfigError("empty parameter list");
    }
    if (trials == 0) throw ConfigError("trials must be positive");
  }
};

namespace detail {

inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

inline std::string num(double v) { return fmt("%.10g", v); }
inline std::string stat(double v) { return fmt("%.6f", v); }

inline std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string("default"); }

inline std::string levels_text(const std::optional<std::size_t>& v) {
  return v ? std::to_string(*v) : std::string("default");
}

inline std::string sampling_edge_text(const std::optional<double>& e) { return e ? num(*e) : std::string("0|1"); }

}  // namespace detail

inline TrialConfig base_config(const ExperimentSpec& spec) {
  TrialConfig c;
  c.horizon = spec.horizon;
  c.epsilon = spec.epsilon;
  c.mass_threshold = spec.threshold;
  c.seed = spec.seed;
  c.sampling_samples = spec.sampling_samples;
  c.sampling_edge = spec.sampling_edge;
  c.assumed_truth = spec.assumed_truth;
  c.sa_c = spec.sa_c;
  c.sa_x0 = spec.sa_x0;
  c.grid.truth_range = spec.truth_range.range;
  c.grid.truth_at_environment_pi = spec.truth_range.at_environment_pi;
  return c;
}

inline std::vector<std::optional<std::size_t>> truth_level_choices(const ExperimentSpec& spec) {
  if (spec.truth_levels.empty()) return {std::nullopt};
  return {spec.truth_levels.begin(), spec.truth_levels.end()};
}

inline const char* kEnsembleHeader =
    "command,policy,environment,function,lambda_star,pi,doors,truth_levels,truth_range,prior,horizon,"
    "epsilon,threshold,sampling_phase,sampling_samples,sampling_edge,assumed_truth,trials,seed,"
    "mean_regret,sd_regret,se_regret,mean_post_sampling_regret,mean_convergence,sd_convergence,converged\n";

inline void write_ensemble_row(std::ostream& out, std::string_view command, const ExperimentSpec& spec,
                               const TrialConfig& c, const EnsembleStats& s) {
  using namespace detail;
  const bool srf = std::holds_alternative<SrfSpec>(c.environment);
  const std::string function = srf ? std::get<SrfSpec>(c.environment).function : std::string("-");
  const bool phase = srf && c.sampling_phase && needs_direction_phase(c.policy);
  out << command << ',' << policy_name(c.policy) << ',' << (srf ? "srf" : "spl") << ',' << function << ','
      << num(environment_target(c.environment)) << ',' << num(environment_pi(c.environment)) << ','
      << c.grid.doors << ',' << levels_text(c.grid.truth_levels) << ',' << spec.truth_range.text << ','
      << prior_pair_label(c.grid.door_prior, c.grid.truth_prior) << ',' << c.horizon << ',' << num(c.epsilon)
      << ',' << num(c.mass_threshold) << ',' << (phase ? "on" : "off") << ','
      << (phase ? c.sampling_samples : 0) << ',' << (phase ? sampling_edge_text(c.sampling_edge) : "-") << ','
      << opt_num(c.assumed_truth) << ',' << s.trials << ',' << s.master_seed << ',' << stat(s.mean_regret) << ','
      << stat(s.sd_regret) << ',' << stat(s.se_regret) << ',' << stat(s.mean_post_sampling_regret) << ','
      << (s.converged ? stat(s.mean_convergence) : "NA") << ',' << (s.converged ? stat(s.sd_convergence) : "NA")
      << ',' << s.converged << '\n';
}

/// Per-step CSV of one trial (requires record_steps).
inline const char* kTraceHeader = "policy,lambda_star,pi,seed,step,query,answer,point,regret,interval_mass,sampling\n";

inline void write_trace(std::ostream& out, const TrialConfig& c, const TrialResult& r) {
  using namespace detail;
  for (const StepRecord& s : r.steps) {
    out << policy_name(c.policy) << ',' << num(environment_target(c.environment)) << ','
        << num(environment_pi(c.environment)) << ',' << c.seed << ',' << s.step << ',' << num(s.query) << ','
        << to_string(s.answer) << ',' << num(s.point) << ',' << fmt("%.10f", s.regret) << ','
        << (std::isnan(s.interval_mass) ? std::string("NA") : fmt("%.10f", s.interval_mass)) << ','
        << (s.sampling ? 1 : 0) << '\n';
  }
}

struct ConfigRun {
  TrialConfig config;
  EnsembleStats stats;
};

inline std::vector<ConfigRun> run_configs(std::string_view command, const ExperimentSpec& spec,
                                          const std::vector<TrialConfig>& configs, std::ostream& out,
                                          std::ostream* trace) {
  out << kEnsembleHeader;
  if (trace) *trace << kTraceHeader;
  std::vector<ConfigRun> runs;
  runs.reserve(configs.size());
  for (const TrialConfig& c : configs) {
    Ensemble e = run_ensemble(c, spec.trials, {spec.parallelism, false});
    write_ensemble_row(out, command, spec, c, e.stats);
    if (trace) {
      TrialConfig first = c;
      first.seed = trial_seed(c.seed, 0);
      first.record_steps = true;
      write_trace(*trace, first, run_trial(first));
    }
    runs.push_back({c, e.stats});
  }
  return runs;
}

/// Policy x lambda* x pi x doors x truth levels x prior matrix on the SPL environment.
inline std::vector<TrialConfig> spl_configs(const ExperimentSpec& spec, bool stop_at_convergence) {
  spec.validate();
  if (spec.lambda_stars.empty()) throw ConfigError("no lambda-star given");
  std::vector<TrialConfig> out;
  for (PolicyId p : spec.policies) {
    for (double lambda : spec.lambda_stars) {
      for (double pi : spec.pis) {
        for (std::size_t d : spec.doors) {
          for (const auto& levels : truth_level_choices(spec)) {
            for (const std::string& prior : spec.priors) {
              TrialConfig c = base_config(spec);
              c.policy = p;
              c.environment = SplSpec{lambda, pi};
              c.grid.doors = d;
              c.grid.truth_levels = levels;
              std::tie(c.grid.door_prior, c.grid.truth_prior) =
                  parse_prior_pair(prior, spec.prior_mu, spec.prior_sigma);
              c.stop_at_convergence = stop_at_convergence;
              c.validate();
              out.push_back(std::move(c));
            }
          }
        }
      }
    }
  }
  return out;
}

inline std::vector<ConfigRun> cmd_spl(const ExperimentSpec& spec, std::ostream& out, std::ostream* trace = nullptr) {
  return run_configs("spl", spec, spl_configs(spec, false), out, trace);
}

/// Convergence sweeps: trials stop at the first converged step, so the
/// regret columns cover the pre-convergence phase only.
inline std::vector<ConfigRun> cmd_sweep_prior(const ExperimentSpec& spec, std::ostream& out,
                                              std::ostream* trace = nullptr) {
  return run_configs("sweep-prior", spec, spl_configs(spec, true), out, trace);
}

/// Root-finding suite. TS-SPL and SA never run the direction-estimation
/// phase; the other policies run with it, without it, or both.
inline std::vector<TrialConfig> srf_configs(const ExperimentSpec& spec) {
  spec.validate();
  if (spec.functions.empty()) throw ConfigError("no function given");
  std::vector<TrialConfig> out;
  for (PolicyId p : spec.policies) {
    std::vector<bool> phases;
    if (!needs_direction_phase(p)) {
      phases = {false};
    } else if (spec.sampling == SamplingMode::Both) {
      phases = {false, true};
    } else {
      phases = {spec.sampling == SamplingMode::On};
    }
    for (const std::string& f : spec.functions) {
      for (double pi : spec.pis) {
        for (std::size_t d : spec.doors) {
          for (const auto& levels : truth_level_choices(spec)) {
            for (bool phase : phases) {
              TrialConfig c = base_config(spec);
              c.policy = p;
              c.environment = SrfSpec{f, pi};
              c.grid.doors = d;
              c.grid.truth_levels = levels;
              std::tie(c.grid.door_prior, c.grid.truth_prior) =
                  parse_prior_pair(spec.priors.front(), spec.prior_mu, spec.prior_sigma);
              c.sampling_phase = phase;
              c.validate();
              out.push_back(std::move(c));
            }
          }
        }
      }
    }
  }
  return out;
}

inline std::vector<ConfigRun> cmd_srf(const ExperimentSpec& spec, std::ostream& out, std::ostream* trace = nullptr) {
  return run_configs("srf", spec, srf_configs(spec), out, trace);
}

/// Aggregated truthfulness marginal at one snapshot iteration.
struct TruthTrackRow {
  std::size_t iteration = 0;
  std::vector<double> levels;
  std::vector<double> mean_probability;
  std::vector<double> first_trial_probability;
  /// Fraction of trials whose marginal mode sits at this level.
  std::vector<double> mode_fraction;
  /// Fraction of trials whose mode lies within the tolerance of the true pi.
  double mode_hit_rate = 0.0;
};

inline std::size_t argmax_first(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline std::vector<TruthTrackRow> track_truth(const TrialConfig& config, std::size_t trials,
                                              std::span<const std::size_t> iterations, double tolerance,
                                              unsigned parallelism = 0) {
  if (!uses_grid(config.policy)) throw ConfigError("truth tracking needs a grid policy");
  TrialConfig c = config;
  c.truth_snapshots.assign(iterations.begin(), iterations.end());
  std::sort(c.truth_snapshots.begin(), c.truth_snapshots.end());
  c.truth_snapshots.erase(std::unique(c.truth_snapshots.begin(), c.truth_snapshots.end()), c.truth_snapshots.end());
  std::erase_if(c.truth_snapshots, [&](std::size_t i) { return i > c.horizon; });
  const Ensemble e = run_ensemble(c, trials, {parallelism, false});
  const double pi = environment_pi(c.environment);
  const std::vector<double>& levels = e.results.front().truth_levels;

  std::vector<TruthTrackRow> rows;
  for (std::size_t s = 0; s < c.truth_snapshots.size(); ++s) {
    TruthTrackRow row;
    row.iteration = c.truth_snapshots[s];
    row.levels = levels;
    row.mean_probability.assign(levels.size(), 0.0);
    row.mode_fraction.assign(levels.size(), 0.0);
    std::size_t hits = 0;
    for (const TrialResult& r : e.results) {
      const std::vector<double>& m = r.truth_snapshots.at(s).marginal;
      for (std::size_t j = 0; j < m.size(); ++j) row.mean_probability[j] += m[j];
      const std::size_t mode = argmax_first(m);
      row.mode_fraction[mode] += 1.0;
      if (std::fabs(levels[mode] - pi) <= tolerance + 1e-12) ++hits;
    }
    const auto n = static_cast<double>(e.results.size());
    for (double& v : row.mean_probability) v /= n;
    for (double& v : row.mode_fraction) v /= n;
    row.first_trial_probability = e.results.front().truth_snapshots.at(s).marginal;
    row.mode_hit_rate = static_cast<double>(hits) / n;
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<TruthTrackRow> cmd_track_truth(const ExperimentSpec& spec, std::ostream& out) {
  using namespace detail;
  spec.validate();
  if (spec.lambda_stars.empty()) throw ConfigError("no lambda-star given");
  TrialConfig c = base_config(spec);
  c.policy = spec.policies.front();
  c.environment = SplSpec{spec.lambda_stars.front(), spec.pis.front()};
  c.grid.doors = spec.doors.front();
  c.grid.truth_levels = truth_level_choices(spec).front();
  std::tie(c.grid.door_prior, c.grid.truth_prior) =
      parse_prior_pair(spec.priors.front(), spec.prior_mu, spec.prior_sigma);
  c.validate();
  auto rows = track_truth(c, spec.trials, spec.snapshots, spec.mode_tolerance, spec.parallelism);

  out << "command,policy,lambda_star,pi,doors,truth_levels,truth_range,prior,trials,seed,iteration,truth_level,"
         "mean_probability,trial0_probability,mode_fraction,mode_hit_rate\n";
  for (const TruthTrackRow& row : rows) {
    for (std::size_t j = 0; j < row.levels.size(); ++j) {
      out << "track-truth," << policy_name(c.policy) << ',' << num(spec.lambda_stars.front()) << ','
          << num(spec.pis.front()) << ',' << c.grid.doors << ',' << row.levels.size() << ','
          << spec.truth_range.text << ',' << prior_pair_label(c.grid.door_prior, c.grid.truth_prior) << ','
          << spec.trials << ',' << spec.seed << ',' << row.iteration << ',' << num(row.levels[j]) << ','
          << fmt("%.10f", row.mean_probability[j]) << ',' << fmt("%.10f", row.first_trial_probability[j]) << ','
          << stat(row.mode_fraction[j]) << ',' << stat(row.mode_hit_rate) << '\n';
    }
  }
  return rows;
}

}  // namespace tsspl
