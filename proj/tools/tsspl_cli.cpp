// tsspl: run stochastic point location and root-finding experiment suites
// and write the results as CSV.
//
// Exit codes: 0 success, 2 usage error, 3 runtime error.

#include <CLI11.hpp>

#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tsspl/experiments.hpp"

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// Raw flag values; converted into an ExperimentSpec after parsing.
struct Flags {
  std::vector<std::string> policies;
  std::vector<double> lambda_stars;
  std::vector<double> pis;
  std::vector<std::string> functions;
  std::vector<std::size_t> doors;
  std::vector<std::size_t> truth_levels;
  std::string truth_range = "default";
  std::vector<std::string> priors{"F/F"};
  double prior_mu = 0.85;
  double prior_sigma = 0.3;
  std::size_t horizon = 1000;
  std::size_t trials = 10000;
  std::uint64_t seed = 1;
  double epsilon = 0.01;
  double threshold = 0.95;
  std::string sampling = "on";
  std::size_t sampling_samples = tsspl::kDefaultDirectionSamples;
  std::optional<double> sampling_edge;
  std::optional<double> assumed_truth;
  double sa_c = 1.0;
  double sa_x0 = 0.5;
  std::vector<std::size_t> snapshots{0, 1, 2, 5, 10, 20, 50, 100};
  double mode_tolerance = 0.05;
  unsigned parallelism = 0;
  std::string out = "-";
  std::string trace;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--policy", f.policies, "Policies: ts-spl, ts-spl-inf, pbs, pbs-m, sgbs, sgbs-m, bz, bz-m, sa")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--pi", f.pis, "Answer truthfulness pi (list allowed)")->delimiter(',')->capture_default_str();
  cmd->add_option("--doors", f.doors, "Number of doors |D| (list allowed)")->delimiter(',')->capture_default_str();
  cmd->add_option("--truth-levels", f.truth_levels, "Number of truth levels |T| (list allowed; default per policy)")
      ->delimiter(',');
  cmd->add_option("--truth-range", f.truth_range, "Truth grid: default | full | informative | true | LO:HI")
      ->capture_default_str();
  cmd->add_option("--prior", f.priors, "DOOR/TRUTH prior pairs over {F, C, I}, e.g. C/F (list allowed)")
      ->delimiter(',')
      ->capture_default_str();
  cmd->add_option("--prior-mu", f.prior_mu, "Centre of the correct Gaussian prior")->capture_default_str();
  cmd->add_option("--prior-sigma", f.prior_sigma, "Width of the Gaussian priors")->capture_default_str();
  cmd->add_option("--horizon", f.horizon, "Steps per trial")->capture_default_str();
  cmd->add_option("--trials", f.trials, "Independent trials per configuration")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
  cmd->add_option("--epsilon", f.epsilon, "Half-width of the convergence interval")->capture_default_str();
  cmd->add_option("--threshold", f.threshold, "Posterior mass that counts as converged")->capture_default_str();
  cmd->add_option("--assumed-truth", f.assumed_truth, "Known-noise policies: assumed pi (default: true pi)");
  cmd->add_option("--parallelism", f.parallelism, "Worker threads (0 = all cores)")->capture_default_str();
  cmd->add_option("--out", f.out, "Output CSV path ('-' for stdout)")->capture_default_str();
}

void add_trace(CLI::App* cmd, Flags& f) {
  cmd->add_option("--trace", f.trace, "Also write the per-step trace of trial 0 of every configuration");
}

tsspl::ExperimentSpec to_spec(const Flags& f) {
  tsspl::ExperimentSpec s;
  if (!f.policies.empty()) {
    s.policies.clear();
    for (const auto& p : f.policies) s.policies.push_back(tsspl::parse_policy(p));
  }
  s.lambda_stars = f.lambda_stars;
  s.pis = f.pis;
  s.functions = f.functions;
  s.doors = f.doors;
  s.truth_levels = f.truth_levels;
  s.truth_range = tsspl::parse_truth_range(f.truth_range);
  s.priors = f.priors;
  for (const auto& p : s.priors) (void)tsspl::parse_prior_pair(p, f.prior_mu, f.prior_sigma);
  s.prior_mu = f.prior_mu;
  s.prior_sigma = f.prior_sigma;
  s.horizon = f.horizon;
  s.trials = f.trials;
  s.seed = f.seed;
  s.epsilon = f.epsilon;
  s.threshold = f.threshold;
  s.sampling = tsspl::parse_sampling_mode(f.sampling);
  s.sampling_samples = f.sampling_samples;
  s.sampling_edge = f.sampling_edge;
  s.assumed_truth = f.assumed_truth;
  s.sa_c = f.sa_c;
  s.sa_x0 = f.sa_x0;
  s.snapshots = f.snapshots;
  s.mode_tolerance = f.mode_tolerance;
  s.parallelism = f.parallelism;
  s.validate();
  return s;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_ = std::make_unique<std::ofstream>(path);
    if (!*file_) throw std::runtime_error("cannot open '" + path + "' for writing");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  void close() {
    if (!file_) return;
    file_->close();
    if (!*file_) throw std::runtime_error("failed writing output file");
  }

 private:
  std::unique_ptr<std::ofstream> file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thompson-sampling stochastic point location experiments"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML/INI file with flag values (flags on the command line win)");
  app.allow_config_extras(CLI::config_extras_mode::error);

  Flags spl;
  spl.policies = {"ts-spl"};
  spl.lambda_stars = {0.85};
  spl.pis = {0.85};
  spl.doors = {201};
  auto* spl_cmd = app.add_subcommand("spl", "Cumulative regret on the N-door environment");
  add_common(spl_cmd, spl);
  add_trace(spl_cmd, spl);
  spl_cmd->add_option("--lambda-star", spl.lambda_stars, "Target location (list allowed)")
      ->delimiter(',')
      ->capture_default_str();

  Flags sweep;
  sweep.policies = {"ts-spl"};
  sweep.lambda_stars = {0.15};
  sweep.pis = {0.8};
  sweep.doors = {101};
  auto* sweep_cmd = app.add_subcommand("sweep-prior", "Convergence steps across grid sizes and priors");
  add_common(sweep_cmd, sweep);
  add_trace(sweep_cmd, sweep);
  sweep_cmd->add_option("--lambda-star", sweep.lambda_stars, "Target location (list allowed)")
      ->delimiter(',')
      ->capture_default_str();

  Flags track;
  track.policies = {"ts-spl"};
  track.lambda_stars = {0.85};
  track.pis = {0.15};
  track.doors = {201};
  track.horizon = 100;
  track.trials = 1000;
  auto* track_cmd = app.add_subcommand("track-truth", "Posterior over the truthfulness level across iterations");
  add_common(track_cmd, track);
  track_cmd->add_option("--lambda-star", track.lambda_stars, "Target location")->capture_default_str();
  track_cmd->add_option("--snapshots", track.snapshots, "Iterations to report")->delimiter(',')->capture_default_str();
  track_cmd->add_option("--mode-tolerance", track.mode_tolerance, "Window around pi for the mode hit rate")
      ->capture_default_str();

  Flags srf;
  srf.policies = {"ts-spl", "ts-spl-inf", "pbs-m", "sgbs-m", "bz-m", "sa"};
  srf.functions = {"A", "B", "C"};
  srf.pis = {0.65, 0.75, 0.85};
  srf.doors = {201};
  srf.horizon = 250;
  auto* srf_cmd = app.add_subcommand("srf", "Noisy root finding on the benchmark functions");
  add_common(srf_cmd, srf);
  add_trace(srf_cmd, srf);
  srf_cmd->add_option("--function", srf.functions, "Benchmark functions A, B, C (list allowed)")
      ->delimiter(',')
      ->capture_default_str();
  srf_cmd->add_option("--sampling-phase", srf.sampling, "Direction-estimation phase: on | off | both")
      ->capture_default_str();
  srf_cmd->add_option("--sampling-samples", srf.sampling_samples, "Samples in the direction-estimation phase")
      ->capture_default_str();
  srf_cmd->add_option("--sampling-edge", srf.sampling_edge, "Query a single edge point (default: alternate 0 and 1)");
  srf_cmd->add_option("--sa-c", srf.sa_c, "SA step scale c in a_n = c/n")->capture_default_str();
  srf_cmd->add_option("--sa-x0", srf.sa_x0, "SA starting point")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  tsspl::ExperimentSpec spec;
  try {
    if (*spl_cmd) spec = to_spec(spl);
    if (*sweep_cmd) spec = to_spec(sweep);
    if (*track_cmd) spec = to_spec(track);
    if (*srf_cmd) spec = to_spec(srf);
  } catch (const tsspl::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    Output out(*spl_cmd ? spl.out : *sweep_cmd ? sweep.out : *track_cmd ? track.out : srf.out);
    const std::string& trace_path = *spl_cmd ? spl.trace : *sweep_cmd ? sweep.trace : srf.trace;
    std::optional<Output> trace;
    if (!*track_cmd && !trace_path.empty()) trace.emplace(trace_path);
    std::ostream* trace_stream = trace ? &trace->stream() : nullptr;

    if (*spl_cmd) tsspl::cmd_spl(spec, out.stream(), trace_stream);
    if (*sweep_cmd) tsspl::cmd_sweep_prior(spec, out.stream(), trace_stream);
    if (*track_cmd) tsspl::cmd_track_truth(spec, out.stream());
    if (*srf_cmd) tsspl::cmd_srf(spec, out.stream(), trace_stream);
    out.close();
    if (trace) trace->close();
  } catch (const tsspl::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
