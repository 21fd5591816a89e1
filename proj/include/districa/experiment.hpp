#ifndef DISTRICA_EXPERIMENT_HPP
#define DISTRICA_EXPERIMENT_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "districa/engine.hpp"
#include "districa/signal_model.hpp"

namespace districa {

enum class Mode { Stationary, Adaptive, PartialSolve };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& name);

struct ExperimentConfig {
  int nodes = 5;
  std::vector<Index> channels;  // M_k; empty means 5 per node
  Index components = 2;
  Index samples = 10000;
  double er_probability = 0.8;
  std::string graph_file;  // fixed topology instead of an Erdős–Rényi draw
  ContrastKind contrast = ContrastKind::LogCosh;
  double solver_tol = 1e-9;
  int solver_max_inner_iters = 1000;
  int reuse = 1;
  int monte_carlo_runs = 30;
  int iterations = 100;
  Mode mode = Mode::Stationary;
  std::uint64_t seed = 1;
  bool warm_start = true;

  // Signal model.
  double sinusoid_frequency = 0.007;
  double square_frequency = 0.013;
  double alpha_min = 0.2;
  double alpha_max = 0.8;
  Index reference_samples = 100000;  // stationary reference batch

  // Adaptive mode.
  double drift_ratio = 0.005;
  std::vector<double> drift_profile;  // empty: default piecewise profile

  // Partial-solve mode.
  double partial_tol = 1e-3;
  int partial_max_inner_iters = 10;

  std::vector<Index> resolved_channels() const;
  Index total_channels() const;
  void validate() const;  // throws ErrorKind::Config
};

/// Everything random about one Monte-Carlo run, derived from (seed, run).
struct RunSetup {
  std::uint64_t run_seed = 0;
  NetworkGraph graph;
  MixingModel model;  // calibrated
  std::uint64_t noise_seed = 0;
  std::uint64_t reference_seed = 0;
  std::uint64_t engine_seed = 0;
  std::uint64_t solver_seed = 0;
  std::optional<DriftSchedule> drift;
};

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run, std::uint64_t stream);

/// The benchmark sources: a sinusoid, a square wave, then M-2 unit-variance
/// near-Gaussian mixtures with α drawn from [alpha_min, alpha_max].
std::vector<SourceSpec> benchmark_sources(const ExperimentConfig& cfg, Index m, std::uint64_t seed);

RunSetup make_run_setup(const ExperimentConfig& cfg, int run);

/// Network-wide observation batch `batch_index` (samples t = b·N .. b·N+N-1).
MatrixXd observation_batch(const MixingModel& model, Index samples, long batch_index, std::uint64_t noise_seed);

/// Centralized FastICA filter X* on the full network batch.
MatrixXd centralized_reference(const MatrixXd& full_batch, Index components, const ContrastFunction& contrast,
                               const SolverOptions& opts);

struct TracePoint {
  long iteration = 0;
  double epsilon_median = 0.0;
  double epsilon_aligned_median = 0.0;
  std::vector<double> epsilon_runs;
  std::vector<double> epsilon_aligned_runs;
  double objective = 0.0;  // median over runs
  long long scalars_fused = 0;
  long long scalars_disseminated = 0;
  double wall_seconds = 0.0;
};

struct ErrorTrace {
  ExperimentConfig config;
  std::vector<TracePoint> points;
  std::vector<int> included_runs;
  std::vector<std::uint64_t> run_seeds;
  std::vector<std::string> warnings;
  std::shared_ptr<const ErrorTrace> baseline;  // exact-solve trace in partial-solve mode
  double wall_seconds = 0.0;
};

/// Per-run series before aggregation.
struct RunTrace {
  int run = 0;
  std::vector<double> epsilon;
  std::vector<double> epsilon_aligned;
  std::vector<double> objective;
  std::vector<long long> scalars_fused;
  std::vector<long long> scalars_disseminated;
  std::vector<double> wall_seconds;
};

RunTrace run_single(const ExperimentConfig& cfg, int run, const EngineOptions& engine_opts);

EngineOptions engine_options(const ExperimentConfig& cfg, bool partial);

ErrorTrace aggregate(const ExperimentConfig& cfg, const std::vector<RunTrace>& runs);

/// All Monte-Carlo runs of `cfg` on `jobs` worker threads. Failed runs are
/// excluded with a warning; throws NumericalFailure if every run fails.
ErrorTrace run_experiment(const ExperimentConfig& cfg, int jobs = 1);

}  // namespace districa

#endif  // DISTRICA_EXPERIMENT_HPP
