#include "districa/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <random>
#include <thread>

#include "districa/metrics.hpp"

namespace districa {

namespace {

enum Stream : std::uint64_t {
  kGraphStream = 1,
  kMixingStream,
  kAlphaStream,
  kNoiseStream,
  kReferenceStream,
  kEngineStream,
  kSolverStream,
  kDriftStream,
  kCalibrationStream,
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Stationary: return "stationary";
    case Mode::Adaptive: return "adaptive";
    case Mode::PartialSolve: return "partial";
  }
  return "stationary";
}

Mode parse_mode(const std::string& name) {
  if (name == "stationary") return Mode::Stationary;
  if (name == "adaptive") return Mode::Adaptive;
  if (name == "partial") return Mode::PartialSolve;
  throw Error(ErrorKind::Config, "unknown mode '" + name + "' (expected stationary, adaptive or partial)");
}

std::vector<Index> ExperimentConfig::resolved_channels() const {
  if (channels.empty()) return std::vector<Index>(static_cast<std::size_t>(std::max(nodes, 0)), 5);
  return channels;
}

Index ExperimentConfig::total_channels() const {
  Index m = 0;
  for (Index c : resolved_channels()) m += c;
  return m;
}

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const std::string& what) { require(ok, ErrorKind::Config, what); };
  check(nodes >= 1, "nodes must be >= 1");
  const auto ch = resolved_channels();
  check(static_cast<int>(ch.size()) == nodes, "channels must list one count per node");
  for (Index c : ch) check(c >= 1, "every node needs at least one channel");
  check(components >= 1, "components must be >= 1");
  check(components <= total_channels(), "components exceed the network channel count");
  if (nodes == 1) check(components <= ch.front(), "components exceed the single node's channels");
  // Worst case for M̃_q: every other node is a neighbour of q.
  const Index max_local = *std::max_element(ch.begin(), ch.end()) + static_cast<Index>(nodes - 1) * components;
  check(samples >= 10 * max_local, "samples must be at least 10x the largest local stacked dimension (" +
                                       std::to_string(10 * max_local) + ")");
  check(er_probability > 0.0 && er_probability <= 1.0, "er_probability must lie in (0, 1]");
  check(solver_tol > 0.0, "solver_tol must be positive");
  check(solver_max_inner_iters >= 1, "solver_max_inner_iters must be >= 1");
  check(partial_tol > 0.0, "partial_tol must be positive");
  check(partial_max_inner_iters >= 1, "partial_max_inner_iters must be >= 1");
  check(reuse >= 1, "reuse must be >= 1");
  check(monte_carlo_runs >= 1, "monte_carlo_runs must be >= 1");
  check(iterations >= 0, "iterations must be >= 0");
  check(sinusoid_frequency > 0.0 && sinusoid_frequency < 0.5, "sinusoid_frequency must lie in (0, 0.5)");
  check(square_frequency > 0.0 && square_frequency < 0.5, "square_frequency must lie in (0, 0.5)");
  check(0.0 <= alpha_min && alpha_min <= alpha_max && alpha_max <= 1.0, "need 0 <= alpha_min <= alpha_max <= 1");
  check(reference_samples >= 10 * total_channels(), "reference_samples must be at least 10x the channel count");
  check(drift_ratio >= 0.0, "drift_ratio must be non-negative");
  if (mode == Mode::Adaptive && !drift_profile.empty()) {
    const long batches = (iterations + reuse - 1) / reuse;
    check(static_cast<long>(drift_profile.size()) >= batches, "drift_profile is shorter than the number of batches");
  }
  check(total_channels() >= 2 || components == 1, "need at least 2 sources for the benchmark signal model");
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(run), static_cast<std::uint32_t>(stream)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<SourceSpec> benchmark_sources(const ExperimentConfig& cfg, Index m, std::uint64_t seed) {
  std::vector<SourceSpec> specs;
  specs.push_back(standardized(SourceSpec::sinusoid(cfg.sinusoid_frequency)));
  if (m >= 2) specs.push_back(standardized(SourceSpec::square(cfg.square_frequency)));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> alpha(cfg.alpha_min, cfg.alpha_max);
  for (Index j = 2; j < m; ++j) specs.push_back(standardized(SourceSpec::mixed_noise(alpha(rng))));
  return specs;
}

RunSetup make_run_setup(const ExperimentConfig& cfg, int run) {
  RunSetup s;
  const auto r = static_cast<std::uint64_t>(run);
  s.run_seed = derive_seed(cfg.seed, r, 0);
  if (!cfg.graph_file.empty()) {
    std::ifstream in(cfg.graph_file);
    require(static_cast<bool>(in), ErrorKind::Io, "cannot open graph file '" + cfg.graph_file + "'");
    s.graph = read_edge_list(in);
    require(s.graph.nodes() == cfg.nodes && s.graph.channels == cfg.resolved_channels(), ErrorKind::Config,
            "graph file disagrees with nodes/channels in the config");
  } else if (cfg.nodes == 1) {
    s.graph = make_graph(Adjacency::Constant(1, 1, false), cfg.resolved_channels());
  } else {
    s.graph = er_graph(cfg.nodes, cfg.er_probability, cfg.resolved_channels(), derive_seed(cfg.seed, r, kGraphStream));
  }
  const Index m = cfg.total_channels();
  s.model.mixing = random_mixing(m, derive_seed(cfg.seed, r, kMixingStream));
  s.model.sources = benchmark_sources(cfg, m, derive_seed(cfg.seed, r, kAlphaStream));
  s.noise_seed = derive_seed(cfg.seed, r, kNoiseStream);
  s.reference_seed = derive_seed(cfg.seed, r, kReferenceStream);
  s.engine_seed = derive_seed(cfg.seed, r, kEngineStream);
  s.solver_seed = derive_seed(cfg.seed, r, kSolverStream);

  const Batch calib = generate_sources(s.model.sources, cfg.samples, -static_cast<std::int64_t>(cfg.samples),
                                       derive_seed(cfg.seed, r, kCalibrationStream));
  s.model = calibrated(std::move(s.model), calib);

  if (cfg.mode == Mode::Adaptive) {
    const Index batches = (cfg.iterations + cfg.reuse - 1) / cfg.reuse;
    auto profile = cfg.drift_profile.empty() ? default_drift_profile(batches) : cfg.drift_profile;
    s.drift = make_drift_schedule(s.model.mixing, std::move(profile), cfg.drift_ratio,
                                  derive_seed(cfg.seed, r, kDriftStream));
  }
  return s;
}

MatrixXd observation_batch(const MixingModel& model, Index samples, long batch_index, std::uint64_t noise_seed) {
  const auto t0 = static_cast<std::int64_t>(batch_index) * static_cast<std::int64_t>(samples);
  return mix(model, generate_sources(model.sources, samples, t0, noise_seed)).data;
}

MatrixXd centralized_reference(const MatrixXd& full_batch, Index components, const ContrastFunction& contrast,
                               const SolverOptions& opts) {
  return run_fastica(full_batch, components, contrast, opts).demixing_raw;
}

EngineOptions engine_options(const ExperimentConfig& cfg, bool partial) {
  EngineOptions o;
  o.components = cfg.components;
  o.contrast = ContrastFunction{cfg.contrast};
  o.reuse = cfg.reuse;
  o.warm_start = cfg.warm_start;
  if (partial) {
    o.solver = partial_solver_options();
    o.solver.tol = cfg.partial_tol;
    o.solver.max_inner_iters = cfg.partial_max_inner_iters;
  } else {
    o.solver.tol = cfg.solver_tol;
    o.solver.max_inner_iters = cfg.solver_max_inner_iters;
  }
  return o;
}

namespace {

/// Mixing model per batch index; drift compounds from one batch to the next.
class ModelTimeline {
 public:
  ModelTimeline(MixingModel base, std::optional<DriftSchedule> drift)
      : current_(std::move(base)), drift_(std::move(drift)) {}

  const MixingModel& at(long batch_index) {
    require(batch_index >= index_, ErrorKind::InvalidInput, "model timeline only moves forward");
    while (index_ < batch_index) {
      ++index_;
      if (drift_) current_ = drift_mixing(current_, *drift_, index_);
    }
    return current_;
  }

 private:
  MixingModel current_;
  std::optional<DriftSchedule> drift_;
  long index_ = -1;
};

}  // namespace

RunTrace run_single(const ExperimentConfig& cfg, int run, const EngineOptions& engine_opts) {
  RunTrace out;
  out.run = run;
  if (cfg.iterations == 0) return out;

  const RunSetup setup = make_run_setup(cfg, run);
  const ContrastFunction contrast{cfg.contrast};
  SolverOptions ref_opts;
  ref_opts.tol = cfg.solver_tol;
  ref_opts.max_inner_iters = cfg.solver_max_inner_iters;
  ref_opts.rng_seed = setup.solver_seed;

  auto timeline = std::make_shared<ModelTimeline>(setup.model, setup.drift);
  const Index n = cfg.samples;
  const std::uint64_t noise_seed = setup.noise_seed;
  BatchProvider provider = [timeline, n, noise_seed](long b) {
    return observation_batch(timeline->at(b), n, b, noise_seed);
  };

  EngineOptions opts = engine_opts;
  opts.solver.rng_seed = setup.solver_seed;
  DistricaEngine engine(setup.graph, opts, provider, setup.engine_seed);

  MatrixXd reference;
  long reference_index = -1;
  if (cfg.mode != Mode::Adaptive) {
    const MatrixXd ref_batch =
        mix(setup.model, generate_sources(setup.model.sources, cfg.reference_samples,
                                          -static_cast<std::int64_t>(cfg.reference_samples), setup.reference_seed))
            .data;
    reference = centralized_reference(ref_batch, cfg.components, contrast, ref_opts);
  }

  for (int i = 0; i < cfg.iterations; ++i) {
    const auto start = Clock::now();
    const long b = engine.batch_index();
    const IterationRecord rec = engine.step();
    const double elapsed = seconds_since(start);
    if (cfg.mode == Mode::Adaptive && b != reference_index) {
      // Independent noise realization of the model that generated this batch.
      const MatrixXd ref_batch =
          mix(timeline->at(b), generate_sources(setup.model.sources, n, static_cast<std::int64_t>(b) * n,
                                                setup.reference_seed))
              .data;
      reference = centralized_reference(ref_batch, cfg.components, contrast, ref_opts);
      reference_index = b;
    }
    out.epsilon.push_back(normalized_error(rec.filter, reference));
    out.epsilon_aligned.push_back(aligned_error(rec.filter, reference));
    out.objective.push_back(rec.objective);
    out.scalars_fused.push_back(rec.tally.scalars_fused);
    out.scalars_disseminated.push_back(rec.tally.scalars_disseminated);
    out.wall_seconds.push_back(elapsed);
  }
  return out;
}

ErrorTrace aggregate(const ExperimentConfig& cfg, const std::vector<RunTrace>& runs) {
  ErrorTrace trace;
  trace.config = cfg;
  for (const auto& r : runs) {
    trace.included_runs.push_back(r.run);
    trace.run_seeds.push_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(r.run), 0));
  }
  if (runs.empty()) return trace;
  const std::size_t iters = runs.front().epsilon.size();
  for (std::size_t i = 0; i < iters; ++i) {
    TracePoint p;
    p.iteration = static_cast<long>(i);
    std::vector<double> obj;
    for (const auto& r : runs) {
      p.epsilon_runs.push_back(r.epsilon[i]);
      p.epsilon_aligned_runs.push_back(r.epsilon_aligned[i]);
      obj.push_back(r.objective[i]);
      p.wall_seconds = std::max(p.wall_seconds, r.wall_seconds[i]);
    }
    p.epsilon_median = median(p.epsilon_runs);
    p.epsilon_aligned_median = median(p.epsilon_aligned_runs);
    p.objective = median(obj);
    p.scalars_fused = runs.front().scalars_fused[i];
    p.scalars_disseminated = runs.front().scalars_disseminated[i];
    trace.points.push_back(std::move(p));
  }
  return trace;
}

ErrorTrace run_experiment(const ExperimentConfig& cfg, int jobs) {
  cfg.validate();
  const auto start = Clock::now();
  const bool partial = cfg.mode == Mode::PartialSolve;
  const int runs = cfg.monte_carlo_runs;

  std::vector<std::optional<RunTrace>> primary(static_cast<std::size_t>(runs));
  std::vector<std::optional<RunTrace>> exact(static_cast<std::size_t>(runs));
  std::vector<std::string> failures(static_cast<std::size_t>(runs));

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int r = next++; r < runs; r = next++) {
      const auto idx = static_cast<std::size_t>(r);
      try {
        primary[idx] = run_single(cfg, r, engine_options(cfg, partial));
        if (partial) exact[idx] = run_single(cfg, r, engine_options(cfg, false));
      } catch (const Error& e) {
        primary[idx].reset();
        failures[idx] = e.what();
      }
    }
  };
  const int threads = std::clamp(jobs, 1, runs);
  std::vector<std::thread> pool;
  for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::vector<RunTrace> ok;
  std::vector<RunTrace> ok_exact;
  std::vector<std::string> warnings;
  for (int r = 0; r < runs; ++r) {
    const auto idx = static_cast<std::size_t>(r);
    if (primary[idx]) {
      ok.push_back(std::move(*primary[idx]));
      if (partial) ok_exact.push_back(std::move(*exact[idx]));
    } else {
      warnings.push_back("run " + std::to_string(r) + " excluded: " + failures[idx]);
    }
  }
  require(!ok.empty(), ErrorKind::NumericalFailure,
          "all " + std::to_string(runs) + " runs failed; first error: " + failures.front());

  ErrorTrace trace = aggregate(cfg, ok);
  trace.warnings = warnings;
  if (partial) {
    auto base = std::make_shared<ErrorTrace>(aggregate(cfg, ok_exact));
    base->warnings = warnings;
    trace.baseline = std::move(base);
  }
  trace.wall_seconds = seconds_since(start);
  return trace;
}

}  // namespace districa
