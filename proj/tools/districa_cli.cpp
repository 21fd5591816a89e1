// districa_cli: run distributed ICA experiments, manage topologies, summarize traces.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"

#include "districa/config.hpp"
#include "districa/experiment.hpp"
#include "districa/network.hpp"
#include "districa/trace_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::string default_output_dir() {
  if (const char* env = std::getenv("DISTRICA_OUTPUT_DIR"); env && *env) return env;
  return "districa_out";
}

}  // namespace

int main(int argc, char** argv) {
  using namespace districa;
  CLI::App app{"Distributed FastICA over simulated sensor networks"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "run a Monte-Carlo experiment and write its trace");
  std::string config_path;
  std::string out_dir;
  std::optional<int> nodes;
  std::optional<int> iters;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> mode;
  std::optional<int> runs;
  int jobs = 1;
  run->add_option("-c,--config", config_path, "JSON experiment config (defaults when omitted)");
  run->add_option("-o,--out", out_dir, "output directory (default: $DISTRICA_OUTPUT_DIR or ./districa_out)");
  run->add_option("--nodes", nodes, "override the node count");
  run->add_option("--iters", iters, "override the iteration count");
  run->add_option("--seed", seed, "override the base seed");
  run->add_option("--mode", mode, "stationary | adaptive | partial");
  run->add_option("--runs", runs, "override the Monte-Carlo run count");
  run->add_option("-j,--jobs", jobs, "worker threads for independent runs")->check(CLI::PositiveNumber);

  // graph
  auto* graph = app.add_subcommand("graph", "import or export edge-list topologies");
  graph->require_subcommand(1);
  auto* gexport = graph->add_subcommand("export", "draw an Erdős–Rényi graph and write it as an edge list");
  int g_nodes = 5;
  Index g_channels = 5;
  double g_prob = 0.8;
  std::uint64_t g_seed = 1;
  std::string g_out;
  gexport->add_option("--nodes", g_nodes, "node count")->check(CLI::PositiveNumber);
  gexport->add_option("--channels", g_channels, "sensors per node")->check(CLI::PositiveNumber);
  gexport->add_option("--probability", g_prob, "edge probability");
  gexport->add_option("--seed", g_seed, "seed");
  gexport->add_option("-o,--out", g_out, "output file (stdout when omitted)");
  auto* gimport = graph->add_subcommand("import", "validate an edge-list file and print a summary");
  std::string g_in;
  gimport->add_option("file", g_in, "edge-list file")->required();

  // report
  auto* report = app.add_subcommand("report", "summarize a trace directory");
  std::string report_dir;
  double threshold = 1e-3;
  report->add_option("dir", report_dir, "directory containing trace.csv")->required();
  report->add_option("--threshold", threshold, "error threshold for iterations-to-threshold");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
      if (nodes) {
        if (!cfg.channels.empty()) cfg.channels.resize(static_cast<std::size_t>(std::max(*nodes, 0)), cfg.channels.back());
        cfg.nodes = *nodes;
      }
      if (iters) cfg.iterations = *iters;
      if (seed) cfg.seed = *seed;
      if (mode) cfg.mode = parse_mode(*mode);
      if (runs) cfg.monte_carlo_runs = *runs;
      cfg.validate();
      const std::string dir = out_dir.empty() ? default_output_dir() : out_dir;

      const ErrorTrace trace = run_experiment(cfg, jobs);
      for (const auto& w : trace.warnings) std::cerr << "warning: " << w << '\n';
      emit_trace(trace, dir);
      std::cout << "wrote " << trace.points.size() << " iterations (" << trace.included_runs.size() << "/"
                << cfg.monte_carlo_runs << " runs) to " << dir << '\n';
      if (!trace.points.empty()) {
        std::cout << std::scientific << std::setprecision(3)
                  << "final epsilon " << trace.points.back().epsilon_median << ", aligned "
                  << trace.points.back().epsilon_aligned_median << '\n';
      }
    } else if (*gexport) {
      const auto g = er_graph(g_nodes, g_prob, std::vector<Index>(static_cast<std::size_t>(g_nodes), g_channels), g_seed);
      if (g_out.empty()) {
        write_edge_list(g, std::cout);
      } else {
        std::ofstream out(g_out);
        require(static_cast<bool>(out), ErrorKind::Io, "cannot write '" + g_out + "'");
        write_edge_list(g, out);
      }
      std::cerr << "edges " << g.edge_count() << ", rejected draws " << g.resamples << '\n';
    } else if (*gimport) {
      std::ifstream in(g_in);
      require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + g_in + "'");
      const auto g = read_edge_list(in);
      std::cout << "nodes " << g.nodes() << ", channels " << g.total_channels() << ", edges " << g.edge_count()
                << ", connected " << (g.connected() ? "yes" : "no") << '\n';
      if (!g.connected()) return kExitConfig;
    } else if (*report) {
      const auto table = read_csv(std::filesystem::path(report_dir) / "trace.csv");
      const auto s = summarize(table, threshold);
      std::cout << "iterations " << s.iterations << '\n'
                << std::scientific << std::setprecision(4) << "final epsilon " << s.final_epsilon << '\n'
                << "final aligned epsilon " << s.final_epsilon_aligned << '\n';
      auto show = [](const std::optional<long>& v) { return v ? std::to_string(*v) : std::string("never"); };
      std::cout << "first iteration below " << threshold << ": " << show(s.first_below_threshold) << " (aligned "
                << show(s.first_below_threshold_aligned) << ")\n";
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::Config || e.kind() == ErrorKind::InvalidInput ? kExitConfig : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}
