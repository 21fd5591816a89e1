#ifndef DISTRICA_TRACE_IO_HPP
#define DISTRICA_TRACE_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "districa/experiment.hpp"

namespace districa {

/// CSV header: iter, epsilon_median, epsilon_run_<r>..., objective,
/// scalars_fused, scalars_disseminated, epsilon_aligned_median,
/// epsilon_aligned_run_<r>... where <r> are the included run indices.
std::vector<std::string> trace_header(const ErrorTrace& trace);

void write_trace_csv(const ErrorTrace& trace, std::ostream& os);

/// Writes <dir>/trace.csv and <dir>/trace.json (resolved config, seeds,
/// warnings); in partial-solve mode also <dir>/trace_exact.csv.
void emit_trace(const ErrorTrace& trace, const std::filesystem::path& dir);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

struct TraceSummary {
  long iterations = 0;
  double final_epsilon = 0.0;
  double final_epsilon_aligned = 0.0;
  std::optional<long> first_below_threshold;          // raw metric
  std::optional<long> first_below_threshold_aligned;  // aligned metric
};

TraceSummary summarize(const CsvTable& table, double threshold);

}  // namespace districa

#endif  // DISTRICA_TRACE_IO_HPP
