#include "districa/trace_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "districa/config.hpp"

namespace districa {

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot write '" + path.string() + "'");
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  require(!out.fail(), ErrorKind::Io, "failed writing '" + path.string() + "'");
}

}  // namespace

std::vector<std::string> trace_header(const ErrorTrace& trace) {
  std::vector<std::string> h{"iter", "epsilon_median"};
  for (int r : trace.included_runs) h.push_back("epsilon_run_" + std::to_string(r));
  h.insert(h.end(), {"objective", "scalars_fused", "scalars_disseminated", "epsilon_aligned_median"});
  for (int r : trace.included_runs) h.push_back("epsilon_aligned_run_" + std::to_string(r));
  return h;
}

void write_trace_csv(const ErrorTrace& trace, std::ostream& os) {
  const auto header = trace_header(trace);
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const TracePoint& p : trace.points) {
    os << p.iteration << ',' << format_double(p.epsilon_median);
    for (double e : p.epsilon_runs) os << ',' << format_double(e);
    os << ',' << format_double(p.objective) << ',' << p.scalars_fused << ',' << p.scalars_disseminated << ','
       << format_double(p.epsilon_aligned_median);
    for (double e : p.epsilon_aligned_runs) os << ',' << format_double(e);
    os << '\n';
  }
}

void emit_trace(const ErrorTrace& trace, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());

  const auto csv_path = dir / "trace.csv";
  auto csv = open_output(csv_path);
  write_trace_csv(trace, csv);
  close_checked(csv, csv_path);

  if (trace.baseline) {
    const auto exact_path = dir / "trace_exact.csv";
    auto exact = open_output(exact_path);
    write_trace_csv(*trace.baseline, exact);
    close_checked(exact, exact_path);
  }

  nlohmann::json meta{
      {"config", config_to_json(trace.config)},
      {"included_runs", trace.included_runs},
      {"run_seeds", trace.run_seeds},
      {"warnings", trace.warnings},
      {"iterations", trace.points.size()},
      {"columns", trace_header(trace)},
      {"wall_seconds", trace.wall_seconds},
  };
  const auto json_path = dir / "trace.json";
  auto js = open_output(json_path);
  js << meta.dump(2) << '\n';
  close_checked(js, json_path);
}

std::optional<std::size_t> CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  return std::nullopt;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open '" + path.string() + "'");
  CsvTable t;
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::Io, "'" + path.string() + "' is empty");
  {
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.header.push_back(cell);
  }
  long lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    require(row.size() == t.header.size(), ErrorKind::Io,
            path.string() + ":" + std::to_string(lineno) + ": column count mismatch");
    t.rows.push_back(std::move(row));
  }
  return t;
}

TraceSummary summarize(const CsvTable& table, double threshold) {
  const auto it = table.column("iter");
  const auto eps = table.column("epsilon_median");
  const auto aligned = table.column("epsilon_aligned_median");
  require(it && eps && aligned, ErrorKind::Io, "trace is missing required columns");
  TraceSummary s;
  s.iterations = static_cast<long>(table.rows.size());
  for (const auto& row : table.rows) {
    const long i = static_cast<long>(row[*it]);
    if (!s.first_below_threshold && row[*eps] < threshold) s.first_below_threshold = i;
    if (!s.first_below_threshold_aligned && row[*aligned] < threshold) s.first_below_threshold_aligned = i;
  }
  if (!table.rows.empty()) {
    s.final_epsilon = table.rows.back()[*eps];
    s.final_epsilon_aligned = table.rows.back()[*aligned];
  }
  return s;
}

}  // namespace districa
