#include "districa/config.hpp"

#include <fstream>
#include <functional>
#include <map>

namespace districa {

using nlohmann::json;

namespace {

template <typename T>
T get_as(const json& value, const std::string& key) {
  try {
    return value.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "key '" + key + "': " + e.what());
  }
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
  require(j.is_object(), ErrorKind::Config, "config must be a JSON object");
  ExperimentConfig c;
  using Setter = std::function<void(const json&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"nodes", [&](const json& v, const std::string& k) { c.nodes = get_as<int>(v, k); }},
      {"channels", [&](const json& v, const std::string& k) { c.channels = get_as<std::vector<Index>>(v, k); }},
      {"components", [&](const json& v, const std::string& k) { c.components = get_as<Index>(v, k); }},
      {"samples", [&](const json& v, const std::string& k) { c.samples = get_as<Index>(v, k); }},
      {"er_probability", [&](const json& v, const std::string& k) { c.er_probability = get_as<double>(v, k); }},
      {"graph_file", [&](const json& v, const std::string& k) { c.graph_file = get_as<std::string>(v, k); }},
      {"contrast", [&](const json& v, const std::string& k) { c.contrast = parse_contrast(get_as<std::string>(v, k)); }},
      {"solver_tol", [&](const json& v, const std::string& k) { c.solver_tol = get_as<double>(v, k); }},
      {"solver_max_inner_iters",
       [&](const json& v, const std::string& k) { c.solver_max_inner_iters = get_as<int>(v, k); }},
      {"reuse", [&](const json& v, const std::string& k) { c.reuse = get_as<int>(v, k); }},
      {"monte_carlo_runs", [&](const json& v, const std::string& k) { c.monte_carlo_runs = get_as<int>(v, k); }},
      {"iterations", [&](const json& v, const std::string& k) { c.iterations = get_as<int>(v, k); }},
      {"mode", [&](const json& v, const std::string& k) { c.mode = parse_mode(get_as<std::string>(v, k)); }},
      {"seed", [&](const json& v, const std::string& k) { c.seed = get_as<std::uint64_t>(v, k); }},
      {"warm_start", [&](const json& v, const std::string& k) { c.warm_start = get_as<bool>(v, k); }},
      {"sinusoid_frequency", [&](const json& v, const std::string& k) { c.sinusoid_frequency = get_as<double>(v, k); }},
      {"square_frequency", [&](const json& v, const std::string& k) { c.square_frequency = get_as<double>(v, k); }},
      {"alpha_min", [&](const json& v, const std::string& k) { c.alpha_min = get_as<double>(v, k); }},
      {"alpha_max", [&](const json& v, const std::string& k) { c.alpha_max = get_as<double>(v, k); }},
      {"reference_samples", [&](const json& v, const std::string& k) { c.reference_samples = get_as<Index>(v, k); }},
      {"drift_ratio", [&](const json& v, const std::string& k) { c.drift_ratio = get_as<double>(v, k); }},
      {"drift_profile",
       [&](const json& v, const std::string& k) { c.drift_profile = get_as<std::vector<double>>(v, k); }},
      {"partial_tol", [&](const json& v, const std::string& k) { c.partial_tol = get_as<double>(v, k); }},
      {"partial_max_inner_iters",
       [&](const json& v, const std::string& k) { c.partial_max_inner_iters = get_as<int>(v, k); }},
  };
  for (const auto& [key, value] : j.items()) {
    const auto it = setters.find(key);
    require(it != setters.end(), ErrorKind::Config, "unknown config key '" + key + "'");
    it->second(value, key);
  }
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  return json{
      {"nodes", c.nodes},
      {"channels", c.resolved_channels()},
      {"components", c.components},
      {"samples", c.samples},
      {"er_probability", c.er_probability},
      {"graph_file", c.graph_file},
      {"contrast", std::string(to_string(c.contrast))},
      {"solver_tol", c.solver_tol},
      {"solver_max_inner_iters", c.solver_max_inner_iters},
      {"reuse", c.reuse},
      {"monte_carlo_runs", c.monte_carlo_runs},
      {"iterations", c.iterations},
      {"mode", to_string(c.mode)},
      {"seed", c.seed},
      {"warm_start", c.warm_start},
      {"sinusoid_frequency", c.sinusoid_frequency},
      {"square_frequency", c.square_frequency},
      {"alpha_min", c.alpha_min},
      {"alpha_max", c.alpha_max},
      {"reference_samples", c.reference_samples},
      {"drift_ratio", c.drift_ratio},
      {"drift_profile", c.drift_profile},
      {"partial_tol", c.partial_tol},
      {"partial_max_inner_iters", c.partial_max_inner_iters},
  };
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Config, "cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, "'" + path + "': " + e.what());
  }
  return config_from_json(j);
}

}  // namespace districa
