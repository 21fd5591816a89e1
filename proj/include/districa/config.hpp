#ifndef DISTRICA_CONFIG_HPP
#define DISTRICA_CONFIG_HPP

#include <string>

#include "json.hpp"

#include "districa/experiment.hpp"

namespace districa {

/// JSON object with every ExperimentConfig field (snake_case keys). Missing
/// keys keep their defaults; unknown keys are a config error.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

ExperimentConfig load_config(const std::string& path);

}  // namespace districa

#endif  // DISTRICA_CONFIG_HPP
