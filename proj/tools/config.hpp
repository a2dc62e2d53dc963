#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace decolab::cli {

using json = nlohmann::ordered_json;

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kSchemaVersion = 1;

// Time unit each experiment accepts (tau_dec is also accepted by dicke-cat).
std::string time_unit(const std::string& experiment);
const std::vector<std::string>& experiments();

struct ExperimentConfig {
  std::string experiment;
  std::string name;
  std::string output_dir;
  json params;    // validated, defaults filled in
  json numerics;  // validated, defaults filled in
  json source;    // the normalized document, echoed into the manifest
};

// Validates against the schema of the named experiment; throws SchemaError.
ExperimentConfig parse_config(const json& doc);
ExperimentConfig load_config(const std::string& path);

struct Preset {
  std::string name;
  std::string figure;
  std::string description;
  int budget_seconds;
  json config;
};

const std::vector<Preset>& presets();
const Preset* find_preset(const std::string& name);

// Uniform grid or explicit list, already converted to the experiment's unit
// (tau_dec is resolved by the caller).
struct TimeSpec {
  std::vector<double> values;
  std::string unit;
};
TimeSpec time_spec(const json& node);

}  // namespace decolab::cli
