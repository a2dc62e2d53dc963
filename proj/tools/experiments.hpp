#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace decolab::cli {

struct RunResult {
  std::vector<std::string> files;  // relative to the output directory
  json summary;
};

// Runs one experiment writing into out_dir (created by the caller).
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace decolab::cli
