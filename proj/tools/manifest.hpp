#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace decolab::cli {

std::string sha256_file(const std::string& path);

// manifest.json in `dir`: config echo plus every listed file (relative to dir)
// with size and SHA-256. Contains nothing time- or host-dependent.
void write_manifest(const std::string& dir, const ExperimentConfig& cfg, std::vector<std::string> files,
                    const json& summary);

}  // namespace decolab::cli
