#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace trilin::manifest {

std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hash_label(std::uint64_t h);  // "fnv1a64:<16 hex digits>"

// Sidecar JSON describing one CLI invocation: resolved configuration, input
// and output hashes, wall-clock duration, and the truncation-leakage
// summary. Every CSV the run produced points back at this file.
struct Builder {
  std::string command;  // "modes", "run avoided-crossing", "tomography", ...
  nlohmann::ordered_json resolved_config;
  std::vector<std::pair<std::string, std::string>> inputs;   // name -> hash
  std::vector<std::pair<std::string, std::string>> outputs;  // name -> hash
  double duration_s = 0.0;
  nlohmann::ordered_json extra;  // leakage summary, diagnostics; may be null

  nlohmann::ordered_json to_json() const;
  void write(const std::filesystem::path& path) const;
};

}  // namespace trilin::manifest
