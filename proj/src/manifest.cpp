#include "trilin/manifest.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "trilin/errors.hpp"
#include "trilin/version.hpp"

namespace trilin::manifest {

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot hash: " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= std::uint8_t(buf[i]);
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string hash_label(std::uint64_t h) {
  std::ostringstream out;
  out << "fnv1a64:" << std::hex << std::setfill('0') << std::setw(16) << h;
  return out.str();
}

nlohmann::ordered_json Builder::to_json() const {
  nlohmann::ordered_json j;
  j["tool"] = "trilin";
  j["version"] = version;
  j["command"] = command;
  j["resolved_config"] = resolved_config;
  nlohmann::ordered_json in_obj = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : inputs) in_obj[name] = hash;
  j["inputs"] = in_obj;
  nlohmann::ordered_json out_obj = nlohmann::ordered_json::object();
  for (const auto& [name, hash] : outputs) out_obj[name] = hash;
  j["outputs"] = out_obj;
  j["duration_s"] = duration_s;
  if (!extra.is_null())
    for (auto& [key, value] : extra.items()) j[key] = value;
  return j;
}

void Builder::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write manifest: " + path.string());
  out << to_json().dump(2) << "\n";
  if (!out) throw ConfigError("manifest write failed: " + path.string());
}

}  // namespace trilin::manifest
