#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace flexlink {

inline constexpr const char* kToolVersion = "0.1.0";

// FNV-1a 64-bit digest, hex encoded.
std::string fnv1a_hex(const std::string& bytes);
std::string fnv1a_hex_of_file(const std::string& path);

// One manifest per output directory; reruns with identical inputs and seed
// reproduce identical outputs, which the digests make checkable.
struct RunManifest {
  std::string command;
  std::string tool_version = kToolVersion;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> input_digests;  // path -> digest
  std::string config_digest;
  std::string started_at;
  std::string finished_at;
  double wall_seconds = 0.0;
  std::vector<std::string> outputs;

  nlohmann::json to_json() const;
  // Writes <directory>/manifest.json; throws if one already exists.
  void write(const std::string& directory) const;
};

std::string iso8601_now();

}  // namespace flexlink
