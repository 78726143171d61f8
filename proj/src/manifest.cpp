#include "flexlink/manifest.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace flexlink {

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string fnv1a_hex_of_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return fnv1a_hex(os.str());
}

std::string iso8601_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof buf, "%FT%TZ", std::gmtime(&t));
  return buf;
}

nlohmann::json RunManifest::to_json() const {
  return {{"command", command},
          {"tool_version", tool_version},
          {"seed", seed},
          {"input_digests", input_digests},
          {"config_digest", config_digest},
          {"started_at", started_at},
          {"finished_at", finished_at},
          {"wall_seconds", wall_seconds},
          {"outputs", outputs},
          {"manifest_schema", 1}};
}

void RunManifest::write(const std::string& directory) const {
  namespace fs = std::filesystem;
  const fs::path path = fs::path(directory) / "manifest.json";
  if (fs::exists(path))
    throw std::runtime_error("output directory already holds a manifest: " +
                             path.string());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_json().dump(2) << "\n";
}

}  // namespace flexlink
