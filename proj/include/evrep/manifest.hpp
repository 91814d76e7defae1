#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evrep {

inline constexpr std::string_view kToolVersion = "evrep 1.0.0";

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
/// 16 lowercase hex digits.
std::string hex_digest(std::uint64_t digest);

struct FileDigest {
  std::string path;
  std::uint64_t fnv1a64 = 0;
};

/// Provenance record written next to every output artifact.
struct RunManifest {
  std::string tool_version{kToolVersion};
  std::vector<std::string> command_line;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;

  void add_input(const std::filesystem::path& path);
  void add_output(const std::filesystem::path& path);

  std::string to_json() const;
  /// Writes to_json() to `path`.
  void write(const std::filesystem::path& path) const;
};

/// `<artifact>.manifest.json`
std::filesystem::path manifest_path_for(const std::filesystem::path& artifact);

}  // namespace evrep
