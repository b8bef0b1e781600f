#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace transitepi {

std::string sha256_hex(std::string_view bytes);

/// Throws data_error(missing_file) when the file cannot be read.
std::string sha256_file(std::string const& path);

struct file_digest {
  std::string path;
  std::string sha256;

  friend bool operator==(file_digest const&, file_digest const&) = default;
};

/// Everything needed to rerun a command: its arguments (including the
/// resolved configuration), input digests and the digests of every output
/// written next to the manifest.
struct run_manifest {
  std::string tool{"transitepi"};
  std::string version;
  std::string command;
  std::uint64_t seed{0};
  nlohmann::json arguments = nlohmann::json::object();
  std::vector<file_digest> inputs;
  std::vector<file_digest> outputs;  // relative to the output directory
};

std::string serialize_manifest(run_manifest const&);

/// Throws config_error for malformed manifests.
run_manifest parse_manifest(std::string_view text);

std::string tool_version();

}  // namespace transitepi
