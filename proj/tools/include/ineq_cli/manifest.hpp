#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace ineq::cli {

// Hex SHA-256 of a file's bytes. Throws std::runtime_error when unreadable.
std::string sha256_file(const std::filesystem::path& path);

struct FileDigest {
  std::string path;
  std::string sha256;
};

// Everything needed to rerun a pipeline and check its products.
struct Manifest {
  std::string tool_version;
  std::string subcommand;
  std::string config_json;  // serialized config echo
  std::vector<FileDigest> inputs;   // paths as given on the command line
  std::vector<FileDigest> outputs;  // relative to the manifest directory
  std::string created_utc;
};

std::string to_json(const Manifest& manifest);
Manifest manifest_from_json(const std::string& text);

struct Mismatch {
  std::string path;
  std::string reason;
};

// Re-hashes every file listed in the manifest at `manifest_path`.
std::vector<Mismatch> verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace ineq::cli
