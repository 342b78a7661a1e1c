#ifndef DELAYGP_MANIFEST_HPP
#define DELAYGP_MANIFEST_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "delaygp/config.hpp"

namespace delaygp {

inline constexpr const char* kToolVersion = "delaygp 0.1.0";

// Every command writes exactly one manifest next to its outputs.  The
// manifest holds the fully resolved configuration, so `delaygp rerun
// manifest.json` reproduces the output files byte for byte.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::string tool_version = kToolVersion;
  // (path as given, FNV-1a 64 digest in hex) per input file.
  std::vector<std::pair<std::string, std::string>> input_digests;
  std::vector<std::string> outputs;
};

// FNV-1a 64-bit of the file bytes, as fixed-width hex.  A fingerprint for
// provenance records, not a cryptographic hash.
std::string fnv1a_digest(const std::filesystem::path& file);

void write_manifest(const std::filesystem::path& file, const RunManifest& m);
RunManifest read_manifest(const std::filesystem::path& file);

}  // namespace delaygp

#endif
