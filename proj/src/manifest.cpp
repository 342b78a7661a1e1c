#include "delaygp/manifest.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>

namespace delaygp {

std::string fnv1a_digest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open " + file.string() + " for digest");
  std::uint64_t hash = 14695981039346656037ULL;
  char buf[8192];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(hash));
  return hex;
}

void write_manifest(const std::filesystem::path& file, const RunManifest& m) {
  nlohmann::json j;
  j["command"] = m.command;
  j["config"] = m.config;
  j["tool_version"] = m.tool_version;
  nlohmann::json digests = nlohmann::json::object();
  for (const auto& [path, digest] : m.input_digests) digests[path] = digest;
  j["input_digests"] = digests;
  j["outputs"] = m.outputs;
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write manifest " + file.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + file.string());
}

RunManifest read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw IoError("cannot open manifest " + file.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(file.string(), 0, e.what());
  }
  RunManifest m;
  m.command = j.at("command").get<std::string>();
  m.config = j.at("config");
  m.tool_version = j.value("tool_version", std::string(kToolVersion));
  if (j.contains("input_digests"))
    for (const auto& [path, digest] : j["input_digests"].items())
      m.input_digests.emplace_back(path, digest.get<std::string>());
  if (j.contains("outputs"))
    m.outputs = j["outputs"].get<std::vector<std::string>>();
  return m;
}

}  // namespace delaygp
