#ifndef DELAYGP_CONFIG_HPP
#define DELAYGP_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "delaygp/errors.hpp"

namespace delaygp {

// Flat configuration store filled from a TOML file (see parse limits below)
// plus command line overrides.  Keys are dotted: "grid.n_data".
//
// The reader covers the TOML subset the tool needs: comments, one level of
// [tables], and key = value with value one of string, integer, float,
// boolean, or a homogeneous array of those.
class ConfigMap {
 public:
  using Value = std::variant<bool, std::int64_t, double, std::string,
                             std::vector<double>, std::vector<std::string>>;

  static ConfigMap parse_file(const std::filesystem::path& file);
  static ConfigMap parse_string(const std::string& text,
                                const std::string& origin = "<config>");
  static ConfigMap from_json(const nlohmann::json& j);

  bool has(const std::string& key) const;

  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key,
                         const std::string& fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<double> get_double_list(const std::string& key,
                                      std::vector<double> fallback) const;
  std::vector<std::string> get_string_list(
      const std::string& key, std::vector<std::string> fallback) const;

  // "key=value" override from the command line; the value is parsed with
  // the same grammar as in the file.
  void apply_override(const std::string& assignment);
  void set(const std::string& key, Value value);

  // Full resolved contents, for manifests.
  nlohmann::json to_json() const;

  const std::map<std::string, Value>& entries() const { return values_; }

 private:
  std::map<std::string, Value> values_;
};

}  // namespace delaygp

#endif
