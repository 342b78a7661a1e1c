#include "delaygp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace delaygp {

namespace {

std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t");
  const std::size_t b = s.find_last_not_of(" \t");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

// Strips a trailing comment that is not inside a string literal.
std::string strip_comment(const std::string& s) {
  bool in_string = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_string = !in_string;
    if (s[i] == '#' && !in_string) return s.substr(0, i);
  }
  return s;
}

bool parse_number(const std::string& t, double* out) {
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), *out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool looks_integer(const std::string& t) {
  return t.find_first_of(".eE") == std::string::npos;
}

ConfigMap::Value parse_scalar(const std::string& origin, long line,
                              const std::string& raw) {
  const std::string t = trim(raw);
  if (t.empty()) throw ParseError(origin, line, "empty value");
  if (t == "true") return true;
  if (t == "false") return false;
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"')
      throw ParseError(origin, line, "unterminated string");
    return t.substr(1, t.size() - 2);
  }
  double v = 0.0;
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (!parse_number(t, &v))
    throw ParseError(origin, line, "cannot parse value '" + t + "'");
  if (looks_integer(t)) return static_cast<std::int64_t>(std::llround(v));
  return v;
}

ConfigMap::Value parse_value(const std::string& origin, long line,
                             const std::string& raw) {
  const std::string t = trim(raw);
  if (t.empty()) throw ParseError(origin, line, "empty value");
  if (t.front() != '[') return parse_scalar(origin, line, t);
  if (t.back() != ']') throw ParseError(origin, line, "unterminated array");
  const std::string inner = t.substr(1, t.size() - 2);
  std::vector<std::string> parts;
  std::string field;
  bool in_string = false;
  for (char c : inner) {
    if (c == '"') in_string = !in_string;
    if (c == ',' && !in_string) {
      parts.push_back(field);
      field.clear();
    } else {
      field += c;
    }
  }
  if (!trim(field).empty() || parts.empty()) parts.push_back(field);
  bool all_strings = true;
  for (const std::string& p : parts)
    if (trim(p).empty() || trim(p).front() != '"') all_strings = false;
  if (all_strings && !parts.empty() && !trim(parts[0]).empty()) {
    std::vector<std::string> out;
    for (const std::string& p : parts)
      out.push_back(std::get<std::string>(parse_scalar(origin, line, p)));
    return out;
  }
  std::vector<double> out;
  for (const std::string& p : parts) {
    if (trim(p).empty()) continue;
    const ConfigMap::Value v = parse_scalar(origin, line, p);
    if (std::holds_alternative<double>(v))
      out.push_back(std::get<double>(v));
    else if (std::holds_alternative<std::int64_t>(v))
      out.push_back(static_cast<double>(std::get<std::int64_t>(v)));
    else
      throw ParseError(origin, line, "mixed array types");
  }
  return out;
}

}  // namespace

ConfigMap ConfigMap::parse_string(const std::string& text,
                                  const std::string& origin) {
  ConfigMap cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(strip_comment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ParseError(origin, line_no, "unterminated table header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty())
        throw ParseError(origin, line_no, "empty table name");
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin, line_no, "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw ParseError(origin, line_no, "empty key");
    const std::string full_key = section.empty() ? key : section + "." + key;
    cfg.values_[full_key] = parse_value(origin, line_no, t.substr(eq + 1));
  }
  return cfg;
}

ConfigMap ConfigMap::parse_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config file " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str(), file.string());
}

ConfigMap ConfigMap::from_json(const nlohmann::json& j) {
  ConfigMap cfg;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean())
      cfg.values_[key] = value.get<bool>();
    else if (value.is_number_integer())
      cfg.values_[key] = value.get<std::int64_t>();
    else if (value.is_number_float())
      cfg.values_[key] = value.get<double>();
    else if (value.is_string())
      cfg.values_[key] = value.get<std::string>();
    else if (value.is_array()) {
      if (!value.empty() && value[0].is_string())
        cfg.values_[key] = value.get<std::vector<std::string>>();
      else
        cfg.values_[key] = value.get<std::vector<double>>();
    } else {
      throw ConfigError("manifest config key '" + key +
                        "' has unsupported type");
    }
  }
  return cfg;
}

bool ConfigMap::has(const std::string& key) const {
  return values_.count(key) > 0;
}

namespace {
[[noreturn]] void missing(const std::string& key) {
  throw ConfigError("missing required config key '" + key + "'");
}
}  // namespace

double ConfigMap::get_double(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) missing(key);
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&it->second))
    return static_cast<double>(*i);
  throw ConfigError("config key '" + key + "' is not a number");
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t ConfigMap::get_int(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) missing(key);
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
  throw ConfigError("config key '" + key + "' is not an integer");
}

std::int64_t ConfigMap::get_int(const std::string& key,
                                std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* b = std::get_if<bool>(&it->second)) return *b;
  throw ConfigError("config key '" + key + "' is not a boolean");
}

std::string ConfigMap::get_string(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) missing(key);
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  throw ConfigError("config key '" + key + "' is not a string");
}

std::string ConfigMap::get_string(const std::string& key,
                                  const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

std::vector<double> ConfigMap::get_double_list(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) missing(key);
  if (const auto* v = std::get_if<std::vector<double>>(&it->second)) return *v;
  // A bare scalar is accepted as a one-element list.
  if (std::holds_alternative<double>(it->second) ||
      std::holds_alternative<std::int64_t>(it->second))
    return {get_double(key)};
  throw ConfigError("config key '" + key + "' is not a numeric array");
}

std::vector<double> ConfigMap::get_double_list(
    const std::string& key, std::vector<double> fallback) const {
  return has(key) ? get_double_list(key) : fallback;
}

std::vector<std::string> ConfigMap::get_string_list(
    const std::string& key, std::vector<std::string> fallback) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* v = std::get_if<std::vector<std::string>>(&it->second))
    return *v;
  if (const auto* s = std::get_if<std::string>(&it->second)) return {*s};
  throw ConfigError("config key '" + key + "' is not a string array");
}

void ConfigMap::apply_override(const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override must look like key=value: '" + assignment +
                      "'");
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError("override with empty key");
  values_[key] = parse_value("<override>", 0, assignment.substr(eq + 1));
}

void ConfigMap::set(const std::string& key, Value value) {
  values_[key] = std::move(value);
}

nlohmann::json ConfigMap::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [key, value] : values_) {
    std::visit([&](const auto& v) { j[key] = v; }, value);
  }
  return j;
}

}  // namespace delaygp
