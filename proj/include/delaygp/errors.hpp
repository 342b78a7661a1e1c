#ifndef DELAYGP_ERRORS_HPP
#define DELAYGP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace delaygp {

// Exit-code contract of the command line tool:
//   0 success, 2 configuration error, 3 numerical failure, 4 I/O error.
// The library throws one of the types below and the CLI maps them.

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 2;
};

class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 3;
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
  static constexpr int exit_code = 4;
};

// Malformed input data (CSV, config files); carries file:line context.
class ParseError : public ConfigError {
 public:
  ParseError(const std::string& file, long line, const std::string& what)
      : ConfigError(file + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  long line() const { return line_; }

 private:
  long line_;
};

}  // namespace delaygp

#endif
