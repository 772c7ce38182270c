#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace pml {

struct ShapeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalBlowup : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LineSearchStall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, long line_number)
      : std::runtime_error(msg + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  long line;
};

struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TooSmall : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyLabelSpace : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-fatal conditions (degenerate data, empty candidate rows) go through a
// process-wide warning sink instead of throwing. Default sink writes to stderr.
using WarningHandler = std::function<void(const std::string&)>;

void set_warning_handler(WarningHandler handler);
void warn(const std::string& message);

}  // namespace pml
