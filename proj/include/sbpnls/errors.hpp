#pragma once

#include <stdexcept>
#include <string>

namespace sbpnls {

// Bad sizes, unsupported orders, unknown registry names.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Singular systems, non-finite values, linear solver breakdown.
class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The requested invariant value cannot be reached by the projection.
class ProjectionFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// No admissible relaxation parameter was found. Callers usually retry with a
// smaller time step.
class RelaxationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SetupFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace sbpnls
