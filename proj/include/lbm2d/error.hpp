#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lbm2d {

/// Precondition violated by a caller-supplied value.
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Storage could not be obtained.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed geometry, reference-table or config file.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// Invalid run configuration (unknown key, conflicting or out-of-range values).
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Non-finite distribution detected while stepping.
class DivergenceError : public std::runtime_error {
public:
  DivergenceError(std::int64_t step, int x, int y)
      : std::runtime_error("non-finite distribution at node (" + std::to_string(x) + ", " +
                           std::to_string(y) + ") after step " + std::to_string(step)),
        step_(step), x_(x), y_(y) {}

  std::int64_t step() const noexcept { return step_; }
  int x() const noexcept { return x_; }
  int y() const noexcept { return y_; }

private:
  std::int64_t step_;
  int x_;
  int y_;
};

/// An observer callback failed during a run.
class RunError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace lbm2d
