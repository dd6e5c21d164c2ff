#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cipimex {

/// Raised for out-of-range or inconsistent arguments (nele = 0, bad degree, ...).
class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a requested feature is outside the implemented tables.
class Unsupported : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised for non-conforming connectivity or unparsable mesh files.
/// `line()` is the 1-based line of the offending record, 0 if not file-related.
class MalformedMesh : public std::runtime_error {
public:
  explicit MalformedMesh(const std::string& what, std::size_t line = 0)
      : std::runtime_error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class DimensionMismatch : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// CG ran out of iterations. Carries the last relative residual.
class NonConvergence : public std::runtime_error {
public:
  NonConvergence(const std::string& what, double residual, std::size_t iterations)
      : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  std::size_t iterations() const noexcept { return iterations_; }

private:
  double residual_;
  std::size_t iterations_;
};

/// A time step failed; wraps the underlying error with the step index.
class StepFailure : public std::runtime_error {
public:
  StepFailure(const std::string& what, std::size_t step)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

private:
  std::size_t step_;
};

}  // namespace cipimex
