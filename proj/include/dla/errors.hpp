#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dla {

// Caller broke an operation's documented precondition (duplicate site, empty
// candidate list, ...). Distinct from std::invalid_argument, which is used for
// out-of-domain parameters.
class PreconditionViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConvergenceFailure : public std::runtime_error {
 public:
  ConvergenceFailure(const std::string& what, double residual, std::size_t sweeps)
      : std::runtime_error(what), residual_(residual), sweeps_(sweeps) {}
  double residual() const noexcept { return residual_; }
  std::size_t sweeps() const noexcept { return sweeps_; }

 private:
  double residual_;
  std::size_t sweeps_;
};

class DegenerateField : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GrowthStalled : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientScales : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateSlicing : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. line() is 1-based; 0 when the problem is not tied to
// one line (e.g. a count mismatch detected at end of file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace dla
