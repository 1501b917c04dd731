#pragma once

#include <stdexcept>
#include <string>

namespace uavdc {

/// Base for every error raised by the library. The CLI maps subclasses onto
/// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments, malformed configuration, or a broken invariant in the input.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// Parse failure in a persisted file. Carries the 1-based line number.
class ParseError : public InvalidInput {
 public:
  ParseError(int line, const std::string& what)
      : InvalidInput("line " + std::to_string(line) + ": " + what), line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// The problem instance has no solution under the given constraints.
class Infeasible : public Error {
 public:
  using Error::Error;
};

/// A CH-to-UAV link with zero throughput; no amount of hovering collects it.
class InfeasibleLink : public Infeasible {
 public:
  using Infeasible::Infeasible;
};

class BatteryViolation : public Error {
 public:
  BatteryViolation(double deficit_j, const std::string& what)
      : Error(what), deficit_j_(deficit_j) {}

  double deficit_j() const noexcept { return deficit_j_; }

 private:
  double deficit_j_;
};

}  // namespace uavdc
