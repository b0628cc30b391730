#pragma once

#include <stdexcept>
#include <string>

namespace blockroute {

/// Process exit codes used by the command-line driver.
enum class ExitCode : int {
  ok = 0,
  config_error = 2,
  generation_failure = 3,
  routing_failure = 4,
  budget_infeasible = 5,
};

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what, ExitCode code)
      : std::runtime_error(what), message_(what), code_(code) {}

  const char* what() const noexcept override { return message_.c_str(); }
  ExitCode code() const noexcept { return code_; }

  /// Prefixes the message, keeping the dynamic type so callers can rethrow.
  void add_context(const std::string& context) { message_ = context + ": " + message_; }

 private:
  std::string message_;
  ExitCode code_;
};

/// A caller-supplied argument violates an operation precondition.
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& what)
      : Error(what, ExitCode::config_error) {}
};

/// Input violates a structural contract (e.g. an asymmetric matrix).
class ContractViolation : public Error {
 public:
  explicit ContractViolation(const std::string& what)
      : Error(what, ExitCode::config_error) {}
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& what)
      : Error(what, ExitCode::generation_failure) {}
};

class PlacementError : public Error {
 public:
  explicit PlacementError(const std::string& what)
      : Error(what, ExitCode::generation_failure) {}
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what, ExitCode::routing_failure), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// The quotient support graph is disconnected, so routing is undefined.
class QuotientDisconnectedError : public Error {
 public:
  explicit QuotientDisconnectedError(const std::string& what)
      : Error(what, ExitCode::routing_failure) {}
};

class RoutingError : public Error {
 public:
  explicit RoutingError(const std::string& what)
      : Error(what, ExitCode::routing_failure) {}
};

/// A block hop has an atom farther than the near-rigid range from every target.
class HopInfeasibleError : public Error {
 public:
  explicit HopInfeasibleError(const std::string& what)
      : Error(what, ExitCode::routing_failure) {}
};

/// No admissible correction window exists (K_max == 0).
class BudgetInfeasibleError : public Error {
 public:
  explicit BudgetInfeasibleError(const std::string& what)
      : Error(what, ExitCode::budget_infeasible) {}
};

}  // namespace blockroute
