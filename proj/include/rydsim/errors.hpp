#pragma once

#include <stdexcept>
#include <string>

namespace rydsim {

enum class ErrorKind {
  invalid_parameter,
  domain,
  infeasible,
  degenerate_point,
  numeric,
  integration_failure,
  contract_violation,
  parse,
};

const char* to_string(ErrorKind kind) noexcept;

// Base of everything the core throws. The C API maps `kind()` onto its
// status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised by the integrators; carries the simulation time at which the step
// controller gave up.
class IntegrationFailure : public Error {
 public:
  IntegrationFailure(double time_us, const std::string& what)
      : Error(ErrorKind::integration_failure, what), time_us_(time_us) {}
  double time_us() const noexcept { return time_us_; }

 private:
  double time_us_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace rydsim
