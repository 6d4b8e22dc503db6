#include <cmath>

#include "rydsim/errors.hpp"
#include "rydsim/units.hpp"

namespace rydsim {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_parameter: return "invalid parameter";
    case ErrorKind::domain: return "domain error";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::degenerate_point: return "degenerate point";
    case ErrorKind::numeric: return "numeric error";
    case ErrorKind::integration_failure: return "integration failure";
    case ErrorKind::contract_violation: return "contract violation";
    case ErrorKind::parse: return "parse error";
  }
  return "unknown error";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

double wrap_phase(double angle) {
  double r = std::remainder(angle, two_pi);
  if (r <= -pi) r += two_pi;
  return r;
}

}  // namespace rydsim
