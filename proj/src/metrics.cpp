#include "rydsim/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "rydsim/errors.hpp"

namespace rydsim {
namespace {

constexpr cplx kI{0.0, 1.0};

TwoLevelState gauged_eigenstate(const PulseSample& s, Branch branch) {
  const AdiabaticEigensystem e = instantaneous_eigensystem(s);
  TwoLevelState v = branch == Branch::plus ? e.phi_plus : e.phi_minus;
  const cplx lead = v(0);
  if (std::abs(lead) > 1e-12) {
    v *= std::conj(lead) / std::abs(lead);
  } else if (std::abs(v(1)) > 0.0) {
    v *= std::conj(v(1)) / std::abs(v(1));
  }
  return v;
}

}  // namespace

double fidelity_pure(const StateVector& ideal, const StateVector& actual) {
  if (ideal.amplitudes().size() != actual.amplitudes().size()) {
    fail(ErrorKind::invalid_parameter, "fidelity: dimension mismatch");
  }
  return std::norm(ideal.amplitudes().dot(actual.amplitudes()));
}

double fidelity_mixed(const StateVector& ideal, const DensityMatrix& actual) {
  const Vector& psi = ideal.amplitudes();
  if (psi.size() != actual.entries().rows()) {
    fail(ErrorKind::invalid_parameter, "fidelity: dimension mismatch");
  }
  return psi.dot(actual.entries() * psi).real();
}

double adiabaticity_monitor(const PulseSample& s, const PulseRates& r) {
  const double total = std::hypot(s.omega, s.delta);
  if (total == 0.0) {
    fail(ErrorKind::degenerate_point, "adiabaticity monitor: Omega = Delta = 0");
  }
  return std::abs(s.omega * r.d_delta - r.d_omega * s.delta) / (total * total * total);
}

double max_adiabaticity(const PulseFunction& pulse, const RatesFunction& rates,
                        double t0, double t1, int grid) {
  if (grid < 1 || !(t1 > t0)) fail(ErrorKind::invalid_parameter, "bad grid");
  double m = 0.0;
  for (int k = 0; k < grid; ++k) {
    const double t = t0 + (t1 - t0) * (k + 0.5) / grid;
    m = std::max(m, adiabaticity_monitor(pulse(t), rates(t)));
  }
  return m;
}

AdiabaticPhases adiabatic_phases(const PulseFunction& pulse, Branch branch,
                                 double t0, double t1, int intervals) {
  if (!(t1 > t0)) fail(ErrorKind::invalid_parameter, "adiabatic_phases: empty span");
  if (intervals < 2 || intervals % 2 != 0) {
    fail(ErrorKind::invalid_parameter, "adiabatic_phases: intervals must be even and >= 2");
  }
  const double sign = branch == Branch::plus ? 1.0 : -1.0;
  const double h = (t1 - t0) / intervals;
  const double fd = std::min(1e-6 * (t1 - t0), 0.25 * h);

  double dyn = 0.0;
  double geo = 0.0;
  double geo_im = 0.0;
  for (int k = 0; k <= intervals; ++k) {
    const double w = (k == 0 || k == intervals) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    const double t = k == intervals ? t1 : t0 + h * k;
    const PulseSample s = pulse(t);
    const double energy = 0.5 * sign * std::hypot(s.omega, s.delta);
    if (!std::isfinite(energy)) fail(ErrorKind::numeric, "adiabatic_phases: non-finite energy");

    // dPhi/dt by central differences, one-sided at the span ends.
    const double ta = std::max(t0, t - fd);
    const double tb = std::min(t1, t + fd);
    const TwoLevelState va = gauged_eigenstate(pulse(ta), branch);
    const TwoLevelState vb = gauged_eigenstate(pulse(tb), branch);
    const TwoLevelState v = gauged_eigenstate(s, branch);
    const TwoLevelState dv = (vb - va) / (tb - ta);
    const cplx integrand = kI * v.dot(dv);

    dyn += w * (-energy);
    geo += w * integrand.real();
    geo_im += w * std::abs(integrand.imag());
  }
  AdiabaticPhases out;
  out.dynamical = dyn * h / 3.0;
  out.geometric = geo * h / 3.0;
  out.geometric_imaginary = geo_im * h / 3.0;
  out.total = out.dynamical + out.geometric;
  if (!std::isfinite(out.total)) fail(ErrorKind::numeric, "adiabatic_phases: quadrature failed");
  return out;
}

}  // namespace rydsim
