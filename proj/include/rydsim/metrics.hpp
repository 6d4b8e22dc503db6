#pragma once

#include <functional>

#include "rydsim/pulse_synthesis.hpp"
#include "rydsim/quantum_core.hpp"

namespace rydsim {

/// |<ideal|actual>|^2.
double fidelity_pure(const StateVector& ideal, const StateVector& actual);
/// <ideal| rho |ideal>.
double fidelity_mixed(const StateVector& ideal, const DensityMatrix& actual);

/// |Omega dDelta/dt - dOmega/dt Delta| / Omega_total^3. Throws
/// ErrorKind::degenerate_point when Omega_total = 0.
double adiabaticity_monitor(const PulseSample& sample, const PulseRates& rates);

using PulseFunction = std::function<PulseSample(double)>;
using RatesFunction = std::function<PulseRates(double)>;

/// Largest adiabaticity_monitor value on `grid` cell-centred samples of
/// (t0, t1); cell centres keep the grid off pulse endpoints.
double max_adiabaticity(const PulseFunction& pulse, const RatesFunction& rates,
                        double t0, double t1, int grid = 4000);

enum class Branch { plus, minus };

struct AdiabaticPhases {
  double dynamical = 0.0;  // -int E dt
  double geometric = 0.0;  // Re of i int <Phi|dPhi/dt> dt
  double total = 0.0;
  /// Integrated |Im| of the geometric integrand; zero when the connection is
  /// purely imaginary, as it must be for normalised states.
  double geometric_imaginary = 0.0;
};

/// Phases picked up along one instantaneous eigenstate over [t0, t1], by
/// composite Simpson on `intervals` (even) cells. The eigenstate gauge keeps
/// its |a> component real and non-negative.
AdiabaticPhases adiabatic_phases(const PulseFunction& pulse, Branch branch,
                                 double t0, double t1, int intervals = 4000);

}  // namespace rydsim
