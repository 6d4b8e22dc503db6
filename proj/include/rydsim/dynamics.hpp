#pragma once

#include <functional>
#include <vector>

#include "rydsim/quantum_core.hpp"

namespace rydsim {

enum class IntegratorMethod { rk4, adaptive };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::rk4;
  /// Fixed-step mode: each interval between Hamiltonian breakpoints is cut
  /// into at least this many RK4 steps.
  int steps_per_segment = 4000;
  /// Fixed-step mode: additionally cap h * ||H|| at this value so that
  /// strong interactions stay resolved.
  double max_step_phase = 0.02;
  /// Adaptive mode: absolute and relative tolerance of the DP5(4) pair.
  double tolerance = 1e-10;
  double min_step = 1e-12;
  bool record_trajectory = false;
  /// Number of uniformly spaced trajectory samples (including both ends).
  int sample_count = 0;
};

/// Decay rates (1/us) of the control |r> -> |0> and each target |r> -> |1>.
struct NoiseSpec {
  double gamma_r0 = 0.0;
  double gamma_r1 = 0.0;

  bool active() const { return gamma_r0 > 0.0 || gamma_r1 > 0.0; }
  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

/// H(t) evaluated on demand. `breakpoints` lists times where H may jump;
/// the integrators never step across one and pass, as `anchor`, a time
/// strictly inside the interval being integrated so that evaluation exactly
/// at a breakpoint picks the correct one-sided limit. `norm_bound` is an
/// upper bound on ||H(t)|| used to cap the fixed step.
struct TimeDependentHamiltonian {
  Eigen::Index dim = 0;
  std::function<void(double t, double anchor, Matrix& out)> evaluate;
  std::vector<double> breakpoints;
  double norm_bound = 0.0;
};

/// sqrt(rate) * sum_k |to_k><from_k|, stored as index pairs.
struct JumpOperator {
  double rate = 0.0;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> transitions;  // (from, to)

  Matrix dense(Eigen::Index dim) const;
};

/// One operator for the control (|r> -> |0>) and one per target
/// (|r> -> |1>). Zero rates are omitted.
std::vector<JumpOperator> decay_operators(int n_atoms, const NoiseSpec& noise);

struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;  // column state or density matrix per sample
};

struct SchrodingerResult {
  StateVector state;
  Trajectory trajectory;
  long long steps = 0;
};

struct LindbladResult {
  DensityMatrix state;
  Trajectory trajectory;
  long long steps = 0;
};

/// i d/dt psi = H psi over [t0, t1].
SchrodingerResult evolve_schrodinger(const StateVector& psi0,
                                     const TimeDependentHamiltonian& h,
                                     double t0, double t1,
                                     const IntegratorConfig& config);

/// Propagates several columns at once (e.g. a block of basis states).
Matrix propagate_columns(const Matrix& columns,
                         const TimeDependentHamiltonian& h, double t0,
                         double t1, const IntegratorConfig& config);

/// d rho/dt = -i[H, rho] + sum_k (L rho L^+ - 1/2 {L^+ L, rho}).
LindbladResult evolve_lindblad(const DensityMatrix& rho0,
                               const TimeDependentHamiltonian& h,
                               const std::vector<JumpOperator>& jumps,
                               double t0, double t1,
                               const IntegratorConfig& config);

LindbladResult evolve_lindblad(const DensityMatrix& rho0,
                               const TimeDependentHamiltonian& h,
                               const NoiseSpec& noise, double t0, double t1,
                               const IntegratorConfig& config);

}  // namespace rydsim
