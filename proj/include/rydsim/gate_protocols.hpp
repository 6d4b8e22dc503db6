#pragma once

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rydsim/dynamics.hpp"
#include "rydsim/pulse_synthesis.hpp"
#include "rydsim/quantum_core.hpp"
#include "rydsim/units.hpp"

namespace rydsim {

enum class Scheme { sta, adiabatic, nonadiabatic };

const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Per-step invariant endpoints and laser phases of the shortcut protocol.
/// Valid sets satisfy beta1 = pi/2, beta2 - phi1 = pi/2, beta3 - phi2 = pi/2
/// and phi3 = pi.
struct StepPhaseConfig {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;
  double phi1 = 0.0;
  double phi2 = 0.0;
  double phi3 = 0.0;

  /// beta2 = pi/2 and beta3 = theta - pi/2, phases derived from them.
  static StepPhaseConfig for_theta(double theta);
  /// Any (beta2, beta3); the realised phase is pi + beta3 - beta2.
  static StepPhaseConfig from_endpoints(double beta2, double beta3);

  double realised_theta() const { return pi + beta3 - beta2; }
  void validate() const;
};

/// 1 control + (n_qubits - 1) targets; thetas[j] is the conditional phase
/// picked up by target j+1.
struct CpgSpec {
  int n_qubits = 2;
  std::vector<double> thetas;

  static CpgSpec pi_gate(int n_qubits);
  void validate() const;
};

/// Adiabatic pulses tagged with the half (ground->Rydberg or back) they use.
struct AdiabaticShape {
  AdiabaticPulseParams params;
  AdiabaticHalf half = AdiabaticHalf::first;

  friend bool operator==(const AdiabaticShape&, const AdiabaticShape&) = default;
};

using PulseShape = std::variant<LrPulseParams, AdiabaticShape, GaussianPulseParams>;

const char* family_name(const PulseShape& shape);

struct DriveSegment {
  int atom = 0;
  Level level_a = Level::zero;
  double t_start = 0.0;
  double t_end = 0.0;
  PulseShape shape;
  double phi = 0.0;
  Deviation deviation;

  double duration() const { return t_end - t_start; }
  /// Deviated drive at absolute time t (must lie in [t_start, t_end]).
  PulseSample sample(double t) const;
  /// Ideal drive at local time t - t_start, no deviation.
  PulseSample ideal_sample(double local_t) const;
  /// Largest |Omega| + |Delta| the deviated pulse reaches (grid estimate).
  double peak_magnitude() const;

  friend bool operator==(const DriveSegment&, const DriveSegment&) = default;
};

class PulseSchedule {
 public:
  Scheme scheme = Scheme::sta;
  int n_atoms = 2;
  std::vector<double> thetas;  // conditional phases the schedule targets
  InteractionSpec interactions;
  std::vector<DriveSegment> segments;

  double duration() const;
  std::vector<double> breakpoints() const;
  CpgSpec target() const { return CpgSpec{n_atoms, thetas}; }

  /// Segments on the same atom must not overlap, times must be ordered, and
  /// the blocks must tile [0, duration] without gaps.
  void validate() const;

  /// Every sample: Omega *= 1 + omega_rel; Delta = Delta(1 + delta_rel) + delta_abs.
  PulseSchedule perturbed(double omega_rel, double delta_rel,
                          double delta_abs) const;

  /// H(t) = RRI + drives. Which segments are active is decided by the
  /// integrator's anchor time, so a boundary sample belongs to the interval
  /// being integrated.
  TimeDependentHamiltonian hamiltonian() const;
  /// H at t with segments chosen as for t + 0 (the later segment wins at a
  /// boundary, except at the very end of the schedule).
  Operator hamiltonian_at(double t) const;

  friend bool operator==(const PulseSchedule&, const PulseSchedule&) = default;
};

/// Four LR segments of length t_f: control step (i), two target segments
/// (step ii, all targets simultaneously), control step (iii).
PulseSchedule sta_sequence(const CpgSpec& spec, double t_f,
                           const InteractionSpec& interactions);
PulseSchedule sta_sequence(std::span<const StepPhaseConfig> per_target,
                           double t_f, const InteractionSpec& interactions);

/// Control 2tau (phi=pi/2), target 4tau (phi=0), control 2tau (phi=-pi/2).
PulseSchedule adiabatic_sequence(double omega0, double delta0, double tau,
                                 const InteractionSpec& interactions);

struct NonadiabaticCalibration {
  SigmaCalibration pi_pulse;
  SigmaCalibration two_pi_pulse;
};

/// Resonant truncated Gaussians: pi pulse on the control (window t_step),
/// 2pi pulse with phi=pi on the target (window 2 t_step), pi pulse with
/// phi=pi on the control (window t_step).
PulseSchedule nonadiabatic_sequence(double omega_n,
                                    const InteractionSpec& interactions,
                                    double t_step = 1.0,
                                    NonadiabaticCalibration* calibration = nullptr);

/// Diagonal 2^n x 2^n unitary with phase mu*(nu theta_1 + ... + zeta theta_{n-1}).
Matrix ideal_cpg(const CpgSpec& spec);
/// Same phases, as a vector indexed like computational_indices().
std::vector<double> ideal_cpg_phases(const CpgSpec& spec);

/// Lifts a computational-subspace state (2^n amplitudes) into the 3^n space.
StateVector embed_computational(int n_atoms, const Vector& amplitudes);

struct GateRun {
  std::variant<StateVector, DensityMatrix> final_state;
  StateVector ideal;
  double fidelity = 0.0;
  double leakage = 0.0;  // final population outside the computational subspace
  Trajectory trajectory;
};

GateRun run_gate(const PulseSchedule& schedule, const StateVector& initial,
                 const std::optional<NoiseSpec>& noise,
                 const IntegratorConfig& config);

struct GateMatrix {
  Matrix matrix;                 // 2^n x 2^n, columns = propagated basis states
  std::vector<double> leakage;   // per column
  double max_leakage() const;
  /// arg of each diagonal entry
  std::vector<double> diagonal_phases() const;
  /// |<k| U_ideal^+ G |k>|^2 per basis state for a diagonal ideal gate.
  std::vector<double> basis_fidelities(const CpgSpec& spec) const;
};

GateMatrix extract_gate_matrix(const PulseSchedule& schedule,
                               const IntegratorConfig& config);

}  // namespace rydsim
