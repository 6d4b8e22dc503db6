#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rydsim/pulse_synthesis.hpp"

namespace rydsim {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using TwoLevelOperator = Eigen::Matrix2cd;
using TwoLevelState = Eigen::Vector2cd;

// Per-atom level order is |0>, |1>, |r>. Multi-atom states use the tensor
// product with atom 0 (the control) as the most significant digit, so the
// basis index of |l_0 l_1 ... l_{n-1}> is sum_k l_k 3^(n-1-k).
enum class Level : int { zero = 0, one = 1, rydberg = 2 };

inline constexpr int kLevelsPerAtom = 3;
inline constexpr int kMaxAtoms = 5;

Eigen::Index hilbert_dim(int n_atoms);
Level level_of(Eigen::Index index, int atom, int n_atoms);
Eigen::Index basis_index(std::span<const Level> levels);

/// Full-space indices of the 2^n computational states (no atom in |r>), in
/// binary order with the control as most significant bit.
std::vector<Eigen::Index> computational_indices(int n_atoms);

void check_atom_count(int n_atoms);

class StateVector {
 public:
  StateVector(int n_atoms, Vector amplitudes);

  static StateVector basis(std::span<const Level> levels);
  /// Equal-weight superposition of all 2^n computational basis states.
  static StateVector uniform_computational(int n_atoms);

  int n_atoms() const { return n_atoms_; }
  const Vector& amplitudes() const { return amplitudes_; }
  Vector& amplitudes() { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }
  /// Population outside the computational subspace.
  double rydberg_population() const;

 private:
  int n_atoms_;
  Vector amplitudes_;
};

class DensityMatrix {
 public:
  DensityMatrix(int n_atoms, Matrix entries);
  static DensityMatrix from_pure(const StateVector& psi);

  int n_atoms() const { return n_atoms_; }
  const Matrix& entries() const { return entries_; }
  Matrix& entries() { return entries_; }

  double trace() const { return entries_.trace().real(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  double rydberg_population() const;

 private:
  int n_atoms_;
  Matrix entries_;
};

class Operator {
 public:
  Operator(int n_atoms, Matrix entries);

  int n_atoms() const { return n_atoms_; }
  const Matrix& entries() const { return entries_; }
  double hermiticity_error() const;
  /// Real and imaginary parts as "re+imj" cells, one matrix row per line.
  std::string to_csv() const;

 private:
  int n_atoms_;
  Matrix entries_;
};

/// Rydberg-Rydberg interaction strengths in rad/us: V between the control
/// and each target, V1 between target pairs.
struct InteractionSpec {
  double V = 0.0;
  double V1 = 0.0;

  friend bool operator==(const InteractionSpec&, const InteractionSpec&) = default;
};

/// 2x2 drive Hamiltonian on the ordered pair (|a>, |r>):
/// H = 1/2 [Omega (|r><a| e^{-i phi} + h.c.) + Delta (|a><a| - |r><r|)].
TwoLevelOperator drive_two_level(const PulseSample& sample);

/// Drive on one atom's |a> <-> |r> transition, identity elsewhere.
Operator build_drive(int atom, Level a, const PulseSample& sample, int n_atoms);

/// Diagonal interaction: V on every (control, target) Rydberg pair and V1 on
/// every (target, target) Rydberg pair.
Operator build_rri(int n_atoms, const InteractionSpec& spec);

/// Diagonal of build_rri without materialising the matrix.
Eigen::VectorXd rri_diagonal(int n_atoms, const InteractionSpec& spec);

// ---------------------------------------------------------------------------
// Instantaneous (adiabatic) eigenbasis of the two-level drive

struct AdiabaticEigensystem {
  double theta = 0.0;        // arccos(Delta / Omega_total)
  double omega_total = 0.0;  // sqrt(Delta^2 + Omega^2)
  TwoLevelState phi_plus;
  TwoLevelState phi_minus;
  double e_plus = 0.0;
  double e_minus = 0.0;
};

/// Phi+ = cos(theta/2)|a> + sin(theta/2) e^{-i phi}|r>,
/// Phi- = -sin(theta/2) e^{i phi}|a> + cos(theta/2)|r>, E = +-Omega_total/2.
AdiabaticEigensystem instantaneous_eigensystem(const PulseSample& sample);

// ---------------------------------------------------------------------------
// Lewis-Riesenfeld invariant

/// Value of the free frequency constant chi; it cancels in every observable.
inline constexpr double kDefaultChi = 1.0;

/// I = chi/2 [cos(alpha)(|a><a| - |r><r|) + sin(alpha)(|r><a| e^{-i beta} + h.c.)]
TwoLevelOperator invariant_operator(double alpha, double beta, double chi);

/// Time derivative of invariant_operator along (alpha(t), beta(t)).
TwoLevelOperator invariant_operator_rate(double alpha, double beta,
                                         double d_alpha, double d_beta,
                                         double chi);

struct InvariantEigenstates {
  TwoLevelState plus;   // eigenvalue +chi/2
  TwoLevelState minus;  // eigenvalue -chi/2
};
InvariantEigenstates invariant_eigenstates(double alpha, double beta);

/// Frobenius norm of i dI/dt - [H, I] for the pulse's own (alpha, beta).
double invariant_residual(double t, const LrPulseParams& params, double chi);

/// Same, but with an explicit drive sample in place of the pulse's own.
double invariant_residual(double t, const LrPulseParams& params, double chi,
                          const PulseSample& drive);

struct LrPhase {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  int evaluations = 0;
};

/// lambda_+ = 1/2 int_0^{t_f} [Delta - 2 Omega~] dt with
/// Omega~ = (Delta + beta') cos^2(alpha/2) + (Omega/2) sin(alpha) cos(beta - phi),
/// by adaptive Simpson at absolute tolerance 1e-10 rad. lambda_- = -lambda_+.
LrPhase lr_phase(const LrPulseParams& params);

struct LrDecomposition {
  cplx c_plus;
  cplx c_minus;
};

/// C+- = <phi+-|psi> for a single-atom state supported on {|a>, |r>}.
LrDecomposition lr_decompose(const StateVector& psi, Level a, double alpha,
                             double beta);

}  // namespace rydsim
