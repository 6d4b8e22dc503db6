#include "rydsim/quantum_core.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "rydsim/errors.hpp"
#include "rydsim/units.hpp"

namespace rydsim {
namespace {

Eigen::Index stride_of(int atom, int n_atoms) {
  Eigen::Index s = 1;
  for (int k = atom + 1; k < n_atoms; ++k) s *= kLevelsPerAtom;
  return s;
}

double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

void check_atom_count(int n_atoms) {
  if (n_atoms < 1 || n_atoms > kMaxAtoms) {
    std::ostringstream os;
    os << "atom count " << n_atoms << " outside [1, " << kMaxAtoms << "]";
    fail(ErrorKind::invalid_parameter, os.str());
  }
}

Eigen::Index hilbert_dim(int n_atoms) {
  check_atom_count(n_atoms);
  return stride_of(-1, n_atoms);
}

Level level_of(Eigen::Index index, int atom, int n_atoms) {
  return static_cast<Level>((index / stride_of(atom, n_atoms)) % kLevelsPerAtom);
}

Eigen::Index basis_index(std::span<const Level> levels) {
  Eigen::Index idx = 0;
  for (Level l : levels) idx = idx * kLevelsPerAtom + static_cast<int>(l);
  return idx;
}

std::vector<Eigen::Index> computational_indices(int n_atoms) {
  check_atom_count(n_atoms);
  std::vector<Eigen::Index> out;
  const unsigned count = 1u << n_atoms;
  out.reserve(count);
  for (unsigned bits = 0; bits < count; ++bits) {
    Eigen::Index idx = 0;
    for (int k = 0; k < n_atoms; ++k) {
      const unsigned bit = (bits >> (n_atoms - 1 - k)) & 1u;
      idx = idx * kLevelsPerAtom + static_cast<Eigen::Index>(bit);
    }
    out.push_back(idx);
  }
  return out;
}

namespace {

double population_outside(const Vector& diag_pop, int n_atoms) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < diag_pop.size(); ++i) {
    bool has_r = false;
    for (int k = 0; k < n_atoms; ++k) {
      if (level_of(i, k, n_atoms) == Level::rydberg) has_r = true;
    }
    if (has_r) total += diag_pop[i].real();
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------

StateVector::StateVector(int n_atoms, Vector amplitudes)
    : n_atoms_(n_atoms), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != hilbert_dim(n_atoms)) {
    fail(ErrorKind::invalid_parameter, "state vector length != 3^n");
  }
}

StateVector StateVector::basis(std::span<const Level> levels) {
  const int n = static_cast<int>(levels.size());
  Vector v = Vector::Zero(hilbert_dim(n));
  v[basis_index(levels)] = 1.0;
  return StateVector(n, std::move(v));
}

StateVector StateVector::uniform_computational(int n_atoms) {
  Vector v = Vector::Zero(hilbert_dim(n_atoms));
  const auto comp = computational_indices(n_atoms);
  const double amp = 1.0 / std::sqrt(static_cast<double>(comp.size()));
  for (auto idx : comp) v[idx] = amp;
  return StateVector(n_atoms, std::move(v));
}

double StateVector::rydberg_population() const {
  return population_outside(amplitudes_.cwiseAbs2().cast<cplx>(), n_atoms_);
}

DensityMatrix::DensityMatrix(int n_atoms, Matrix entries)
    : n_atoms_(n_atoms), entries_(std::move(entries)) {
  const auto d = hilbert_dim(n_atoms);
  if (entries_.rows() != d || entries_.cols() != d) {
    fail(ErrorKind::invalid_parameter, "density matrix shape != 3^n x 3^n");
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  return DensityMatrix(psi.n_atoms(),
                       psi.amplitudes() * psi.amplitudes().adjoint());
}

double DensityMatrix::hermiticity_error() const {
  return (entries_ - entries_.adjoint()).norm();
}

double DensityMatrix::min_eigenvalue() const {
  const Matrix h = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::rydberg_population() const {
  return population_outside(entries_.diagonal(), n_atoms_);
}

Operator::Operator(int n_atoms, Matrix entries)
    : n_atoms_(n_atoms), entries_(std::move(entries)) {}

double Operator::hermiticity_error() const {
  return max_abs(entries_ - entries_.adjoint());
}

std::string Operator::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < entries_.rows(); ++i) {
    for (Eigen::Index j = 0; j < entries_.cols(); ++j) {
      const cplx z = entries_(i, j);
      if (j) os << ',';
      os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << 'j';
    }
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

TwoLevelOperator drive_two_level(const PulseSample& s) {
  const cplx lower = 0.5 * s.omega * std::polar(1.0, -s.phi);  // <r|H|a>
  TwoLevelOperator h;
  h << 0.5 * s.delta, std::conj(lower), lower, -0.5 * s.delta;
  return h;
}

Operator build_drive(int atom, Level a, const PulseSample& sample,
                     int n_atoms) {
  const auto dim = hilbert_dim(n_atoms);
  if (atom < 0 || atom >= n_atoms) {
    std::ostringstream os;
    os << "build_drive: atom " << atom << " outside [0, " << n_atoms << ")";
    fail(ErrorKind::domain, os.str());
  }
  if (a == Level::rydberg) {
    fail(ErrorKind::domain, "build_drive: driven level must be |0> or |1>");
  }
  const TwoLevelOperator h = drive_two_level(sample);
  Matrix m = Matrix::Zero(dim, dim);
  const Eigen::Index step = stride_of(atom, n_atoms) *
                            (static_cast<int>(Level::rydberg) - static_cast<int>(a));
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (level_of(i, atom, n_atoms) != a) continue;
    const Eigen::Index r = i + step;
    m(i, i) += h(0, 0);
    m(r, r) += h(1, 1);
    m(r, i) += h(1, 0);
    m(i, r) += h(0, 1);
  }
  return Operator(n_atoms, std::move(m));
}

Eigen::VectorXd rri_diagonal(int n_atoms, const InteractionSpec& spec) {
  if (n_atoms < 2) {
    fail(ErrorKind::domain, "build_rri: needs at least two atoms");
  }
  if (spec.V < 0.0 || spec.V1 < 0.0) {
    fail(ErrorKind::invalid_parameter, "interaction strengths must be >= 0");
  }
  const auto dim = hilbert_dim(n_atoms);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const bool control_r = level_of(i, 0, n_atoms) == Level::rydberg;
    double e = 0.0;
    for (int j = 1; j < n_atoms; ++j) {
      if (level_of(i, j, n_atoms) != Level::rydberg) continue;
      if (control_r) e += spec.V;
      for (int jj = j + 1; jj < n_atoms; ++jj) {
        if (level_of(i, jj, n_atoms) == Level::rydberg) e += spec.V1;
      }
    }
    d[i] = e;
  }
  return d;
}

Operator build_rri(int n_atoms, const InteractionSpec& spec) {
  const Eigen::VectorXd d = rri_diagonal(n_atoms, spec);
  return Operator(n_atoms, d.cast<cplx>().asDiagonal());
}

// ---------------------------------------------------------------------------

AdiabaticEigensystem instantaneous_eigensystem(const PulseSample& s) {
  const double total = std::hypot(s.delta, s.omega);
  if (total == 0.0) {
    fail(ErrorKind::degenerate_point,
         "instantaneous_eigensystem: Omega = Delta = 0 (degenerate)");
  }
  AdiabaticEigensystem es;
  es.omega_total = total;
  es.theta = std::atan2(s.omega, s.delta);
  const double c = std::cos(0.5 * es.theta);
  const double sn = std::sin(0.5 * es.theta);
  es.phi_plus << c, sn * std::polar(1.0, -s.phi);
  es.phi_minus << -sn * std::polar(1.0, s.phi), c;
  es.e_plus = 0.5 * total;
  es.e_minus = -0.5 * total;
  return es;
}

TwoLevelOperator invariant_operator(double alpha, double beta, double chi) {
  const cplx upper = std::sin(alpha) * std::polar(1.0, beta);  // <a|I|r>
  TwoLevelOperator m;
  m << std::cos(alpha), upper, std::conj(upper), -std::cos(alpha);
  return 0.5 * chi * m;
}

TwoLevelOperator invariant_operator_rate(double alpha, double beta,
                                         double d_alpha, double d_beta,
                                         double chi) {
  const cplx upper = (std::cos(alpha) * d_alpha + cplx(0.0, d_beta * std::sin(alpha))) *
                     std::polar(1.0, beta);
  TwoLevelOperator m;
  m << -std::sin(alpha) * d_alpha, upper, std::conj(upper),
      std::sin(alpha) * d_alpha;
  return 0.5 * chi * m;
}

InvariantEigenstates invariant_eigenstates(double alpha, double beta) {
  const double c = std::cos(0.5 * alpha);
  const double s = std::sin(0.5 * alpha);
  InvariantEigenstates e;
  e.plus << c, s * std::polar(1.0, -beta);
  e.minus << -s * std::polar(1.0, beta), c;
  return e;
}

double invariant_residual(double t, const LrPulseParams& p, double chi,
                          const PulseSample& drive) {
  const double alpha = p.alpha(t);
  const double beta = p.beta(t);
  const TwoLevelOperator inv = invariant_operator(alpha, beta, chi);
  const TwoLevelOperator rate = invariant_operator_rate(
      alpha, beta, p.alpha.derivative(t), p.beta.derivative(t), chi);
  const TwoLevelOperator h = drive_two_level(drive);
  const TwoLevelOperator r = cplx(0.0, 1.0) * rate - (h * inv - inv * h);
  return r.norm();
}

double invariant_residual(double t, const LrPulseParams& p, double chi) {
  return invariant_residual(t, p, chi, lr_pulse(t, p));
}

// ---------------------------------------------------------------------------

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int evaluations = 0;
  int max_depth = 60;
  double worst_remaining = 0.0;
};

double simpson_step(SimpsonState& st, double a, double b, double fa, double fm,
                    double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  st.evaluations += 2;
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  if (depth >= st.max_depth) {
    st.worst_remaining = std::max(st.worst_remaining, std::abs(diff) / 15.0);
    return left + right + diff / 15.0;
  }
  return simpson_step(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_step(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

LrPhase lr_phase(const LrPulseParams& p) {
  const std::function<double(double)> integrand = [&p](double t) {
    const PulseSample s = lr_pulse(t, p);
    const double alpha = p.alpha(t);
    const double c2 = std::cos(0.5 * alpha);
    const double omega_tilde =
        (s.delta + p.beta.derivative(t)) * c2 * c2 +
        0.5 * s.omega * std::sin(alpha) * std::cos(p.beta(t) - p.phi);
    return s.delta - 2.0 * omega_tilde;
  };
  SimpsonState st{integrand};
  const double a = 0.0;
  const double b = p.t_f;
  const double fa = integrand(a);
  const double fm = integrand(0.5 * (a + b));
  const double fb = integrand(b);
  st.evaluations = 3;
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double integral =
      simpson_step(st, a, b, fa, fm, fb, whole, 1e-10, 0);
  if (st.worst_remaining > 1e-10 || !std::isfinite(integral)) {
    std::ostringstream os;
    os << "lr_phase: adaptive Simpson did not converge (remaining error "
       << st.worst_remaining << " rad after " << st.evaluations
       << " evaluations)";
    fail(ErrorKind::numeric, os.str());
  }
  LrPhase out;
  out.lambda_plus = 0.5 * integral;
  out.lambda_minus = -out.lambda_plus;
  out.evaluations = st.evaluations;
  return out;
}

LrDecomposition lr_decompose(const StateVector& psi, Level a, double alpha,
                             double beta) {
  if (psi.n_atoms() != 1) {
    fail(ErrorKind::contract_violation,
         "lr_decompose expects a single-atom state");
  }
  if (a == Level::rydberg) {
    fail(ErrorKind::contract_violation, "lr_decompose: |a> must be |0> or |1>");
  }
  const auto& v = psi.amplitudes();
  const int other = a == Level::zero ? 1 : 0;
  if (std::norm(v[other]) > 1e-6) {
    fail(ErrorKind::contract_violation,
         "lr_decompose: state has population outside {|a>, |r>}");
  }
  TwoLevelState sub;
  sub << v[static_cast<int>(a)], v[static_cast<int>(Level::rydberg)];
  const InvariantEigenstates e = invariant_eigenstates(alpha, beta);
  return {e.plus.dot(sub), e.minus.dot(sub)};
}

}  // namespace rydsim
