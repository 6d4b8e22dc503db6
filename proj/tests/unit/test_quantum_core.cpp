#include <array>
#include <cmath>

#include <doctest.h>

#include "../support/check_error.hpp"
#include "../support/oracles.hpp"
#include "rydsim/quantum_core.hpp"
#include "rydsim/units.hpp"

using namespace rydsim;

TEST_CASE("basis ordering puts the control in the most significant digit") {
  CHECK(hilbert_dim(2) == 9);
  CHECK(hilbert_dim(5) == 243);
  const std::array<Level, 2> l{Level::one, Level::rydberg};
  CHECK(basis_index(l) == 5);
  CHECK(level_of(5, 0, 2) == Level::one);
  CHECK(level_of(5, 1, 2) == Level::rydberg);
  CHECK(computational_indices(2) == std::vector<Eigen::Index>{0, 1, 3, 4});
  CHECK(computational_indices(3) == std::vector<Eigen::Index>{0, 1, 3, 4, 9, 10, 12, 13});
  CHECK_ERROR_KIND(check_atom_count(0), ErrorKind::invalid_parameter);
  CHECK_ERROR_KIND(check_atom_count(6), ErrorKind::invalid_parameter);
}

TEST_CASE("states and density matrices") {
  const StateVector u = StateVector::uniform_computational(3);
  CHECK(u.norm() == doctest::Approx(1.0));
  CHECK(u.rydberg_population() == doctest::Approx(0.0));
  for (auto i : computational_indices(3)) {
    CHECK(std::abs(u.amplitudes()(i)) == doctest::Approx(1.0 / std::sqrt(8.0)));
  }
  const std::array<Level, 2> rr{Level::rydberg, Level::zero};
  const StateVector r = StateVector::basis(rr);
  CHECK(r.rydberg_population() == doctest::Approx(1.0));
  const DensityMatrix rho = DensityMatrix::from_pure(u);
  CHECK(rho.trace() == doctest::Approx(1.0));
  CHECK(rho.hermiticity_error() <= 1e-15);
  CHECK(rho.min_eigenvalue() >= -1e-12);
  CHECK_ERROR_KIND(StateVector(2, Vector::Zero(8)), ErrorKind::invalid_parameter);
}

TEST_CASE("two-level drive matches the written Hamiltonian") {
  const PulseSample s{0.0, 3.0, -1.2, 0.7};
  const TwoLevelOperator h = drive_two_level(s);
  const Eigen::Matrix2cd ref = oracle::drive_2x2(3.0, -1.2, 0.7);
  CHECK((h - ref).norm() <= 1e-15);
  CHECK((h - h.adjoint()).norm() <= 1e-15);
}

TEST_CASE("build_drive acts on one atom only") {
  const PulseSample s{0.0, 2.0, 0.5, 0.3};
  const Operator d = build_drive(1, Level::one, s, 2);
  CHECK(d.hermiticity_error() <= 1e-15);
  const Eigen::Matrix2cd ref = oracle::drive_2x2(2.0, 0.5, 0.3);
  // Control in |0>, target |1> (index 1) <-> |r> (index 2).
  CHECK(std::abs(d.entries()(1, 1) - ref(0, 0)) <= 1e-15);
  CHECK(std::abs(d.entries()(2, 1) - ref(1, 0)) <= 1e-15);
  CHECK(std::abs(d.entries()(1, 2) - ref(0, 1)) <= 1e-15);
  CHECK(std::abs(d.entries()(0, 0)) == 0.0);
  // Same block for control in |r>.
  CHECK(std::abs(d.entries()(8, 7) - ref(1, 0)) <= 1e-15);
  Matrix off = d.entries();
  for (Eigen::Index a = 0; a < 3; ++a) {
    off(3 * a + 1, 3 * a + 1) = off(3 * a + 2, 3 * a + 2) = 0;
    off(3 * a + 1, 3 * a + 2) = off(3 * a + 2, 3 * a + 1) = 0;
  }
  CHECK(off.norm() == 0.0);
}

TEST_CASE("interaction diagonal") {
  const InteractionSpec spec{5.0, 0.25};
  const Eigen::VectorXd d2 = rri_diagonal(2, spec);
  CHECK(d2(8) == 5.0);
  CHECK(d2.sum() == 5.0);
  const Eigen::VectorXd d3 = rri_diagonal(3, spec);
  const std::array<Level, 3> rrr{Level::rydberg, Level::rydberg, Level::rydberg};
  const std::array<Level, 3> rr0{Level::rydberg, Level::rydberg, Level::zero};
  const std::array<Level, 3> orr{Level::one, Level::rydberg, Level::rydberg};
  CHECK(d3(basis_index(rrr)) == doctest::Approx(10.25));
  CHECK(d3(basis_index(rr0)) == doctest::Approx(5.0));
  CHECK(d3(basis_index(orr)) == doctest::Approx(0.25));
  CHECK((build_rri(3, spec).entries().diagonal().real() - d3).norm() == 0.0);
}

TEST_CASE("instantaneous eigensystem diagonalises the drive") {
  for (const PulseSample s : {PulseSample{0, 2.0, 1.0, 0.4}, PulseSample{0, 1.0, -3.0, -1.1},
                              PulseSample{0, 0.0, 2.0, 0.0}}) {
    const auto e = instantaneous_eigensystem(s);
    const TwoLevelOperator h = drive_two_level(s);
    CHECK((h * e.phi_plus - e.e_plus * e.phi_plus).norm() <= 1e-14);
    CHECK((h * e.phi_minus - e.e_minus * e.phi_minus).norm() <= 1e-14);
    CHECK(e.e_plus == doctest::Approx(0.5 * std::hypot(s.omega, s.delta)));
    CHECK(std::abs(e.phi_plus.dot(e.phi_minus)) <= 1e-15);
  }
}

TEST_CASE("invariant eigenstates and derivative") {
  const double alpha = 0.9, beta = 2.1;
  const auto I = invariant_operator(alpha, beta, 2.0);
  const auto es = invariant_eigenstates(alpha, beta);
  CHECK((I * es.plus - 1.0 * es.plus).norm() <= 1e-14);
  CHECK((I * es.minus + 1.0 * es.minus).norm() <= 1e-14);
  const double h = 1e-6, da = 0.3, db = -0.8;
  const TwoLevelOperator fd = (invariant_operator(alpha + da * h, beta + db * h, 2.0) -
                               invariant_operator(alpha - da * h, beta - db * h, 2.0)) /
                              (2 * h);
  CHECK((invariant_operator_rate(alpha, beta, da, db, 2.0) - fd).norm() <= 1e-8);
}

TEST_CASE("LR pulse satisfies the invariant condition") {
  for (double chi : {1.0, 3.7}) {
    const auto p = LrPulseParams::standard(1.0, 0.2, 0.2 + pi / 2);
    double worst = 0.0;
    for (int k = 1; k < 1000; ++k) worst = std::max(worst, invariant_residual(k / 1000.0, p, chi));
    const double scale = chi * std::abs(lr_pulse(0.0, p).delta);
    CHECK(worst <= 1e-8 * scale);
    // A wrong drive violates it.
    PulseSample bad = lr_pulse(0.4, p);
    bad.omega *= 1.1;
    CHECK(invariant_residual(0.4, p, chi, bad) > 1e-3);
  }
}

TEST_CASE("LR phase against an independent quadrature") {
  const auto p = LrPulseParams::standard(1.0, 0.0, pi / 2);
  const LrPhase ph = lr_phase(p);
  CHECK(ph.lambda_plus == doctest::Approx(4.81973071548319).epsilon(1e-9));
  CHECK(ph.lambda_minus == -ph.lambda_plus);
  // Simpson over the interior of the same integrand.
  const double ref = 0.5 * oracle::simpson([&](double t) {
    const PulseSample s = lr_pulse(t, p);
    const double a = p.alpha(t), b = p.beta(t), bd = p.beta.derivative(t);
    const double c = std::cos(0.5 * a);
    const double wt = (s.delta + bd) * c * c + 0.5 * s.omega * std::sin(a) * std::cos(b - p.phi);
    return s.delta - 2.0 * wt;
  }, 0.0, 1.0, 20000);
  CHECK(ph.lambda_plus == doctest::Approx(ref).epsilon(1e-8));
  // Uniform (phi, endpoint) shifts leave it unchanged.
  CHECK(lr_phase(LrPulseParams::standard(1.0, 0.7, pi / 2 + 0.7)).lambda_plus ==
        doctest::Approx(ph.lambda_plus).epsilon(1e-10));
  // Scale-free in t_f.
  CHECK(lr_phase(LrPulseParams::standard(2.5, 0.0, pi / 2)).lambda_plus ==
        doctest::Approx(ph.lambda_plus).epsilon(1e-9));
}

TEST_CASE("LR decomposition") {
  const std::array<Level, 1> a{Level::one};
  const auto d0 = lr_decompose(StateVector::basis(a), Level::one, 0.0, pi / 2);
  CHECK(std::abs(d0.c_plus) == doctest::Approx(1.0));
  CHECK(std::abs(d0.c_minus) <= 1e-15);
  Vector v = Vector::Zero(3);
  v(1) = 0.6;
  v(2) = cplx(0.0, 0.8);
  const auto d = lr_decompose(StateVector(1, v), Level::one, 1.1, 0.4);
  CHECK(std::norm(d.c_plus) + std::norm(d.c_minus) == doctest::Approx(1.0));
  v(0) = 0.1;
  CHECK_ERROR_KIND(lr_decompose(StateVector(1, v), Level::one, 1.1, 0.4),
                   ErrorKind::contract_violation);
}

TEST_CASE("operator csv") {
  Matrix m = Matrix::Zero(9, 9);
  m(0, 0) = cplx(1.5, -2.0);
  const std::string csv = Operator(2, m).to_csv();
  CHECK(csv.substr(0, csv.find(',')) == "1.5-2j");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
}
