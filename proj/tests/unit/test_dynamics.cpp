#include <array>
#include <cmath>

#include <doctest.h>

#include "../support/check_error.hpp"
#include "../support/oracles.hpp"
#include "rydsim/dynamics.hpp"
#include "rydsim/units.hpp"

using namespace rydsim;

namespace {

// Single atom, drive on |1> <-> |r>, embedded in the 3-level space.
TimeDependentHamiltonian single_atom(const LrPulseParams& p) {
  TimeDependentHamiltonian h;
  h.dim = 3;
  h.evaluate = [p](double t, double, Matrix& out) {
    out = build_drive(0, Level::one, lr_pulse(t, p), 1).entries();
  };
  h.norm_bound = 2.0 * std::abs(lr_pulse(0.0, p).delta);
  return h;
}

Matrix constant_h(double a, double b) {
  Matrix m = Matrix::Zero(3, 3);
  m(1, 1) = 0.5 * b;
  m(2, 2) = -0.5 * b;
  m(1, 2) = m(2, 1) = 0.5 * a;
  return m;
}

StateVector one_atom(Level l) {
  const std::array<Level, 1> a{l};
  return StateVector::basis(a);
}

}  // namespace

TEST_CASE("fixed-step propagation agrees with exponential midpoint reference") {
  const auto p = LrPulseParams::standard(1.0, 0.3, 0.3 + pi / 2);
  const auto h = single_atom(p);
  const auto ref = oracle::propagate_two_level(
      [&](double t) {
        const PulseSample s = lr_pulse(t, p);
        return oracle::drive_2x2(s.omega, s.delta, s.phi);
      },
      Eigen::Vector2cd(1.0, 0.0), 0.0, 1.0, 4000);
  for (auto method : {IntegratorMethod::rk4, IntegratorMethod::adaptive}) {
    IntegratorConfig cfg;
    cfg.method = method;
    cfg.tolerance = 1e-12;
    const auto r = evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, cfg);
    CHECK(std::abs(r.state.amplitudes()(1) - ref(0)) <= 1e-8);
    CHECK(std::abs(r.state.amplitudes()(2) - ref(1)) <= 1e-8);
    CHECK(r.state.norm() == doctest::Approx(1.0).epsilon(1e-10));
    // alpha = pi at t_f: the atom ends up in |r>.
    CHECK(std::norm(r.state.amplitudes()(2)) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("step halving changes the fixed-step result by less than 1e-8") {
  const auto h = single_atom(LrPulseParams::standard(1.0, 0.0, pi / 2));
  IntegratorConfig cfg;
  const auto a = evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, cfg);
  cfg.steps_per_segment *= 2;
  cfg.max_step_phase /= 2;
  const auto b = evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, cfg);
  CHECK((a.state.amplitudes() - b.state.amplitudes()).norm() <= 1e-8);
  CHECK(b.steps >= 2 * a.steps - 1);
}

TEST_CASE("breakpoints select the one-sided Hamiltonian through the anchor") {
  // H = A on [0, 0.5), B on [0.5, 1]; a time-only rule evaluated at 0.5
  // would give B on the last stage of the first interval.
  const Matrix A = constant_h(7.0, 1.0);
  const Matrix B = constant_h(3.0, -4.0);
  std::vector<std::pair<double, double>> seen;
  TimeDependentHamiltonian h;
  h.dim = 3;
  h.breakpoints = {0.5};
  h.norm_bound = 10.0;
  h.evaluate = [&](double t, double anchor, Matrix& out) {
    seen.emplace_back(t, anchor);
    out = anchor < 0.5 ? A : B;
  };
  const Eigen::Matrix2cd ua = oracle::expm_2x2(A.block<2, 2>(1, 1), 0.5);
  const Eigen::Matrix2cd ub = oracle::expm_2x2(B.block<2, 2>(1, 1), 0.5);
  const Eigen::Vector2cd ref = ub * ua * Eigen::Vector2cd(1.0, 0.0);
  for (auto method : {IntegratorMethod::rk4, IntegratorMethod::adaptive}) {
    seen.clear();
    IntegratorConfig cfg;
    cfg.method = method;
    cfg.tolerance = 1e-12;
    const auto r = evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, cfg);
    CHECK(std::abs(r.state.amplitudes()(1) - ref(0)) <= 1e-9);
    CHECK(std::abs(r.state.amplitudes()(2) - ref(1)) <= 1e-9);
    bool hit = false;
    for (auto [t, anchor] : seen) {
      CHECK(anchor != 0.5);
      if (t == 0.5) hit = true;
      CHECK(((t <= 0.5 && anchor < 0.5) || (t >= 0.5 && anchor > 0.5)));
    }
    CHECK(hit);
  }
}

TEST_CASE("adaptive step underflow raises IntegrationFailure") {
  TimeDependentHamiltonian h;
  h.dim = 3;
  h.evaluate = [](double, double, Matrix& out) { out = constant_h(400.0, 0.0); };
  IntegratorConfig cfg;
  cfg.method = IntegratorMethod::adaptive;
  cfg.tolerance = 1e-14;
  cfg.min_step = 0.1;
  bool thrown = false;
  try {
    evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, cfg);
  } catch (const IntegrationFailure& e) {
    thrown = true;
    CHECK(e.kind() == ErrorKind::integration_failure);
    CHECK(e.time_us() >= 0.0);
    CHECK(e.time_us() < 1.0);
  }
  CHECK(thrown);
}

TEST_CASE("invalid integrator inputs") {
  TimeDependentHamiltonian h;
  h.dim = 3;
  CHECK_ERROR_KIND(evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, {}),
                   ErrorKind::invalid_parameter);
  h.evaluate = [](double, double, Matrix& out) { out = Matrix::Zero(3, 3); };
  CHECK_ERROR_KIND(evolve_schrodinger(one_atom(Level::one), h, 1.0, 0.0, {}),
                   ErrorKind::invalid_parameter);
  IntegratorConfig bad;
  bad.steps_per_segment = 0;
  CHECK_ERROR_KIND(evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, bad),
                   ErrorKind::invalid_parameter);
  const std::array<Level, 2> two{Level::one, Level::one};
  CHECK_ERROR_KIND(evolve_schrodinger(StateVector::basis(two), h, 0.0, 1.0, {}),
                   ErrorKind::invalid_parameter);
  CHECK_ERROR_KIND(decay_operators(2, NoiseSpec{-1.0, 0.0}), ErrorKind::invalid_parameter);
}

TEST_CASE("trajectory samples are uniform and include both ends") {
  const auto h = single_atom(LrPulseParams::standard(1.0, 0.0, pi / 2));
  IntegratorConfig cfg;
  cfg.record_trajectory = true;
  cfg.sample_count = 11;
  const auto r = evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, cfg);
  REQUIRE(r.trajectory.times.size() == 11);
  CHECK(r.trajectory.times.front() == 0.0);
  CHECK(r.trajectory.times.back() == 1.0);
  CHECK(r.trajectory.times[3] == doctest::Approx(0.3));
  CHECK((r.trajectory.states.back() - r.state.amplitudes()).norm() == 0.0);
  CHECK(std::abs(r.trajectory.states.front()(1, 0)) == 1.0);
}

TEST_CASE("decay operators") {
  const auto ops = decay_operators(3, NoiseSpec{0.2, 0.05});
  REQUIRE(ops.size() == 3);
  CHECK(ops[0].rate == 0.2);
  const Matrix l0 = ops[0].dense(27);
  const std::array<Level, 3> r11{Level::rydberg, Level::one, Level::one};
  const std::array<Level, 3> o11{Level::zero, Level::one, Level::one};
  CHECK(std::abs(l0(basis_index(o11), basis_index(r11))) == doctest::Approx(std::sqrt(0.2)));
  CHECK(decay_operators(2, NoiseSpec{0.0, 0.1}).size() == 1);
  CHECK(decay_operators(2, NoiseSpec{}).empty());
}

TEST_CASE("Lindblad evolution with decay only") {
  // Control starts in |r>, target in |1>: population decays to |01>.
  TimeDependentHamiltonian h;
  h.dim = 9;
  h.evaluate = [](double, double, Matrix& out) { out = Matrix::Zero(9, 9); };
  const std::array<Level, 2> r1{Level::rydberg, Level::one};
  const DensityMatrix rho0 = DensityMatrix::from_pure(StateVector::basis(r1));
  const double gamma = 0.3, T = 2.0;
  for (auto method : {IntegratorMethod::rk4, IntegratorMethod::adaptive}) {
    IntegratorConfig cfg;
    cfg.method = method;
    cfg.steps_per_segment = 400;
    const auto r = evolve_lindblad(rho0, h, NoiseSpec{gamma, 0.0}, 0.0, T, cfg);
    CHECK(r.state.entries()(7, 7).real() == doctest::Approx(std::exp(-gamma * T)).epsilon(1e-9));
    CHECK(r.state.entries()(1, 1).real() ==
          doctest::Approx(1.0 - std::exp(-gamma * T)).epsilon(1e-9));
    CHECK(r.state.trace() == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Lindblad with no jumps reproduces the pure-state evolution") {
  const auto h = single_atom(LrPulseParams::standard(1.0, 0.0, pi / 2));
  Vector v = Vector::Zero(3);
  v(0) = std::sqrt(0.5);
  v(1) = std::sqrt(0.5);
  const StateVector psi0(1, v);
  IntegratorConfig cfg;
  const auto pure = evolve_schrodinger(psi0, h, 0.0, 1.0, cfg);
  const auto mixed = evolve_lindblad(DensityMatrix::from_pure(psi0), h, NoiseSpec{}, 0.0, 1.0, cfg);
  const Matrix proj = pure.state.amplitudes() * pure.state.amplitudes().adjoint();
  CHECK((mixed.state.entries() - proj).norm() <= 1e-10);
}

TEST_CASE("driven Lindblad evolution keeps the density matrix physical") {
  const auto h = single_atom(LrPulseParams::standard(1.0, 0.0, pi / 2));
  TimeDependentHamiltonian h1 = h;
  IntegratorConfig cfg;
  cfg.record_trajectory = true;
  cfg.sample_count = 21;
  const std::vector<JumpOperator> jumps{JumpOperator{0.5, {{2, 1}}}};
  const auto r = evolve_lindblad(DensityMatrix::from_pure(one_atom(Level::one)), h1, jumps, 0.0,
                                 1.0, cfg);
  for (const Matrix& m : r.trajectory.states) {
    const DensityMatrix rho(1, m);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rho.hermiticity_error() <= 1e-10);
    CHECK(rho.min_eigenvalue() >= -1e-10);
  }
  CHECK(r.state.entries()(2, 2).real() < 1.0);
}

TEST_CASE("propagate_columns propagates each column independently") {
  const auto h = single_atom(LrPulseParams::standard(1.0, 0.0, pi / 2));
  const Matrix u = propagate_columns(Matrix::Identity(3, 3), h, 0.0, 1.0, {});
  CHECK((u.adjoint() * u - Matrix::Identity(3, 3)).norm() <= 1e-9);
  CHECK(std::abs(u(0, 0) - 1.0) <= 1e-15);
  const auto single = evolve_schrodinger(one_atom(Level::one), h, 0.0, 1.0, {});
  CHECK((u.col(1) - single.state.amplitudes()).norm() <= 1e-14);
}
