#include <array>
#include <cmath>
#include <utility>

#include <doctest.h>

#include "../support/check_error.hpp"
#include "rydsim/gate_protocols.hpp"
#include "rydsim/units.hpp"

using namespace rydsim;

namespace {

// Values frozen from an independent DOP853 integration (rtol 1e-12) of the
// same Hamiltonian written directly in numpy.
constexpr double kStaFidelity = 0.997973489088;
constexpr double kStaPhase01 = 0.104006421;
constexpr double kNonadiabaticFidelity = 0.999445087479;
constexpr double kSta3Fidelity = 0.960022107658;

const InteractionSpec kV40{from_2pi_mhz(40.0), 0.0};

double angle_diff(double a, double b) { return std::abs(wrap_phase(a - b)); }

}  // namespace

TEST_CASE("scheme names round-trip") {
  for (Scheme s : {Scheme::sta, Scheme::adiabatic, Scheme::nonadiabatic}) {
    CHECK(scheme_from_string(to_string(s)) == s);
  }
  CHECK_ERROR_KIND(scheme_from_string("fast"), ErrorKind::parse);
}

TEST_CASE("step phase configurations") {
  const auto c = StepPhaseConfig::for_theta(pi);
  CHECK(c.beta1 == doctest::Approx(pi / 2));
  CHECK(c.beta2 == doctest::Approx(pi / 2));
  CHECK(c.beta3 == doctest::Approx(pi / 2));
  CHECK(c.phi1 == doctest::Approx(0.0));
  CHECK(c.phi2 == doctest::Approx(0.0));
  CHECK(c.phi3 == doctest::Approx(pi));
  CHECK(angle_diff(c.realised_theta(), pi) <= 1e-15);
  const auto e = StepPhaseConfig::from_endpoints(0.3, 1.9);
  CHECK(e.realised_theta() == doctest::Approx(pi + 1.6));
  e.validate();
  StepPhaseConfig bad = c;
  bad.phi3 = 0.0;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::invalid_parameter);
  bad = c;
  bad.phi1 += 0.1;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::invalid_parameter);
}

TEST_CASE("gate specifications") {
  CHECK(CpgSpec::pi_gate(3).thetas == std::vector<double>{pi, pi});
  CHECK_ERROR_KIND(CpgSpec::pi_gate(1).validate(), ErrorKind::invalid_parameter);
  CHECK_ERROR_KIND(CpgSpec::pi_gate(6).validate(), ErrorKind::invalid_parameter);
  CHECK_ERROR_KIND((CpgSpec{3, {pi}}.validate()), ErrorKind::invalid_parameter);
  CHECK_ERROR_KIND((CpgSpec{2, {4.0}}.validate()), ErrorKind::invalid_parameter);
}

TEST_CASE("ideal gate phases follow the control and target bits") {
  CHECK(ideal_cpg_phases(CpgSpec::pi_gate(2)) == std::vector<double>{0, 0, 0, pi});
  const auto p = ideal_cpg_phases(CpgSpec{3, {0.4, -1.1}});
  CHECK(p == std::vector<double>{0, 0, 0, 0, 0, -1.1, 0.4, 0.4 - 1.1});
  const Matrix u = ideal_cpg(CpgSpec::pi_gate(2));
  CHECK(u.rows() == 4);
  CHECK(std::abs(u(3, 3) + 1.0) <= 1e-15);
  CHECK(std::abs(u(2, 2) - 1.0) <= 1e-15);
}

TEST_CASE("shortcut sequence layout") {
  const PulseSchedule s = sta_sequence(CpgSpec::pi_gate(3), 1.5, kV40);
  CHECK(s.n_atoms == 3);
  CHECK(s.duration() == doctest::Approx(6.0));
  REQUIRE(s.segments.size() == 6);
  CHECK(s.breakpoints() == std::vector<double>{0.0, 1.5, 3.0, 4.5, 6.0});
  CHECK(s.segments.front().atom == 0);
  CHECK(s.segments.front().level_a == Level::zero);
  CHECK(s.segments.back().phi == doctest::Approx(pi));
  for (int k = 1; k <= 4; ++k) {
    CHECK(s.segments[k].atom >= 1);
    CHECK(s.segments[k].level_a == Level::one);
  }
  CHECK(std::string(family_name(s.segments[0].shape)) == "lr");
  const PulseSchedule t = sta_sequence(CpgSpec{2, {0.7}}, 1.0, kV40);
  CHECK(t.segments[2].phi == doctest::Approx(0.7 - pi));
  CHECK(t.thetas == std::vector<double>{0.7});
  CHECK_ERROR_KIND(sta_sequence(CpgSpec::pi_gate(2), 0.0, kV40), ErrorKind::invalid_parameter);
}

TEST_CASE("adiabatic and non-adiabatic layouts") {
  const PulseSchedule a = adiabatic_sequence(pi, pi, 4.0, kV40);
  CHECK(a.duration() == doctest::Approx(32.0));
  CHECK(a.breakpoints() == std::vector<double>{0.0, 8.0, 16.0, 24.0, 32.0});
  CHECK(a.segments[0].phi == doctest::Approx(pi / 2));
  CHECK(a.segments[3].phi == doctest::Approx(-pi / 2));
  CHECK_ERROR_KIND(adiabatic_sequence(pi, pi, 0.0, kV40), ErrorKind::invalid_parameter);
  NonadiabaticCalibration cal;
  const PulseSchedule n = nonadiabatic_sequence(12.315, kV40, 1.0, &cal);
  CHECK(n.duration() == doctest::Approx(4.0));
  CHECK(cal.pi_pulse.sigma == doctest::Approx(0.020714851273052).epsilon(1e-9));
  CHECK(cal.two_pi_pulse.area == doctest::Approx(2 * pi).epsilon(1e-12));
  CHECK(n.segments[1].phi == doctest::Approx(pi));
  CHECK(n.segments[2].phi == doctest::Approx(pi));
  CHECK(n.segments[1].duration() == doctest::Approx(2.0));
}

TEST_CASE("schedule validation") {
  PulseSchedule s = sta_sequence(CpgSpec::pi_gate(2), 1.0, kV40);
  PulseSchedule bad = s;
  bad.segments[3].t_start = 2.5;  // overlaps and mismatches its shape
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::invalid_parameter);
  bad = s;
  bad.segments[1].atom = 2;
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::domain);
  bad = s;
  bad.segments[0].phi = 0.4;  // disagrees with the pulse's own phase
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::invalid_parameter);
  bad = s;
  for (auto& seg : bad.segments) {
    if (seg.t_start >= 3.0) seg.t_start += 0.5, seg.t_end += 0.5;
  }
  CHECK_ERROR_KIND(bad.validate(), ErrorKind::invalid_parameter);
}

TEST_CASE("perturbation scales every sample") {
  const PulseSchedule s = sta_sequence(CpgSpec::pi_gate(2), 1.0, kV40);
  const PulseSchedule p = s.perturbed(0.1, -0.05, 0.3);
  const PulseSample a = s.segments[0].sample(0.4);
  const PulseSample b = p.segments[0].sample(0.4);
  CHECK(b.omega == doctest::Approx(1.1 * a.omega));
  CHECK(b.delta == doctest::Approx(0.95 * a.delta + 0.3));
  CHECK(p.segments[0].ideal_sample(0.4).omega == doctest::Approx(a.omega));
  const PulseSchedule q = p.perturbed(0.1, 0.0, 0.0);
  CHECK(q.segments[0].sample(0.4).omega == doctest::Approx(1.21 * a.omega));
}

TEST_CASE("hamiltonian_at takes the later segment at internal boundaries") {
  const PulseSchedule s = sta_sequence(CpgSpec::pi_gate(2), 1.0, InteractionSpec{});
  const Operator h = s.hamiltonian_at(1.0);
  // Only the target's first segment is live: |00> has Delta/2 from the
  // target's |1> level absent, |01> carries +Delta_target/2.
  const double d = s.segments[1].sample(1.0).delta;
  CHECK(std::abs(h.entries()(1, 1) - 0.5 * d) <= 1e-12);
  CHECK(std::abs(h.entries()(0, 0)) <= 1e-12);
  const Operator end = s.hamiltonian_at(4.0);
  const double dc = s.segments[3].sample(4.0).delta;
  CHECK(std::abs(end.entries()(0, 0) - 0.5 * dc) <= 1e-12);
  CHECK(h.hermiticity_error() <= 1e-15);
}

TEST_CASE("shortcut gate fidelity at finite blockade") {
  const PulseSchedule s = sta_sequence(CpgSpec::pi_gate(2), 1.0, kV40);
  const GateRun r = run_gate(s, StateVector::uniform_computational(2), std::nullopt, {});
  CHECK(r.fidelity == doctest::Approx(kStaFidelity).epsilon(1e-7));
  CHECK(r.leakage <= 1e-6);
  const GateMatrix g = extract_gate_matrix(s, {});
  const auto ph = g.diagonal_phases();
  CHECK(angle_diff(ph[0], 0.0) <= 1e-5);
  CHECK(angle_diff(ph[1], kStaPhase01) <= 1e-5);
  CHECK(angle_diff(ph[2], 0.0) <= 1e-5);
  CHECK(angle_diff(ph[3], pi) <= 1e-3);
  CHECK(g.max_leakage() <= 1e-6);
  const auto bf = g.basis_fidelities(CpgSpec::pi_gate(2));
  CHECK(bf[0] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("light shift on the blocked branch vanishes with stronger blockade") {
  const PulseSchedule s =
      sta_sequence(CpgSpec::pi_gate(2), 1.0, InteractionSpec{from_2pi_mhz(1000.0), 0.0});
  const GateMatrix g = extract_gate_matrix(s, {});
  const auto ph = g.diagonal_phases();
  const auto ideal = ideal_cpg_phases(CpgSpec::pi_gate(2));
  for (std::size_t k = 0; k < 4; ++k) CHECK(angle_diff(ph[k], ideal[k]) <= 2e-2);
  CHECK(std::abs(ph[1]) < kStaPhase01 / 10);
}

TEST_CASE("non-adiabatic gate fidelity") {
  const PulseSchedule s = nonadiabatic_sequence(12.314065835724366, kV40);
  const GateRun r = run_gate(s, StateVector::uniform_computational(2), std::nullopt, {});
  CHECK(r.fidelity == doctest::Approx(kNonadiabaticFidelity).epsilon(1e-7));
}

TEST_CASE("three-qubit shortcut gate fidelity") {
  const PulseSchedule s =
      sta_sequence(CpgSpec::pi_gate(3), 1.0, InteractionSpec{from_2pi_mhz(40.0), from_2pi_mhz(0.1)});
  const GateRun r = run_gate(s, StateVector::uniform_computational(3), std::nullopt, {});
  CHECK(r.fidelity == doctest::Approx(kSta3Fidelity).epsilon(1e-7));
}

TEST_CASE("decay lowers the fidelity and keeps the state physical") {
  const PulseSchedule s = sta_sequence(CpgSpec::pi_gate(2), 1.0, kV40);
  const GateRun r =
      run_gate(s, StateVector::uniform_computational(2), NoiseSpec{0.01, 0.01}, {});
  REQUIRE(std::holds_alternative<DensityMatrix>(r.final_state));
  const auto& rho = std::get<DensityMatrix>(r.final_state);
  CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rho.min_eigenvalue() >= -1e-10);
  CHECK(r.fidelity < kStaFidelity);
  CHECK(r.fidelity > 0.95);
  // Inactive noise takes the pure-state path.
  const GateRun q = run_gate(s, StateVector::uniform_computational(2), NoiseSpec{}, {});
  CHECK(std::holds_alternative<StateVector>(q.final_state));
}

TEST_CASE("initial states must lie in the computational subspace") {
  const PulseSchedule s = sta_sequence(CpgSpec::pi_gate(2), 1.0, kV40);
  const std::array<Level, 2> r0{Level::rydberg, Level::zero};
  CHECK_ERROR_KIND(run_gate(s, StateVector::basis(r0), std::nullopt, {}),
                   ErrorKind::contract_violation);
  const std::array<Level, 3> three{Level::zero, Level::zero, Level::zero};
  CHECK_ERROR_KIND(run_gate(s, StateVector::basis(three), std::nullopt, {}),
                   ErrorKind::invalid_parameter);
}

TEST_CASE("embed_computational places amplitudes on computational indices") {
  Vector v(4);
  v << 0.5, 0.5, 0.5, cplx(0, 0.5);
  const StateVector psi = embed_computational(2, v);
  CHECK(psi.amplitudes()(4) == cplx(0, 0.5));
  CHECK(psi.amplitudes()(3) == 0.5);
  CHECK(psi.rydberg_population() == doctest::Approx(0.0));
}

TEST_CASE("zero target phase gives the identity on the computational subspace") {
  const PulseSchedule s = sta_sequence(CpgSpec{2, {0.0}}, 1.0, kV40);
  const auto ph = extract_gate_matrix(s, {}).diagonal_phases();
  CHECK(angle_diff(ph[3], 0.0) <= 2e-2);
  CHECK(angle_diff(ph[2], 0.0) <= 2e-2);
}

TEST_CASE("non-adiabatic gate approaches diag(1,1,1,-1) under strong blockade") {
  IntegratorConfig cfg;
  cfg.max_step_phase = 0.2;  // converged to 1e-12 here; the |rr> amplitude stays tiny
  const PulseSchedule s =
      nonadiabatic_sequence(12.314065835724366, InteractionSpec{from_2pi_mhz(4000.0), 0.0});
  const GateMatrix g = extract_gate_matrix(s, cfg);
  const Matrix ideal = ideal_cpg(CpgSpec::pi_gate(2));
  CHECK((g.matrix - ideal).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("shortcut gate matrix columns") {
  const PulseSchedule s = sta_sequence(CpgSpec::pi_gate(2), 1.0, kV40);
  const GateMatrix g = extract_gate_matrix(s, {});
  for (double l : g.leakage) CHECK(l <= 1e-3);
  // |01> and |10> come back with unit modulus; |01> carries the light shift.
  CHECK(std::abs(std::abs(g.matrix(1, 1)) - 1.0) <= 1e-3);
  CHECK(std::abs(g.matrix(2, 2) - 1.0) <= 1e-3);
  const Matrix id = Matrix::Identity(4, 4);
  CHECK((g.matrix.adjoint() * g.matrix - id).norm() <= 3.0 * g.max_leakage() + 1e-12);
}

TEST_CASE("infidelity does not grow with the blockade strength") {
  double previous = 1.0;
  for (double v : {10.0, 20.0, 40.0, 80.0, 160.0}) {
    const PulseSchedule s =
        sta_sequence(CpgSpec::pi_gate(2), 1.0, InteractionSpec{from_2pi_mhz(v), 0.0});
    const double infidelity =
        1.0 - run_gate(s, StateVector::uniform_computational(2), std::nullopt, {}).fidelity;
    CHECK(infidelity <= previous);
    previous = infidelity;
  }
}

TEST_CASE("the |11> phase follows pi + beta3 - beta2") {
  for (auto [b2, b3] : {std::pair{0.3, 1.1}, std::pair{-1.0, 2.5}, std::pair{2.0, 0.4}}) {
    const StepPhaseConfig c = StepPhaseConfig::from_endpoints(b2, b3);
    const std::array<StepPhaseConfig, 1> per{c};
    const PulseSchedule s = sta_sequence(per, 1.0, kV40);
    const auto ph = extract_gate_matrix(s, {}).diagonal_phases();
    CHECK(angle_diff(ph[3], pi + b3 - b2) <= 2e-2);
  }
}
