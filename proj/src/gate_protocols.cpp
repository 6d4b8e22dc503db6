#include "rydsim/gate_protocols.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "rydsim/errors.hpp"
#include "rydsim/metrics.hpp"

namespace rydsim {
namespace {

constexpr double kPhaseTol = 1e-9;
constexpr double kTimeTol = 1e-12;

bool same_phase(double a, double b) {
  return std::abs(wrap_phase(a - b)) <= kPhaseTol;
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Matrices A, B with drive(Omega, Delta) = Omega*A + Delta*B for one segment.
struct SegmentBasis {
  Matrix rabi;
  Matrix detuning;
};

SegmentBasis segment_basis(const DriveSegment& seg, int n_atoms) {
  PulseSample unit_rabi{0.0, 1.0, 0.0, seg.phi};
  PulseSample unit_det{0.0, 0.0, 1.0, seg.phi};
  return {build_drive(seg.atom, seg.level_a, unit_rabi, n_atoms).entries(),
          build_drive(seg.atom, seg.level_a, unit_det, n_atoms).entries()};
}

bool covers(const DriveSegment& seg, double t) {
  return t >= seg.t_start && t <= seg.t_end;
}

}  // namespace

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::sta: return "sta";
    case Scheme::adiabatic: return "adiabatic";
    case Scheme::nonadiabatic: return "nonadiabatic";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "sta") return Scheme::sta;
  if (name == "adiabatic") return Scheme::adiabatic;
  if (name == "nonadiabatic") return Scheme::nonadiabatic;
  fail(ErrorKind::parse, "unknown scheme '" + name + "'");
}

StepPhaseConfig StepPhaseConfig::for_theta(double theta) {
  return from_endpoints(pi / 2.0, theta - pi / 2.0);
}

StepPhaseConfig StepPhaseConfig::from_endpoints(double beta2, double beta3) {
  StepPhaseConfig c;
  c.beta1 = pi / 2.0;
  c.beta2 = beta2;
  c.beta3 = beta3;
  c.phi1 = beta2 - pi / 2.0;
  c.phi2 = beta3 - pi / 2.0;
  c.phi3 = pi;
  return c;
}

void StepPhaseConfig::validate() const {
  if (!same_phase(beta1, pi / 2.0)) {
    fail(ErrorKind::invalid_parameter, "beta1 must be pi/2");
  }
  if (!same_phase(beta2 - phi1, pi / 2.0)) {
    fail(ErrorKind::invalid_parameter, "beta2 - phi1 must be pi/2");
  }
  if (!same_phase(beta3 - phi2, pi / 2.0)) {
    fail(ErrorKind::invalid_parameter, "beta3 - phi2 must be pi/2");
  }
  if (!same_phase(phi3, pi)) {
    fail(ErrorKind::invalid_parameter, "phi3 must be pi");
  }
}

CpgSpec CpgSpec::pi_gate(int n_qubits) {
  return CpgSpec{n_qubits, std::vector<double>(std::max(n_qubits - 1, 0), pi)};
}

void CpgSpec::validate() const {
  if (n_qubits < 2 || n_qubits > kMaxAtoms) {
    fail(ErrorKind::invalid_parameter, "n_qubits must be in [2, 5]");
  }
  if (static_cast<int>(thetas.size()) != n_qubits - 1) {
    fail(ErrorKind::invalid_parameter, "need one theta per target qubit");
  }
  for (double th : thetas) {
    if (!(std::abs(th) <= pi + kTimeTol)) {
      std::ostringstream os;
      os << "theta " << th << " outside [-pi, pi]";
      fail(ErrorKind::invalid_parameter, os.str());
    }
  }
}

const char* family_name(const PulseShape& shape) {
  return std::visit(overloaded{
                        [](const LrPulseParams&) { return "lr"; },
                        [](const AdiabaticShape&) { return "adiabatic"; },
                        [](const GaussianPulseParams&) { return "gaussian"; },
                    },
                    shape);
}

// ---------------------------------------------------------------------------
// DriveSegment

PulseSample DriveSegment::ideal_sample(double local_t) const {
  const double u = std::clamp(local_t, 0.0, duration());
  PulseSample s = std::visit(
      overloaded{
          [&](const LrPulseParams& p) { return lr_pulse(u, p); },
          [&](const AdiabaticShape& a) {
            const double offset =
                a.half == AdiabaticHalf::second ? 2.0 * a.params.tau : 0.0;
            return adiabatic_pulse(u + offset, a.params, a.half);
          },
          [&](const GaussianPulseParams& g) { return gaussian_pulse(u, g); },
      },
      shape);
  s.t = local_t;
  s.phi = phi;
  return s;
}

PulseSample DriveSegment::sample(double t) const {
  PulseSample s = deviation.apply(ideal_sample(t - t_start));
  s.t = t;
  return s;
}

double DriveSegment::peak_magnitude() const {
  constexpr int kGrid = 512;
  double peak = 0.0;
  for (int k = 0; k <= kGrid; ++k) {
    const PulseSample s = sample(t_start + duration() * k / kGrid);
    peak = std::max(peak, std::abs(s.omega) + std::abs(s.delta));
  }
  return peak;
}

// ---------------------------------------------------------------------------
// PulseSchedule

double PulseSchedule::duration() const {
  double end = 0.0;
  for (const auto& s : segments) end = std::max(end, s.t_end);
  return end;
}

std::vector<double> PulseSchedule::breakpoints() const {
  std::vector<double> out;
  for (const auto& s : segments) {
    out.push_back(s.t_start);
    out.push_back(s.t_end);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void PulseSchedule::validate() const {
  check_atom_count(n_atoms);
  if (n_atoms < 2) fail(ErrorKind::invalid_parameter, "a gate needs at least two atoms");
  if (static_cast<int>(thetas.size()) != n_atoms - 1) {
    fail(ErrorKind::invalid_parameter, "need one theta per target atom");
  }
  if (interactions.V < 0.0 || interactions.V1 < 0.0) {
    fail(ErrorKind::invalid_parameter, "interaction strengths must be >= 0");
  }
  if (segments.empty()) fail(ErrorKind::invalid_parameter, "schedule has no segments");
  for (const auto& s : segments) {
    if (s.atom < 0 || s.atom >= n_atoms) {
      fail(ErrorKind::domain, "segment addresses a nonexistent atom");
    }
    if (s.level_a == Level::rydberg) {
      fail(ErrorKind::invalid_parameter, "segment must drive |0> or |1>");
    }
    if (!(s.t_start >= 0.0) || !(s.t_end > s.t_start)) {
      fail(ErrorKind::invalid_parameter, "segment times must satisfy 0 <= t_start < t_end");
    }
    const double len = std::visit(
        overloaded{
            [](const LrPulseParams& p) { return p.t_f; },
            [](const AdiabaticShape& a) { return 2.0 * a.params.tau; },
            [](const GaussianPulseParams& g) { return g.t_end; },
        },
        s.shape);
    if (const auto* lr = std::get_if<LrPulseParams>(&s.shape); lr && lr->phi != s.phi) {
      fail(ErrorKind::invalid_parameter, "LR segment phase differs from its pulse phase");
    }
    if (std::abs(len - s.duration()) > 1e-9 * std::max(1.0, len)) {
      fail(ErrorKind::invalid_parameter,
           "segment duration does not match its pulse parameters");
    }
  }
  // Per-atom non-overlap.
  for (int atom = 0; atom < n_atoms; ++atom) {
    std::vector<std::pair<double, double>> spans;
    for (const auto& s : segments) {
      if (s.atom == atom) spans.emplace_back(s.t_start, s.t_end);
    }
    std::sort(spans.begin(), spans.end());
    for (std::size_t k = 1; k < spans.size(); ++k) {
      if (spans[k].first < spans[k - 1].second - kTimeTol) {
        fail(ErrorKind::invalid_parameter, "segments on one atom overlap in time");
      }
    }
  }
  // Segments together must tile [0, duration].
  std::vector<std::pair<double, double>> all;
  for (const auto& s : segments) all.emplace_back(s.t_start, s.t_end);
  std::sort(all.begin(), all.end());
  double reach = 0.0;
  for (const auto& [a, b] : all) {
    if (a > reach + kTimeTol) fail(ErrorKind::invalid_parameter, "schedule has a gap");
    reach = std::max(reach, b);
  }
}

PulseSchedule PulseSchedule::perturbed(double omega_rel, double delta_rel,
                                       double delta_abs) const {
  PulseSchedule out = *this;
  for (auto& s : out.segments) {
    s.deviation = s.deviation.then(omega_rel, delta_rel, delta_abs);
  }
  return out;
}

TimeDependentHamiltonian PulseSchedule::hamiltonian() const {
  validate();
  struct Compiled {
    DriveSegment seg;
    SegmentBasis basis;
  };
  auto compiled = std::make_shared<std::vector<Compiled>>();
  for (const auto& s : segments) compiled->push_back({s, segment_basis(s, n_atoms)});
  const Eigen::VectorXd rri = rri_diagonal(n_atoms, interactions);

  TimeDependentHamiltonian h;
  h.dim = hilbert_dim(n_atoms);
  h.breakpoints = breakpoints();

  // Norm bound: RRI plus the drives that can be on at the same time.
  double drive_bound = 0.0;
  for (std::size_t k = 0; k + 1 < h.breakpoints.size(); ++k) {
    const double mid = 0.5 * (h.breakpoints[k] + h.breakpoints[k + 1]);
    double sum = 0.0;
    for (const auto& c : *compiled) {
      if (covers(c.seg, mid)) sum += 0.5 * c.seg.peak_magnitude();
    }
    drive_bound = std::max(drive_bound, sum);
  }
  h.norm_bound = rri.cwiseAbs().maxCoeff() + 1.05 * drive_bound;

  h.evaluate = [compiled, rri](double t, double anchor, Matrix& out) {
    out.setZero();
    out.diagonal() = rri.cast<cplx>();
    for (const auto& c : *compiled) {
      if (!(anchor > c.seg.t_start && anchor < c.seg.t_end)) continue;
      const PulseSample s = c.seg.sample(std::clamp(t, c.seg.t_start, c.seg.t_end));
      if (s.omega != 0.0) out.noalias() += s.omega * c.basis.rabi;
      if (s.delta != 0.0) out.noalias() += s.delta * c.basis.detuning;
    }
  };
  return h;
}

Operator PulseSchedule::hamiltonian_at(double t) const {
  const TimeDependentHamiltonian h = hamiltonian();
  const double end = duration();
  if (t < -kTimeTol || t > end + kTimeTol) {
    fail(ErrorKind::domain, "time outside the schedule");
  }
  // Anchor just inside the interval that starts at t (or ends there, at the end).
  const double span = std::max(end, 1.0);
  const double anchor = t >= end ? end - 1e-9 * span : t + 1e-9 * span;
  Matrix m(h.dim, h.dim);
  h.evaluate(t, anchor, m);
  return Operator(n_atoms, std::move(m));
}

// ---------------------------------------------------------------------------
// Builders

PulseSchedule sta_sequence(const CpgSpec& spec, double t_f,
                           const InteractionSpec& interactions) {
  spec.validate();
  std::vector<StepPhaseConfig> per_target;
  for (double th : spec.thetas) per_target.push_back(StepPhaseConfig::for_theta(th));
  PulseSchedule sch = sta_sequence(per_target, t_f, interactions);
  sch.thetas = spec.thetas;
  return sch;
}

PulseSchedule sta_sequence(std::span<const StepPhaseConfig> per_target,
                           double t_f, const InteractionSpec& interactions) {
  if (!(t_f > 0.0)) fail(ErrorKind::invalid_parameter, "t_f must be > 0");
  if (per_target.empty()) fail(ErrorKind::invalid_parameter, "need at least one target");
  for (const auto& c : per_target) {
    c.validate();
    if (!same_phase(c.beta1, per_target[0].beta1) ||
        !same_phase(c.phi3, per_target[0].phi3)) {
      fail(ErrorKind::invalid_parameter, "control-step phases must agree across targets");
    }
  }
  const StepPhaseConfig& first = per_target[0];
  PulseSchedule sch;
  sch.scheme = Scheme::sta;
  sch.n_atoms = static_cast<int>(per_target.size()) + 1;
  check_atom_count(sch.n_atoms);
  sch.interactions = interactions;

  auto lr_segment = [&](int atom, Level a, double t0, double phi, double endpoint) {
    DriveSegment s;
    s.atom = atom;
    s.level_a = a;
    s.t_start = t0;
    s.t_end = t0 + t_f;
    s.shape = LrPulseParams::standard(t_f, phi, endpoint);
    s.phi = phi;
    return s;
  };

  sch.segments.push_back(lr_segment(0, Level::zero, 0.0, 0.0, first.beta1));
  for (std::size_t j = 0; j < per_target.size(); ++j) {
    const auto& c = per_target[j];
    const int atom = static_cast<int>(j) + 1;
    sch.segments.push_back(lr_segment(atom, Level::one, t_f, c.phi1, c.beta2));
    sch.segments.push_back(lr_segment(atom, Level::one, 2.0 * t_f, c.phi2, c.beta3));
    sch.thetas.push_back(wrap_phase(c.realised_theta()));
  }
  // Step (iii) reuses step (i)'s Omega and Delta: beta - phi3 = beta1.
  sch.segments.push_back(
      lr_segment(0, Level::zero, 3.0 * t_f, first.phi3, first.phi3 + first.beta1));
  sch.validate();
  return sch;
}

PulseSchedule adiabatic_sequence(double omega0, double delta0, double tau,
                                 const InteractionSpec& interactions) {
  if (!(omega0 > 0.0) || !(delta0 > 0.0) || !(tau > 0.0)) {
    fail(ErrorKind::invalid_parameter, "omega0, delta0 and tau must be > 0");
  }
  const AdiabaticPulseParams p{omega0, delta0, tau};
  auto seg = [&](int atom, Level a, double t0, AdiabaticHalf half, double phi) {
    DriveSegment s;
    s.atom = atom;
    s.level_a = a;
    s.t_start = t0;
    s.t_end = t0 + 2.0 * tau;
    s.shape = AdiabaticShape{p, half};
    s.phi = phi;
    return s;
  };
  PulseSchedule sch;
  sch.scheme = Scheme::adiabatic;
  sch.n_atoms = 2;
  sch.thetas = {pi};
  sch.interactions = interactions;
  sch.segments = {
      seg(0, Level::zero, 0.0, AdiabaticHalf::first, pi / 2.0),
      seg(1, Level::one, 2.0 * tau, AdiabaticHalf::first, 0.0),
      seg(1, Level::one, 4.0 * tau, AdiabaticHalf::second, 0.0),
      seg(0, Level::zero, 6.0 * tau, AdiabaticHalf::second, -pi / 2.0),
  };
  sch.validate();
  return sch;
}

PulseSchedule nonadiabatic_sequence(double omega_n,
                                    const InteractionSpec& interactions,
                                    double t_step,
                                    NonadiabaticCalibration* calibration) {
  if (!(omega_n > 0.0)) fail(ErrorKind::invalid_parameter, "omega_n must be > 0");
  if (!(t_step > 0.0)) fail(ErrorKind::invalid_parameter, "t_step must be > 0");
  const SigmaCalibration cal_pi = calibrate_sigma(omega_n, t_step, pi);
  const SigmaCalibration cal_2pi = calibrate_sigma(omega_n, 2.0 * t_step, two_pi);
  if (calibration) *calibration = {cal_pi, cal_2pi};

  auto seg = [&](int atom, Level a, double t0, double window, double sigma,
                 double phi) {
    DriveSegment s;
    s.atom = atom;
    s.level_a = a;
    s.t_start = t0;
    s.t_end = t0 + window;
    s.shape = GaussianPulseParams{omega_n, sigma, 0.0, window};
    s.phi = phi;
    return s;
  };
  PulseSchedule sch;
  sch.scheme = Scheme::nonadiabatic;
  sch.n_atoms = 2;
  sch.thetas = {pi};
  sch.interactions = interactions;
  sch.segments = {
      seg(0, Level::zero, 0.0, t_step, cal_pi.sigma, 0.0),
      seg(1, Level::one, t_step, 2.0 * t_step, cal_2pi.sigma, pi),
      seg(0, Level::zero, 3.0 * t_step, t_step, cal_pi.sigma, pi),
  };
  sch.validate();
  return sch;
}

// ---------------------------------------------------------------------------
// Ideal gate and execution

std::vector<double> ideal_cpg_phases(const CpgSpec& spec) {
  spec.validate();
  const int n = spec.n_qubits;
  const std::size_t count = std::size_t{1} << n;
  std::vector<double> out(count, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const bool control = (k >> (n - 1)) & 1U;
    if (!control) continue;
    double theta = 0.0;
    for (int j = 1; j < n; ++j) {
      if ((k >> (n - 1 - j)) & 1U) theta += spec.thetas[j - 1];
    }
    out[k] = theta;
  }
  return out;
}

Matrix ideal_cpg(const CpgSpec& spec) {
  const auto phases = ideal_cpg_phases(spec);
  Matrix u = Matrix::Zero(phases.size(), phases.size());
  for (std::size_t k = 0; k < phases.size(); ++k) u(k, k) = std::polar(1.0, phases[k]);
  return u;
}

StateVector embed_computational(int n_atoms, const Vector& amplitudes) {
  const auto idx = computational_indices(n_atoms);
  if (amplitudes.size() != static_cast<Eigen::Index>(idx.size())) {
    fail(ErrorKind::invalid_parameter, "expected 2^n computational amplitudes");
  }
  Vector full = Vector::Zero(hilbert_dim(n_atoms));
  for (std::size_t k = 0; k < idx.size(); ++k) full(idx[k]) = amplitudes(k);
  return StateVector(n_atoms, std::move(full));
}

GateRun run_gate(const PulseSchedule& schedule, const StateVector& initial,
                 const std::optional<NoiseSpec>& noise,
                 const IntegratorConfig& config) {
  if (initial.n_atoms() != schedule.n_atoms) {
    fail(ErrorKind::invalid_parameter, "initial state atom count differs from schedule");
  }
  if (initial.rydberg_population() > 1e-12) {
    fail(ErrorKind::contract_violation,
         "initial state must lie in the computational subspace");
  }
  const auto idx = computational_indices(schedule.n_atoms);
  const auto phases = ideal_cpg_phases(schedule.target());
  Vector ideal = Vector::Zero(initial.amplitudes().size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    ideal(idx[k]) = initial.amplitudes()(idx[k]) * std::polar(1.0, phases[k]);
  }

  const TimeDependentHamiltonian h = schedule.hamiltonian();
  const double t1 = schedule.duration();
  GateRun run{initial, StateVector(schedule.n_atoms, ideal), 0.0, 0.0, {}};
  if (noise && noise->active()) {
    LindbladResult r = evolve_lindblad(DensityMatrix::from_pure(initial), h,
                                       *noise, 0.0, t1, config);
    run.fidelity = fidelity_mixed(run.ideal, r.state);
    run.leakage = r.state.rydberg_population();
    run.final_state = std::move(r.state);
    run.trajectory = std::move(r.trajectory);
  } else {
    SchrodingerResult r = evolve_schrodinger(initial, h, 0.0, t1, config);
    run.fidelity = fidelity_pure(run.ideal, r.state);
    run.leakage = r.state.rydberg_population();
    run.final_state = std::move(r.state);
    run.trajectory = std::move(r.trajectory);
  }
  return run;
}

double GateMatrix::max_leakage() const {
  double m = 0.0;
  for (double l : leakage) m = std::max(m, l);
  return m;
}

std::vector<double> GateMatrix::diagonal_phases() const {
  std::vector<double> out;
  for (Eigen::Index k = 0; k < matrix.rows(); ++k) out.push_back(std::arg(matrix(k, k)));
  return out;
}

std::vector<double> GateMatrix::basis_fidelities(const CpgSpec& spec) const {
  const Matrix u = ideal_cpg(spec);
  if (u.rows() != matrix.rows()) {
    fail(ErrorKind::invalid_parameter, "gate matrix and spec differ in size");
  }
  std::vector<double> out;
  for (Eigen::Index k = 0; k < matrix.rows(); ++k) {
    out.push_back(std::norm(std::conj(u(k, k)) * matrix(k, k)));
  }
  return out;
}

GateMatrix extract_gate_matrix(const PulseSchedule& schedule,
                               const IntegratorConfig& config) {
  const auto idx = computational_indices(schedule.n_atoms);
  const Eigen::Index dim = hilbert_dim(schedule.n_atoms);
  const auto m = static_cast<Eigen::Index>(idx.size());
  Matrix columns = Matrix::Zero(dim, m);
  for (Eigen::Index k = 0; k < m; ++k) columns(idx[k], k) = 1.0;
  IntegratorConfig cfg = config;
  cfg.record_trajectory = false;
  const Matrix out = propagate_columns(columns, schedule.hamiltonian(), 0.0,
                                       schedule.duration(), cfg);
  GateMatrix g;
  g.matrix.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) g.matrix.row(i) = out.row(idx[i]);
  for (Eigen::Index k = 0; k < m; ++k) {
    g.leakage.push_back(out.col(k).squaredNorm() - g.matrix.col(k).squaredNorm());
  }
  return g;
}

}  // namespace rydsim
