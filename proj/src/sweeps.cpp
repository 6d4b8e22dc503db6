#include "rydsim/sweeps.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "rydsim/errors.hpp"
#include "rydsim/schedule_io.hpp"

namespace rydsim {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Runs job(k) for k in [0, n) on a small pool; each job writes its own slot.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < n; k = next++) job(k);
  };
  const int count = resolve_threads(threads, n);
  std::vector<std::thread> pool;
  for (int i = 1; i < count; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int resolve_threads(int requested, std::size_t jobs) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("RYDSIM_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  n = std::min<long long>(n, std::max<std::size_t>(jobs, 1));
  return std::max(n, 1);
}

double sta_peak_rabi(double t_f) {
  return lr_pulse(0.5 * t_f, LrPulseParams::standard(t_f, 0.0, pi / 2.0)).omega;
}

PulseSchedule build_schedule(const SchemeParams& p) {
  switch (p.scheme) {
    case Scheme::sta: {
      CpgSpec spec = CpgSpec::pi_gate(p.n_qubits);
      if (!p.thetas.empty()) spec.thetas = p.thetas;
      return sta_sequence(spec, p.t_f, p.interactions);
    }
    case Scheme::adiabatic:
      if (p.n_qubits != 2) fail(ErrorKind::invalid_parameter, "adiabatic scheme is two-qubit only");
      return adiabatic_sequence(p.omega0, p.delta0, p.tau, p.interactions);
    case Scheme::nonadiabatic: {
      if (p.n_qubits != 2) {
        fail(ErrorKind::invalid_parameter, "non-adiabatic scheme is two-qubit only");
      }
      const double omega_n = p.omega_n > 0.0 ? p.omega_n : sta_peak_rabi(p.t_f);
      return nonadiabatic_sequence(omega_n, p.interactions, p.t_step);
    }
  }
  fail(ErrorKind::invalid_parameter, "unknown scheme");
}

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::omega_rel: return "omega_rel";
    case SweepAxis::delta_rel: return "delta_rel";
    case SweepAxis::delta_abs: return "delta_abs";
  }
  return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
  if (name == "omega_rel") return SweepAxis::omega_rel;
  if (name == "delta_rel") return SweepAxis::delta_rel;
  if (name == "delta_abs") return SweepAxis::delta_abs;
  fail(ErrorKind::parse, "unknown sweep axis '" + name + "'");
}

void SweepConfig::validate() const {
  if (!std::isfinite(min) || !std::isfinite(max)) {
    fail(ErrorKind::invalid_parameter, "grid bounds must be finite");
  }
  if (count == 1) {
    if (min != max) fail(ErrorKind::invalid_parameter, "a single-point grid needs min == max");
  } else if (count < 2 || !(min < max)) {
    fail(ErrorKind::invalid_parameter, "grid needs count >= 2 and min < max");
  }
  if (axis == SweepAxis::delta_abs && physics.scheme != Scheme::nonadiabatic) {
    fail(ErrorKind::invalid_parameter,
         "delta_abs applies only to the resonant (nonadiabatic) scheme");
  }
}

std::vector<double> SweepConfig::grid() const {
  validate();
  std::vector<double> g;
  for (int k = 0; k < count; ++k) {
    g.push_back(k == count - 1 ? max : min + (max - min) * k / (count - 1));
  }
  return g;
}

int SweepResult::failures() const {
  return static_cast<int>(std::count_if(fidelities.begin(), fidelities.end(),
                                        [](double f) { return std::isnan(f); }));
}

double gate_fidelity(const PulseSchedule& schedule,
                     const std::optional<NoiseSpec>& noise,
                     const IntegratorConfig& integrator) {
  IntegratorConfig cfg = integrator;
  cfg.record_trajectory = false;
  return run_gate(schedule, StateVector::uniform_computational(schedule.n_atoms),
                  noise, cfg)
      .fidelity;
}

SweepResult run_sweep(const SweepConfig& config) {
  const std::vector<double> grid = config.grid();
  const PulseSchedule base = build_schedule(config.physics);
  SweepResult out;
  out.scheme = config.physics.scheme;
  out.axis = config.axis;
  out.deviations = grid;
  out.fidelities.assign(grid.size(), kNaN);
  out.runtimes_s.assign(grid.size(), 0.0);
  std::vector<std::string> errors(grid.size());

  parallel_for(grid.size(), config.threads, [&](std::size_t k) {
    const auto start = std::chrono::steady_clock::now();
    const double d = grid[k];
    try {
      const PulseSchedule s =
          base.perturbed(config.axis == SweepAxis::omega_rel ? d : 0.0,
                         config.axis == SweepAxis::delta_rel ? d : 0.0,
                         config.axis == SweepAxis::delta_abs ? d : 0.0);
      out.fidelities[k] = gate_fidelity(s, config.noise, config.integrator);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
    out.runtimes_s[k] = seconds_since(start);
  });
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (errors[k].empty()) continue;
    std::ostringstream os;
    os << "point " << k << " (" << to_string(config.axis) << "=" << format_double(grid[k])
       << ") failed: " << errors[k];
    out.warnings.push_back(os.str());
  }
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::ostringstream os;
  os << "scheme,axis,deviation,fidelity\n";
  for (std::size_t k = 0; k < r.deviations.size(); ++k) {
    os << to_string(r.scheme) << ',' << to_string(r.axis) << ','
       << format_double(r.deviations[k]) << ',' << format_double(r.fidelities[k]) << '\n';
  }
  return os.str();
}

TauScanConfig TauScanConfig::defaults() {
  TauScanConfig c;
  c.series = {{Scheme::adiabatic, from_2pi_mhz(40.0)},
              {Scheme::adiabatic, from_2pi_mhz(200.0)},
              {Scheme::sta, from_2pi_mhz(40.0)}};
  for (int k = 0; k <= 8; ++k) c.step_times.push_back(1.0 + 0.5 * k);
  return c;
}

void TauScanConfig::validate() const {
  if (series.empty()) fail(ErrorKind::invalid_parameter, "tau scan needs at least one series");
  if (step_times.empty()) fail(ErrorKind::invalid_parameter, "tau scan needs step times");
  for (double t : step_times) {
    if (!(t > 0.0)) fail(ErrorKind::invalid_parameter, "step times must be > 0");
  }
  for (const auto& s : series) {
    if (!(s.V >= 0.0)) fail(ErrorKind::invalid_parameter, "V must be >= 0");
  }
}

int TauScanResult::failures() const {
  return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const TauScanRow& r) {
    return std::isnan(r.fidelity);
  }));
}

TauScanResult run_tau_scan(const TauScanConfig& config) {
  config.validate();
  TauScanResult out;
  for (const auto& s : config.series) {
    for (double t : config.step_times) out.rows.push_back({s.scheme, s.V, t, kNaN, 0.0});
  }
  std::vector<std::string> errors(out.rows.size());
  parallel_for(out.rows.size(), config.threads, [&](std::size_t k) {
    const auto start = std::chrono::steady_clock::now();
    TauScanRow& row = out.rows[k];
    try {
      SchemeParams p = config.physics;
      p.scheme = row.scheme;
      p.interactions.V = row.V;
      switch (row.scheme) {
        case Scheme::sta: p.t_f = row.step_time; break;
        case Scheme::adiabatic: p.tau = row.step_time; break;
        case Scheme::nonadiabatic: p.t_step = row.step_time; break;
      }
      row.fidelity = gate_fidelity(build_schedule(p), config.noise, config.integrator);
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
    row.runtime_s = seconds_since(start);
  });
  for (std::size_t k = 0; k < errors.size(); ++k) {
    if (errors[k].empty()) continue;
    std::ostringstream os;
    os << "point " << k << " (" << to_string(out.rows[k].scheme)
       << ", step time " << format_double(out.rows[k].step_time) << " us) failed: "
       << errors[k];
    out.warnings.push_back(os.str());
  }
  return out;
}

std::string tau_scan_csv(const TauScanResult& r) {
  std::ostringstream os;
  os << "scheme,V_rad_per_us,step_time_us,fidelity\n";
  for (const auto& row : r.rows) {
    os << to_string(row.scheme) << ',' << format_double(row.V) << ','
       << format_double(row.step_time) << ',' << format_double(row.fidelity) << '\n';
  }
  return os.str();
}

}  // namespace rydsim
