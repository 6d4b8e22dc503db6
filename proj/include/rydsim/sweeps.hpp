#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rydsim/dynamics.hpp"
#include "rydsim/gate_protocols.hpp"
#include "rydsim/units.hpp"

namespace rydsim {

/// Physics knobs shared by every scheme; each builder reads the ones it uses.
struct SchemeParams {
  Scheme scheme = Scheme::sta;
  int n_qubits = 2;
  std::vector<double> thetas;  // empty: pi on every target (STA only)
  double t_f = 1.0;
  double omega0 = pi;
  double delta0 = pi;
  double tau = 4.0;
  /// Gaussian peak; 0 selects the STA peak Rabi frequency at `t_f`.
  double omega_n = 0.0;
  double t_step = 1.0;
  InteractionSpec interactions{from_2pi_mhz(40.0), 0.0};
};

/// Peak Rabi frequency of the standard step-(i) LR pulse of length t_f.
double sta_peak_rabi(double t_f);

PulseSchedule build_schedule(const SchemeParams& params);

enum class SweepAxis { omega_rel, delta_rel, delta_abs };

const char* to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepConfig {
  SchemeParams physics;
  SweepAxis axis = SweepAxis::omega_rel;
  double min = -0.1;
  double max = 0.1;
  int count = 21;
  std::optional<NoiseSpec> noise;
  IntegratorConfig integrator;
  int threads = 0;  // 0: hardware concurrency, capped by RYDSIM_THREADS

  /// count >= 2 with min < max, or the single point count = 1, min = max.
  void validate() const;
  std::vector<double> grid() const;
};

struct SweepResult {
  Scheme scheme = Scheme::sta;
  SweepAxis axis = SweepAxis::omega_rel;
  std::vector<double> deviations;
  std::vector<double> fidelities;  // NaN where the point failed
  std::vector<double> runtimes_s;
  std::vector<std::string> warnings;

  int failures() const;
};

/// Gate fidelity on the uniform computational superposition.
double gate_fidelity(const PulseSchedule& schedule,
                     const std::optional<NoiseSpec>& noise,
                     const IntegratorConfig& integrator);

SweepResult run_sweep(const SweepConfig& config);

/// `scheme,axis,deviation,fidelity`.
std::string sweep_csv(const SweepResult& result);

struct TauSeries {
  Scheme scheme = Scheme::adiabatic;
  double V = 0.0;
};

struct TauScanConfig {
  SchemeParams physics;          // step time and V are overridden per point
  std::vector<TauSeries> series;
  std::vector<double> step_times;
  std::optional<NoiseSpec> noise;
  IntegratorConfig integrator;
  int threads = 0;

  /// Adiabatic at V = 2pi x 40 and 2pi x 200 MHz, STA at 2pi x 40 MHz, over
  /// step times 1..5 us.
  static TauScanConfig defaults();
  void validate() const;
};

struct TauScanRow {
  Scheme scheme = Scheme::sta;
  double V = 0.0;
  double step_time = 0.0;
  double fidelity = 0.0;
  double runtime_s = 0.0;
};

struct TauScanResult {
  std::vector<TauScanRow> rows;
  std::vector<std::string> warnings;

  int failures() const;
};

TauScanResult run_tau_scan(const TauScanConfig& config);

/// `scheme,V_rad_per_us,step_time_us,fidelity`.
std::string tau_scan_csv(const TauScanResult& result);

/// Worker count: `requested` (or hardware concurrency when 0), capped by the
/// RYDSIM_THREADS environment variable and by `jobs`.
int resolve_threads(int requested, std::size_t jobs);

}  // namespace rydsim
