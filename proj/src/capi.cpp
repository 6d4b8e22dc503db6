#include "rydsim/rydsim.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>

#include <json.hpp>

#include "rydsim/errors.hpp"
#include "rydsim/gate_protocols.hpp"
#include "rydsim/schedule_io.hpp"
#include "rydsim/sweeps.hpp"
#include "rydsim/units.hpp"

struct rydsim_schedule {
  rydsim::PulseSchedule value;
};

struct rydsim_gate_result {
  rydsim::PulseSchedule schedule;
  rydsim::GateRun run;
  rydsim::GateMatrix matrix;
};

struct rydsim_table {
  std::string csv;
  std::vector<double> values;
  std::vector<double> runtimes;
  std::vector<std::string> warnings;
  int failures = 0;
};

namespace {

using namespace rydsim;

thread_local std::string g_last_error;

rydsim_status status_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_parameter: return RYDSIM_ERR_INVALID_ARGUMENT;
    case ErrorKind::domain: return RYDSIM_ERR_DOMAIN;
    case ErrorKind::infeasible: return RYDSIM_ERR_INFEASIBLE;
    case ErrorKind::degenerate_point: return RYDSIM_ERR_DEGENERATE;
    case ErrorKind::numeric: return RYDSIM_ERR_NUMERIC;
    case ErrorKind::integration_failure: return RYDSIM_ERR_INTEGRATION;
    case ErrorKind::contract_violation: return RYDSIM_ERR_CONTRACT;
    case ErrorKind::parse: return RYDSIM_ERR_PARSE;
  }
  return RYDSIM_ERR_INTERNAL;
}

template <class F>
rydsim_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return RYDSIM_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RYDSIM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown exception";
    return RYDSIM_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) fail(ErrorKind::invalid_parameter, std::string(what) + " must not be NULL");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Scheme scheme_of(int code) {
  switch (code) {
    case RYDSIM_SCHEME_STA: return Scheme::sta;
    case RYDSIM_SCHEME_ADIABATIC: return Scheme::adiabatic;
    case RYDSIM_SCHEME_NONADIABATIC: return Scheme::nonadiabatic;
    default: fail(ErrorKind::invalid_parameter, "unknown scheme code");
  }
}

SweepAxis axis_of(int code) {
  switch (code) {
    case RYDSIM_AXIS_OMEGA_REL: return SweepAxis::omega_rel;
    case RYDSIM_AXIS_DELTA_REL: return SweepAxis::delta_rel;
    case RYDSIM_AXIS_DELTA_ABS: return SweepAxis::delta_abs;
    default: fail(ErrorKind::invalid_parameter, "unknown sweep axis code");
  }
}

SchemeParams to_core(const rydsim_scheme_params& p) {
  SchemeParams s;
  s.scheme = scheme_of(p.scheme);
  s.n_qubits = p.n_qubits;
  if (p.n_thetas < 0 || p.n_thetas > RYDSIM_MAX_TARGETS) {
    fail(ErrorKind::invalid_parameter, "n_thetas out of range");
  }
  s.thetas.assign(p.thetas, p.thetas + p.n_thetas);
  s.t_f = p.t_f;
  s.omega0 = p.omega0;
  s.delta0 = p.delta0;
  s.tau = p.tau;
  s.omega_n = p.omega_n;
  s.t_step = p.t_step;
  s.interactions = {p.V, p.V1};
  return s;
}

IntegratorConfig to_core(const rydsim_integrator* in) {
  IntegratorConfig c;
  if (!in) return c;
  c.method = in->adaptive ? IntegratorMethod::adaptive : IntegratorMethod::rk4;
  c.steps_per_segment = in->steps_per_segment;
  c.max_step_phase = in->max_step_phase;
  c.tolerance = in->tolerance;
  c.record_trajectory = in->sample_count > 0;
  c.sample_count = in->sample_count;
  return c;
}

std::optional<NoiseSpec> noise_of(int noisy, const rydsim_noise& n) {
  if (!noisy) return std::nullopt;
  return NoiseSpec{n.gamma_r0, n.gamma_r1};
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

nlohmann::json gate_json(const rydsim_gate_result& r) {
  using nlohmann::json;
  const PulseSchedule& s = r.schedule;
  const CpgSpec spec = s.target();
  json j;
  j["scheme"] = to_string(s.scheme);
  j["n_qubits"] = s.n_atoms;
  j["thetas_rad"] = s.thetas;
  j["V_rad_per_us"] = s.interactions.V;
  j["V1_rad_per_us"] = s.interactions.V1;
  j["duration_us"] = s.duration();
  j["fidelity"] = r.run.fidelity;
  j["leakage"] = r.run.leakage;
  j["phases_rad"] = r.matrix.diagonal_phases();
  j["ideal_phases_rad"] = ideal_cpg_phases(spec);
  const auto basis = r.matrix.basis_fidelities(spec);
  j["basis_fidelities"] = basis;
  j["worst_basis_fidelity"] = *std::min_element(basis.begin(), basis.end());
  j["max_column_leakage"] = r.matrix.max_leakage();
  double max_omega = 0.0;
  double max_delta = 0.0;
  for (const auto& seg : s.segments) {
    for (int k = 0; k <= 2000; ++k) {
      const PulseSample p = seg.sample(seg.t_start + seg.duration() * k / 2000.0);
      max_omega = std::max(max_omega, std::abs(p.omega));
      max_delta = std::max(max_delta, std::abs(p.delta));
    }
  }
  j["max_omega_rad_per_us"] = max_omega;
  j["max_abs_delta_rad_per_us"] = max_delta;
  if (s.scheme == Scheme::nonadiabatic) {
    json cal = json::array();
    for (const auto& seg : s.segments) {
      const auto& g = std::get<GaussianPulseParams>(seg.shape);
      const double area = gaussian_area(g.omega_n, g.sigma, g.window());
      const SigmaCalibration c = calibrate_sigma(g.omega_n, g.window(),
                                                 area > 1.5 * pi ? two_pi : pi);
      json e{{"atom", seg.atom}, {"sigma_us2", g.sigma}, {"area_rad", area}};
      e["quoted_sigma_us2"] = c.quoted_sigma ? json(*c.quoted_sigma) : json(nullptr);
      cal.push_back(e);
    }
    j["sigma_calibration"] = cal;
  }
  return j;
}

}  // namespace

extern "C" {

const char* rydsim_version(void) { return "0.1.0"; }

const char* rydsim_last_error(void) { return g_last_error.c_str(); }

const char* rydsim_status_name(rydsim_status status) {
  switch (status) {
    case RYDSIM_OK: return "ok";
    case RYDSIM_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RYDSIM_ERR_DOMAIN: return "domain error";
    case RYDSIM_ERR_INFEASIBLE: return "infeasible";
    case RYDSIM_ERR_DEGENERATE: return "degenerate point";
    case RYDSIM_ERR_NUMERIC: return "numeric error";
    case RYDSIM_ERR_INTEGRATION: return "integration failure";
    case RYDSIM_ERR_CONTRACT: return "contract violation";
    case RYDSIM_ERR_PARSE: return "parse error";
    case RYDSIM_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void rydsim_string_free(char* text) { std::free(text); }

rydsim_status rydsim_parse_frequency(const char* text, double* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    std::string s(text);
    const std::string suffix = "x2piMHz";
    double scale = 1.0;
    if (s.size() > suffix.size() &&
        s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
      s.resize(s.size() - suffix.size());
      scale = two_pi;
    }
    double v = 0.0;
    if (!parse_number(s, v)) fail(ErrorKind::parse, std::string("bad frequency '") + text + "'");
    *out = v * scale;
  });
}

rydsim_status rydsim_parse_angle(const char* text, double* out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    const std::string s(text);
    const auto at = s.find("pi");
    double v = 0.0;
    if (at == std::string::npos) {
      if (!parse_number(s, v)) fail(ErrorKind::parse, "bad angle '" + s + "'");
      *out = v;
      return;
    }
    std::string head = s.substr(0, at);
    std::string tail = s.substr(at + 2);
    double factor = 1.0;
    if (head == "-") {
      factor = -1.0;
    } else if (!head.empty() && head != "+") {
      if (head.back() == '*') head.pop_back();
      if (!parse_number(head, factor)) fail(ErrorKind::parse, "bad angle '" + s + "'");
    }
    double divisor = 1.0;
    if (!tail.empty()) {
      if (tail.front() != '/' || !parse_number(tail.substr(1), divisor) || divisor == 0.0) {
        fail(ErrorKind::parse, "bad angle '" + s + "'");
      }
    }
    *out = factor * pi / divisor;
  });
}

void rydsim_scheme_params_default(rydsim_scheme_params* p) {
  if (!p) return;
  const SchemeParams d;
  *p = rydsim_scheme_params{};
  p->scheme = RYDSIM_SCHEME_STA;
  p->n_qubits = d.n_qubits;
  p->n_thetas = 0;
  p->t_f = d.t_f;
  p->omega0 = d.omega0;
  p->delta0 = d.delta0;
  p->tau = d.tau;
  p->omega_n = d.omega_n;
  p->t_step = d.t_step;
  p->V = d.interactions.V;
  p->V1 = d.interactions.V1;
}

void rydsim_integrator_default(rydsim_integrator* in) {
  if (!in) return;
  const IntegratorConfig d;
  in->adaptive = 0;
  in->steps_per_segment = d.steps_per_segment;
  in->max_step_phase = d.max_step_phase;
  in->tolerance = d.tolerance;
  in->sample_count = 0;
}

rydsim_status rydsim_scheme_from_name(const char* name, int* scheme) {
  return guarded([&] {
    require(name, "name");
    require(scheme, "scheme");
    *scheme = static_cast<int>(scheme_from_string(name));
  });
}

rydsim_status rydsim_axis_from_name(const char* name, int* axis) {
  return guarded([&] {
    require(name, "name");
    require(axis, "axis");
    *axis = static_cast<int>(sweep_axis_from_string(name));
  });
}

rydsim_status rydsim_tau_scan_defaults(rydsim_tau_series* series, size_t* n_series,
                                       double* step_times, size_t* n_step_times) {
  return guarded([&] {
    require(n_series, "n_series");
    require(n_step_times, "n_step_times");
    const TauScanConfig d = TauScanConfig::defaults();
    const size_t cap_series = *n_series;
    const size_t cap_times = *n_step_times;
    *n_series = d.series.size();
    *n_step_times = d.step_times.size();
    if (series) {
      for (size_t k = 0; k < std::min(cap_series, d.series.size()); ++k) {
        series[k] = {static_cast<int>(d.series[k].scheme), d.series[k].V};
      }
    }
    if (step_times) {
      for (size_t k = 0; k < std::min(cap_times, d.step_times.size()); ++k) {
        step_times[k] = d.step_times[k];
      }
    }
  });
}

rydsim_status rydsim_schedule_build(const rydsim_scheme_params* params,
                                    rydsim_schedule** out) {
  return guarded([&] {
    require(params, "params");
    require(out, "out");
    *out = new rydsim_schedule{build_schedule(to_core(*params))};
  });
}

rydsim_status rydsim_schedule_from_json(const char* json, rydsim_schedule** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new rydsim_schedule{schedule_from_json(json)};
  });
}

rydsim_status rydsim_schedule_to_json(const rydsim_schedule* schedule, char** out) {
  return guarded([&] {
    require(schedule, "schedule");
    require(out, "out");
    *out = dup_string(schedule_to_json(schedule->value));
  });
}

rydsim_status rydsim_schedule_perturb(const rydsim_schedule* schedule, double omega_rel,
                                      double delta_rel, double delta_abs,
                                      rydsim_schedule** out) {
  return guarded([&] {
    require(schedule, "schedule");
    require(out, "out");
    *out = new rydsim_schedule{schedule->value.perturbed(omega_rel, delta_rel, delta_abs)};
  });
}

double rydsim_schedule_duration(const rydsim_schedule* schedule) {
  return schedule ? schedule->value.duration() : std::nan("");
}

int rydsim_schedule_segment_count(const rydsim_schedule* schedule) {
  return schedule ? static_cast<int>(schedule->value.segments.size()) : 0;
}

rydsim_status rydsim_schedule_pulse_csv(const rydsim_schedule* schedule, int segment,
                                        int points, char** out) {
  return guarded([&] {
    require(schedule, "schedule");
    require(out, "out");
    *out = dup_string(pulse_table_csv(schedule->value, segment, points));
  });
}

rydsim_status rydsim_schedule_hamiltonian_csv(const rydsim_schedule* schedule, double t,
                                              char** out) {
  return guarded([&] {
    require(schedule, "schedule");
    require(out, "out");
    *out = dup_string(schedule->value.hamiltonian_at(t).to_csv());
  });
}

void rydsim_schedule_free(rydsim_schedule* schedule) { delete schedule; }

rydsim_status rydsim_gate_run(const rydsim_schedule* schedule, const rydsim_noise* noise,
                              const rydsim_integrator* integrator,
                              rydsim_gate_result** out) {
  return guarded([&] {
    require(schedule, "schedule");
    require(out, "out");
    const IntegratorConfig cfg = to_core(integrator);
    std::optional<NoiseSpec> n;
    if (noise) n = NoiseSpec{noise->gamma_r0, noise->gamma_r1};
    const PulseSchedule& s = schedule->value;
    GateRun run = rydsim::run_gate(s, StateVector::uniform_computational(s.n_atoms), n, cfg);
    GateMatrix m = extract_gate_matrix(s, cfg);
    *out = new rydsim_gate_result{s, std::move(run), std::move(m)};
  });
}

double rydsim_gate_result_fidelity(const rydsim_gate_result* r) {
  return r ? r->run.fidelity : std::nan("");
}

double rydsim_gate_result_leakage(const rydsim_gate_result* r) {
  return r ? r->run.leakage : std::nan("");
}

rydsim_status rydsim_gate_result_json(const rydsim_gate_result* r, char** out) {
  return guarded([&] {
    require(r, "result");
    require(out, "out");
    *out = dup_string(gate_json(*r).dump(2));
  });
}

rydsim_status rydsim_gate_result_trajectory_csv(const rydsim_gate_result* r,
                                                int populations, char** out) {
  return guarded([&] {
    require(r, "result");
    require(out, "out");
    if (r->run.trajectory.times.empty()) {
      fail(ErrorKind::invalid_parameter, "no trajectory recorded (sample_count was 0)");
    }
    *out = dup_string(trajectory_csv(r->run.trajectory,
                                     populations ? TrajectoryColumns::populations
                                                 : TrajectoryColumns::amplitudes));
  });
}

void rydsim_gate_result_free(rydsim_gate_result* r) { delete r; }

rydsim_status rydsim_sweep_run(const rydsim_sweep_config* config, rydsim_table** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    SweepConfig c;
    c.physics = to_core(config->physics);
    c.axis = axis_of(config->axis);
    c.min = config->min;
    c.max = config->max;
    c.count = config->count;
    c.noise = noise_of(config->noisy, config->noise);
    c.integrator = to_core(&config->integrator);
    c.integrator.record_trajectory = false;
    c.threads = config->threads;
    const SweepResult r = run_sweep(c);
    *out = new rydsim_table{sweep_csv(r), r.fidelities, r.runtimes_s, r.warnings,
                            r.failures()};
  });
}

rydsim_status rydsim_tau_scan_run(const rydsim_tau_scan_config* config,
                                  rydsim_table** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    TauScanConfig c;
    c.physics = to_core(config->physics);
    if (config->n_series) require(config->series, "series");
    if (config->n_step_times) require(config->step_times, "step_times");
    for (size_t k = 0; k < config->n_series; ++k) {
      c.series.push_back({scheme_of(config->series[k].scheme), config->series[k].V});
    }
    c.step_times.assign(config->step_times, config->step_times + config->n_step_times);
    c.noise = noise_of(config->noisy, config->noise);
    c.integrator = to_core(&config->integrator);
    c.integrator.record_trajectory = false;
    c.threads = config->threads;
    const TauScanResult r = run_tau_scan(c);
    auto* t = new rydsim_table{tau_scan_csv(r), {}, {}, r.warnings, r.failures()};
    for (const auto& row : r.rows) {
      t->values.push_back(row.fidelity);
      t->runtimes.push_back(row.runtime_s);
    }
    *out = t;
  });
}

rydsim_status rydsim_table_csv(const rydsim_table* table, char** out) {
  return guarded([&] {
    require(table, "table");
    require(out, "out");
    *out = dup_string(table->csv);
  });
}

size_t rydsim_table_rows(const rydsim_table* t) { return t ? t->values.size() : 0; }

double rydsim_table_value(const rydsim_table* t, size_t row) {
  return t && row < t->values.size() ? t->values[row] : std::nan("");
}

double rydsim_table_runtime(const rydsim_table* t, size_t row) {
  return t && row < t->runtimes.size() ? t->runtimes[row] : std::nan("");
}

int rydsim_table_failures(const rydsim_table* t) { return t ? t->failures : 0; }

size_t rydsim_table_warning_count(const rydsim_table* t) {
  return t ? t->warnings.size() : 0;
}

const char* rydsim_table_warning(const rydsim_table* t, size_t index) {
  return t && index < t->warnings.size() ? t->warnings[index].c_str() : nullptr;
}

void rydsim_table_free(rydsim_table* t) { delete t; }

}  // extern "C"
