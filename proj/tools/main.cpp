// rydsim-cli: pulse synthesis, single gates, robustness sweeps and step-time
// scans. Talks to the simulator only through the C interface.
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rydsim/rydsim.h"

namespace {

using nlohmann::json;

enum Exit { kOk = 0, kUsage = 1, kNumeric = 2, kPartial = 3 };

// Thrown for any C API failure; carries the status for the exit code.
struct ApiError : std::runtime_error {
  rydsim_status status;
  ApiError(rydsim_status s, const std::string& what) : std::runtime_error(what), status(s) {}
};

void check(rydsim_status s, const std::string& context) {
  if (s == RYDSIM_OK) return;
  throw ApiError(s, context + ": " + rydsim_status_name(s) + ": " + rydsim_last_error());
}

int exit_code_for(rydsim_status s) {
  switch (s) {
    case RYDSIM_ERR_INVALID_ARGUMENT:
    case RYDSIM_ERR_PARSE:
    case RYDSIM_ERR_DOMAIN:
      return kUsage;
    default:
      return kNumeric;
  }
}

struct CString {
  char* p = nullptr;
  ~CString() { rydsim_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
};
using Schedule = Handle<rydsim_schedule, rydsim_schedule_free>;
using GateResult = Handle<rydsim_gate_result, rydsim_gate_result_free>;
using Table = Handle<rydsim_table, rydsim_table_free>;

std::string iso_timestamp() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Every option is kept as text so that flag values and config-file values go
// through the same parsers (and so "40x2piMHz" works in both).
class Options {
 public:
  explicit Options(CLI::App* app) : app_(app) {
    app_->add_option("--config", config_path_, "JSON file with option values; flags win");
  }

  void add(const std::string& name, const std::string& fallback, const std::string& help) {
    values_[name] = fallback;
    options_[name] = app_->add_option("--" + name, values_[name], help);
  }

  void add_flag(const std::string& name, const std::string& help) {
    values_[name] = "false";
    options_[name] = app_->add_flag("--" + name, flags_[name], help);
  }

  // Applies the config file to options not given on the command line.
  void resolve() {
    for (auto& [name, flag] : flags_) {
      if (flag) values_[name] = "true";
    }
    if (config_path_.empty()) return;
    std::ifstream in(config_path_);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + config_path_);
    json cfg;
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ValidationError("--config", e.what());
    }
    if (!cfg.is_object()) throw CLI::ValidationError("--config", "expected a JSON object");
    for (const auto& [key, value] : cfg.items()) {
      const auto it = options_.find(key);
      if (it == options_.end()) {
        throw CLI::ValidationError("--config", "unknown key '" + key + "'");
      }
      if (it->second->count() > 0) continue;
      if (value.is_string()) {
        values_[key] = value.get<std::string>();
      } else if (value.is_boolean()) {
        values_[key] = value.get<bool>() ? "true" : "false";
      } else if (value.is_array()) {
        std::string joined;
        for (const auto& v : value) {
          if (!joined.empty()) joined += ',';
          joined += v.is_string() ? v.get<std::string>() : v.dump();
        }
        values_[key] = joined;
      } else {
        values_[key] = value.dump();
      }
    }
  }

  const std::string& text(const std::string& name) const { return values_.at(name); }
  bool has(const std::string& name) const { return !values_.at(name).empty(); }
  bool flag(const std::string& name) const { return values_.at(name) == "true"; }

  double number(const std::string& name) const {
    try {
      std::size_t used = 0;
      const double v = std::stod(text(name), &used);
      if (used == text(name).size()) return v;
    } catch (const std::exception&) {
    }
    throw CLI::ValidationError("--" + name, "expected a number, got '" + text(name) + "'");
  }
  int integer(const std::string& name) const {
    const double v = number(name);
    if (v != std::floor(v)) throw CLI::ValidationError("--" + name, "expected an integer");
    return static_cast<int>(v);
  }
  double frequency(const std::string& name) const {
    double v = 0.0;
    check(rydsim_parse_frequency(text(name).c_str(), &v), "--" + name);
    return v;
  }

  json echo() const {
    json j;
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
  }

 private:
  CLI::App* app_;
  std::string config_path_;
  std::map<std::string, std::string> values_;
  std::map<std::string, CLI::Option*> options_;
  std::map<std::string, bool> flags_;
};

void add_physics(Options& o) {
  o.add("scheme", "sta", "sta | adiabatic | nonadiabatic");
  o.add("n", "2", "number of qubits (1 control + n-1 targets)");
  o.add("theta", "", "comma-separated target phases, e.g. pi,pi/2");
  o.add("tf", "1.0", "LR step time t_f (us)");
  o.add("omega0", "3.141592653589793", "adiabatic Omega_0 (rad/us or x2piMHz)");
  o.add("delta0", "3.141592653589793", "adiabatic Delta_0 (rad/us or x2piMHz)");
  o.add("tau", "4.0", "adiabatic tau (us)");
  o.add("omega-n", "0", "Gaussian peak Omega_n (rad/us or x2piMHz); 0 = STA peak");
  o.add("t-step", "1.0", "non-adiabatic pi-pulse window (us)");
  o.add("V", "40x2piMHz", "control-target interaction (rad/us or x2piMHz)");
  o.add("V1", "0", "target-target interaction (rad/us or x2piMHz)");
}

void add_integrator(Options& o) {
  o.add("method", "rk4", "rk4 | adaptive");
  o.add("steps", "4000", "RK4 steps per segment (minimum)");
  o.add("max-step-phase", "0.02", "RK4 cap on h*||H||");
  o.add("tolerance", "1e-10", "adaptive tolerance");
}

void add_noise(Options& o) {
  o.add("gamma", "", "decay rate for every atom (1/us)");
  o.add("gamma-r0", "", "control decay |r> -> |0> (1/us)");
  o.add("gamma-r1", "", "target decay |r> -> |1> (1/us)");
}

rydsim_scheme_params physics(const Options& o) {
  rydsim_scheme_params p;
  rydsim_scheme_params_default(&p);
  check(rydsim_scheme_from_name(o.text("scheme").c_str(), &p.scheme), "--scheme");
  p.n_qubits = o.integer("n");
  if (o.has("theta")) {
    const auto items = split(o.text("theta"), ',');
    if (items.size() > RYDSIM_MAX_TARGETS) {
      throw CLI::ValidationError("--theta", "too many phases");
    }
    p.n_thetas = static_cast<int>(items.size());
    for (std::size_t k = 0; k < items.size(); ++k) {
      check(rydsim_parse_angle(items[k].c_str(), &p.thetas[k]), "--theta");
    }
  }
  p.t_f = o.number("tf");
  p.omega0 = o.frequency("omega0");
  p.delta0 = o.frequency("delta0");
  p.tau = o.number("tau");
  p.omega_n = o.frequency("omega-n");
  p.t_step = o.number("t-step");
  p.V = o.frequency("V");
  p.V1 = o.frequency("V1");
  return p;
}

rydsim_integrator integrator(const Options& o) {
  rydsim_integrator in;
  rydsim_integrator_default(&in);
  const std::string& m = o.text("method");
  if (m != "rk4" && m != "adaptive") throw CLI::ValidationError("--method", "rk4 or adaptive");
  in.adaptive = m == "adaptive";
  in.steps_per_segment = o.integer("steps");
  in.max_step_phase = o.number("max-step-phase");
  in.tolerance = o.number("tolerance");
  return in;
}

// Returns false when no rate was given.
bool noise(const Options& o, rydsim_noise& n) {
  n = {0.0, 0.0};
  bool any = false;
  if (o.has("gamma")) {
    n.gamma_r0 = n.gamma_r1 = o.number("gamma");
    any = true;
  }
  if (o.has("gamma-r0")) {
    n.gamma_r0 = o.number("gamma-r0");
    any = true;
  }
  if (o.has("gamma-r1")) {
    n.gamma_r1 = o.number("gamma-r1");
    any = true;
  }
  return any;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

// Writes `text` to `path` (or stdout) and, for files, the manifest sidecar.
void emit(const std::string& path, const std::string& text, const json& manifest) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  write_text(path, text);
  write_text(path + ".manifest.json", manifest.dump(2) + "\n");
}

json manifest(const std::string& command, const Options& o) {
  return json{{"tool", "rydsim-cli"},
              {"version", rydsim_version()},
              {"timestamp", iso_timestamp()},
              {"command", command},
              {"config", o.echo()}};
}

int cmd_synth(const Options& o) {
  const rydsim_scheme_params p = physics(o);
  Schedule s;
  check(rydsim_schedule_build(&p, &s.p), "synth");
  const int segment = o.integer("segment");
  CString csv;
  check(rydsim_schedule_pulse_csv(s.p, segment, o.integer("points"), &csv.p), "synth");
  json m = manifest("synth", o);
  emit(o.text("out"), csv.str(), m);
  if (o.has("schedule-out")) {
    CString js;
    check(rydsim_schedule_to_json(s.p, &js.p), "schedule export");
    write_text(o.text("schedule-out"), js.str() + "\n");
  }
  if (o.has("dump-hamiltonian")) {
    CString h;
    check(rydsim_schedule_hamiltonian_csv(s.p, o.number("dump-hamiltonian"), &h.p),
          "hamiltonian dump");
    std::cerr << h.str();
  }
  return kOk;
}

int cmd_gate(const Options& o) {
  Schedule s;
  if (o.has("schedule-in")) {
    std::ifstream in(o.text("schedule-in"));
    if (!in) throw CLI::ValidationError("--schedule-in", "cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    check(rydsim_schedule_from_json(buf.str().c_str(), &s.p), "schedule import");
  } else {
    const rydsim_scheme_params p = physics(o);
    check(rydsim_schedule_build(&p, &s.p), "gate");
  }
  if (o.has("schedule-out")) {
    CString js;
    check(rydsim_schedule_to_json(s.p, &js.p), "schedule export");
    write_text(o.text("schedule-out"), js.str() + "\n");
  }
  rydsim_integrator in = integrator(o);
  in.sample_count = o.has("trajectory") ? o.integer("samples") : 0;
  rydsim_noise n;
  const bool noisy = noise(o, n);

  const auto start = std::chrono::steady_clock::now();
  GateResult r;
  check(rydsim_gate_run(s.p, noisy ? &n : nullptr, &in, &r.p), "gate");
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  CString js;
  check(rydsim_gate_result_json(r.p, &js.p), "gate");
  json result = json::parse(js.str());
  json m = manifest("gate", o);
  m["runtime_s"] = elapsed;
  result["manifest"] = m;
  emit(o.text("out"), result.dump(2) + "\n", m);

  if (o.has("trajectory")) {
    CString csv;
    check(rydsim_gate_result_trajectory_csv(r.p, noisy || o.flag("populations"), &csv.p),
          "trajectory");
    json tm = manifest("gate", o);
    write_text(o.text("trajectory"), csv.str());
    write_text(o.text("trajectory") + ".manifest.json", tm.dump(2) + "\n");
  }
  return kOk;
}

int finish_table(const Options& o, const std::string& command, const Table& t) {
  CString csv;
  check(rydsim_table_csv(t.p, &csv.p), command);
  json m = manifest(command, o);
  json runtimes = json::array();
  for (std::size_t k = 0; k < rydsim_table_rows(t.p); ++k) {
    runtimes.push_back(rydsim_table_runtime(t.p, k));
  }
  m["per_point_runtime_s"] = runtimes;
  emit(o.text("out"), csv.str(), m);
  for (std::size_t k = 0; k < rydsim_table_warning_count(t.p); ++k) {
    std::cerr << "warning: " << rydsim_table_warning(t.p, k) << "\n";
  }
  return rydsim_table_failures(t.p) > 0 ? kPartial : kOk;
}

int cmd_sweep(const Options& o) {
  rydsim_sweep_config c{};
  c.physics = physics(o);
  check(rydsim_axis_from_name(o.text("axis").c_str(), &c.axis), "--axis");
  c.min = c.axis == RYDSIM_AXIS_DELTA_ABS ? o.frequency("min") : o.number("min");
  c.max = c.axis == RYDSIM_AXIS_DELTA_ABS ? o.frequency("max") : o.number("max");
  c.count = o.integer("count");
  c.noisy = noise(o, c.noise);
  c.integrator = integrator(o);
  c.threads = o.integer("threads");
  Table t;
  check(rydsim_sweep_run(&c, &t.p), "sweep");
  return finish_table(o, "sweep", t);
}

int cmd_tau_scan(const Options& o) {
  std::vector<rydsim_tau_series> series(8);
  std::vector<double> times(64);
  std::size_t ns = series.size();
  std::size_t nt = times.size();
  check(rydsim_tau_scan_defaults(series.data(), &ns, times.data(), &nt), "tau-scan");
  series.resize(ns);
  times.resize(nt);
  if (o.has("series")) {
    series.clear();
    for (const auto& item : split(o.text("series"), ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw CLI::ValidationError("--series", "expected scheme:V entries");
      }
      rydsim_tau_series s{};
      check(rydsim_scheme_from_name(item.substr(0, colon).c_str(), &s.scheme), "--series");
      check(rydsim_parse_frequency(item.substr(colon + 1).c_str(), &s.V), "--series");
      series.push_back(s);
    }
  }
  if (o.has("times")) {
    times.clear();
    for (const auto& item : split(o.text("times"), ',')) {
      try {
        times.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw CLI::ValidationError("--times", "bad step time '" + item + "'");
      }
    }
  }
  rydsim_tau_scan_config c{};
  c.physics = physics(o);
  c.series = series.data();
  c.n_series = series.size();
  c.step_times = times.data();
  c.n_step_times = times.size();
  c.noisy = noise(o, c.noise);
  c.integrator = integrator(o);
  c.threads = o.integer("threads");
  Table t;
  check(rydsim_tau_scan_run(&c, &t.p), "tau-scan");
  return finish_table(o, "tau-scan", t);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg controlled-phase gate simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", rydsim_version());

  auto* synth = app.add_subcommand("synth", "write the step-(i) pulse table as CSV");
  Options synth_o(synth);
  add_physics(synth_o);
  synth_o.add("points", "2000", "samples per step");
  synth_o.add("segment", "0", "segment index to tabulate");
  synth_o.add("out", "", "output CSV (default stdout)");
  synth_o.add("schedule-out", "", "also export the full schedule as JSON");
  synth_o.add("dump-hamiltonian", "", "print H(t) at this time as CSV to stderr");

  auto* gate = app.add_subcommand("gate", "run one gate and print a JSON result");
  Options gate_o(gate);
  add_physics(gate_o);
  add_integrator(gate_o);
  add_noise(gate_o);
  gate_o.add("schedule-in", "", "run a schedule JSON instead of building one");
  gate_o.add("schedule-out", "", "export the schedule as JSON");
  gate_o.add("trajectory", "", "write a trajectory CSV here");
  gate_o.add("samples", "201", "trajectory samples");
  gate_o.add_flag("populations", "trajectory with populations only");
  gate_o.add("out", "", "output JSON (default stdout)");

  auto* sweep = app.add_subcommand("sweep", "fidelity versus a control deviation");
  Options sweep_o(sweep);
  add_physics(sweep_o);
  add_integrator(sweep_o);
  add_noise(sweep_o);
  sweep_o.add("axis", "omega_rel", "omega_rel | delta_rel | delta_abs");
  sweep_o.add("min", "-0.1", "grid start (delta_abs: rad/us or x2piMHz)");
  sweep_o.add("max", "0.1", "grid end");
  sweep_o.add("count", "21", "grid points");
  sweep_o.add("threads", "0", "worker threads (0 = auto, capped by RYDSIM_THREADS)");
  sweep_o.add("out", "", "output CSV (default stdout)");

  auto* tau = app.add_subcommand("tau-scan", "fidelity versus single-step time");
  Options tau_o(tau);
  add_physics(tau_o);
  add_integrator(tau_o);
  add_noise(tau_o);
  tau_o.add("series", "", "scheme:V list, e.g. adiabatic:40x2piMHz,sta:40x2piMHz");
  tau_o.add("times", "", "comma-separated step times (us)");
  tau_o.add("threads", "0", "worker threads (0 = auto, capped by RYDSIM_THREADS)");
  tau_o.add("out", "", "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (synth->parsed()) {
      synth_o.resolve();
      return cmd_synth(synth_o);
    }
    if (gate->parsed()) {
      gate_o.resolve();
      return cmd_gate(gate_o);
    }
    if (sweep->parsed()) {
      sweep_o.resolve();
      return cmd_sweep(sweep_o);
    }
    tau_o.resolve();
    return cmd_tau_scan(tau_o);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ApiError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.status);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumeric;
  }
}
