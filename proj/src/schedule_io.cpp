#include "rydsim/schedule_io.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "rydsim/errors.hpp"

namespace rydsim {
namespace {

using nlohmann::json;

json cubic_json(const CubicPolynomial& p) {
  const auto& c = p.coefficients();
  return json::array({c[0], c[1], c[2], c[3]});
}

CubicPolynomial cubic_from(const json& j, double duration) {
  if (!j.is_array() || j.size() != 4) {
    fail(ErrorKind::parse, "polynomial must be an array of 4 coefficients");
  }
  return CubicPolynomial({j[0].get<double>(), j[1].get<double>(),
                          j[2].get<double>(), j[3].get<double>()},
                         duration);
}

json shape_params(const DriveSegment& s) {
  json p;
  if (const auto* lr = std::get_if<LrPulseParams>(&s.shape)) {
    p["t_f_us"] = lr->t_f;
    p["beta_endpoint_rad"] = lr->beta_endpoint;
    p["alpha"] = cubic_json(lr->alpha);
    p["beta"] = cubic_json(lr->beta);
  } else if (const auto* ad = std::get_if<AdiabaticShape>(&s.shape)) {
    p["omega0_rad_per_us"] = ad->params.omega0;
    p["delta0_rad_per_us"] = ad->params.delta0;
    p["tau_us"] = ad->params.tau;
    p["half"] = ad->half == AdiabaticHalf::first ? "first" : "second";
  } else {
    const auto& g = std::get<GaussianPulseParams>(s.shape);
    p["omega_n_rad_per_us"] = g.omega_n;
    p["sigma_us2"] = g.sigma;
    p["window_start_us"] = g.t_start;
    p["window_end_us"] = g.t_end;
  }
  p["omega_scale"] = s.deviation.omega_scale;
  p["delta_scale"] = s.deviation.delta_scale;
  p["delta_offset_rad_per_us"] = s.deviation.delta_offset;
  return p;
}

PulseShape shape_from(const std::string& family, const json& p, double phi) {
  if (family == "lr") {
    LrPulseParams lr;
    lr.t_f = p.at("t_f_us").get<double>();
    lr.phi = phi;
    lr.beta_endpoint = p.at("beta_endpoint_rad").get<double>();
    lr.alpha = cubic_from(p.at("alpha"), lr.t_f);
    lr.beta = cubic_from(p.at("beta"), lr.t_f);
    return lr;
  }
  if (family == "adiabatic") {
    AdiabaticShape a;
    a.params.omega0 = p.at("omega0_rad_per_us").get<double>();
    a.params.delta0 = p.at("delta0_rad_per_us").get<double>();
    a.params.tau = p.at("tau_us").get<double>();
    const std::string half = p.at("half").get<std::string>();
    if (half != "first" && half != "second") {
      fail(ErrorKind::parse, "adiabatic half must be \"first\" or \"second\"");
    }
    a.half = half == "first" ? AdiabaticHalf::first : AdiabaticHalf::second;
    return a;
  }
  if (family == "gaussian") {
    GaussianPulseParams g;
    g.omega_n = p.at("omega_n_rad_per_us").get<double>();
    g.sigma = p.at("sigma_us2").get<double>();
    g.t_start = p.at("window_start_us").get<double>();
    g.t_end = p.at("window_end_us").get<double>();
    return g;
  }
  fail(ErrorKind::parse, "unknown pulse family '" + family + "'");
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, r.ptr);
}

std::string schedule_to_json(const PulseSchedule& schedule, int indent) {
  json doc;
  doc["scheme"] = to_string(schedule.scheme);
  doc["n_atoms"] = schedule.n_atoms;
  doc["thetas_rad"] = schedule.thetas;
  doc["V_rad_per_us"] = schedule.interactions.V;
  doc["V1_rad_per_us"] = schedule.interactions.V1;
  json segs = json::array();
  for (const auto& s : schedule.segments) {
    segs.push_back({
        {"atom", s.atom},
        {"level_a", static_cast<int>(s.level_a)},
        {"t_start_us", s.t_start},
        {"t_end_us", s.t_end},
        {"family", family_name(s.shape)},
        {"params", shape_params(s)},
        {"phi_rad", s.phi},
    });
  }
  doc["segments"] = std::move(segs);
  return doc.dump(indent);
}

PulseSchedule schedule_from_json(const std::string& text) {
  PulseSchedule sch;
  try {
    const json doc = json::parse(text);
    sch.scheme = scheme_from_string(doc.at("scheme").get<std::string>());
    sch.n_atoms = doc.at("n_atoms").get<int>();
    sch.thetas = doc.at("thetas_rad").get<std::vector<double>>();
    sch.interactions.V = doc.at("V_rad_per_us").get<double>();
    sch.interactions.V1 = doc.at("V1_rad_per_us").get<double>();
    for (const auto& js : doc.at("segments")) {
      DriveSegment s;
      s.atom = js.at("atom").get<int>();
      const int level = js.at("level_a").get<int>();
      if (level != 0 && level != 1) fail(ErrorKind::parse, "level_a must be 0 or 1");
      s.level_a = static_cast<Level>(level);
      s.t_start = js.at("t_start_us").get<double>();
      s.t_end = js.at("t_end_us").get<double>();
      s.phi = js.at("phi_rad").get<double>();
      const json& p = js.at("params");
      s.shape = shape_from(js.at("family").get<std::string>(), p, s.phi);
      s.deviation.omega_scale = p.value("omega_scale", 1.0);
      s.deviation.delta_scale = p.value("delta_scale", 1.0);
      s.deviation.delta_offset = p.value("delta_offset_rad_per_us", 0.0);
      sch.segments.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::parse, std::string("schedule JSON: ") + e.what());
  }
  sch.validate();
  return sch;
}

std::string pulse_table_csv(const PulseSchedule& schedule, int segment_index,
                            int points) {
  if (segment_index < 0 || segment_index >= static_cast<int>(schedule.segments.size())) {
    fail(ErrorKind::invalid_parameter, "segment index out of range");
  }
  if (points < 2) fail(ErrorKind::invalid_parameter, "need at least 2 points");
  const DriveSegment& seg = schedule.segments[segment_index];
  std::ostringstream os;
  os << "t_us,omega_rad_per_us,delta_rad_per_us,phi_rad\n";
  for (int k = 0; k < points; ++k) {
    const double local = k == points - 1 ? seg.duration()
                                         : seg.duration() * k / (points - 1);
    const PulseSample s = seg.sample(seg.t_start + local);
    os << format_double(local) << ',' << format_double(s.omega) << ','
       << format_double(s.delta) << ',' << format_double(s.phi) << '\n';
  }
  return os.str();
}

std::string trajectory_csv(const Trajectory& trajectory, TrajectoryColumns columns) {
  std::ostringstream os;
  if (trajectory.states.empty()) return "t_us\n";
  const Matrix& first = trajectory.states.front();
  const bool mixed = first.cols() > 1;
  if (mixed && columns == TrajectoryColumns::amplitudes) {
    fail(ErrorKind::invalid_parameter, "mixed-state trajectories only have populations");
  }
  const Eigen::Index dim = first.rows();
  os << "t_us";
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (columns == TrajectoryColumns::amplitudes) {
      os << ",re_amp_" << i << ",im_amp_" << i;
    } else {
      os << ",pop_basis_" << i;
    }
  }
  os << '\n';
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const Matrix& m = trajectory.states[k];
    os << format_double(trajectory.times[k]);
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (columns == TrajectoryColumns::amplitudes) {
        os << ',' << format_double(m(i, 0).real()) << ',' << format_double(m(i, 0).imag());
      } else {
        const double pop = mixed ? m(i, i).real() : std::norm(m(i, 0));
        os << ',' << format_double(pop);
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace rydsim
