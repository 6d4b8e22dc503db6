#include "rydsim/pulse_synthesis.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "rydsim/errors.hpp"
#include "rydsim/units.hpp"

namespace rydsim {
namespace {

// Relative distance from a pulse endpoint inside which the analytic limit is
// used instead of the 0*inf*0 expression.
constexpr double kEndpointSnap = 1e-13;

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream os;
    os << name << " must be positive and finite, got " << value;
    fail(ErrorKind::invalid_parameter, os.str());
  }
}

// Cubic Hermite interpolant in monomial form.
CubicPolynomial hermite_cubic(double t_f, double p0, double p1, double m0,
                              double m1) {
  const double c2 = (3.0 * (p1 - p0) - t_f * (2.0 * m0 + m1)) / (t_f * t_f);
  const double c3 = (2.0 * (p0 - p1) + t_f * (m0 + m1)) / (t_f * t_f * t_f);
  return CubicPolynomial({p0, m0, c2, c3}, t_f);
}

double snap_zero(double value, double scale) {
  return std::abs(value) <= 1e-12 * scale ? 0.0 : value;
}

// Everything the LR drive formula needs at one time, computed without
// catastrophic cancellation near either endpoint.
struct LrLocal {
  double sin_alpha;
  double cos_alpha;
  double d_alpha;
  double dd_alpha;
  double sin_bp;  // sin(beta - phi)
  double cos_bp;  // cos(beta - phi)
  double d_beta;
  double dd_beta;
};

struct QuarterTurn {
  double sin_d0;
  double cos_d0;
};

QuarterTurn endpoint_phase(const LrPulseParams& p) {
  const double d0 = p.beta_endpoint - p.phi;
  double c = std::cos(d0);
  double s = std::sin(d0);
  // beta - phi = pi/2 (mod pi) is the regular boundary set; make it exact so
  // the endpoint expansion is not polluted by the rounding of pi/2.
  if (std::abs(c) < 1e-12) {
    c = 0.0;
    s = s > 0.0 ? 1.0 : -1.0;
  }
  return {s, c};
}

LrLocal lr_local(double t, const LrPulseParams& p) {
  const double t_f = p.t_f;
  const auto& a = p.alpha.coefficients();
  const auto& b = p.beta.coefficients();
  const QuarterTurn q = endpoint_phase(p);

  LrLocal out{};
  double beta_offset = 0.0;
  if (t <= 0.5 * t_f) {
    const double alpha = p.alpha(t);
    out.sin_alpha = std::sin(alpha);
    out.cos_alpha = std::cos(alpha);
    out.d_alpha = p.alpha.derivative(t);
    out.dd_alpha = p.alpha.second_derivative(t);
    beta_offset = (b[0] - p.beta_endpoint) + t * (b[1] + t * (b[2] + t * b[3]));
  } else {
    const double u = t_f - t;
    const CubicPolynomial ra = p.alpha.reflected();
    const CubicPolynomial rb = p.beta.reflected();
    const auto& r = ra.coefficients();
    const auto& s = rb.coefficients();
    const double scale_a = std::abs(a[1]) + std::abs(2.0 * a[2] * t_f) +
                           std::abs(3.0 * a[3] * t_f * t_f);
    // pi - alpha(t) expanded in u = t_f - t
    const double alpha_c = snap_zero(pi - r[0], pi) -
                           u * (snap_zero(r[1], scale_a) + u * (r[2] + u * r[3]));
    out.sin_alpha = std::sin(alpha_c);
    out.cos_alpha = -std::cos(alpha_c);
    out.d_alpha = snap_zero(r[1], scale_a) + u * (2.0 * r[2] + 3.0 * r[3] * u);
    out.d_alpha = -out.d_alpha;
    out.dd_alpha = p.alpha.second_derivative(t);
    beta_offset = snap_zero(s[0] - p.beta_endpoint, std::abs(p.beta_endpoint) + 1.0) +
                  u * (s[1] + u * (s[2] + u * s[3]));
  }
  const double cb = std::cos(beta_offset);
  const double sb = std::sin(beta_offset);
  out.sin_bp = q.sin_d0 * cb + q.cos_d0 * sb;
  out.cos_bp = q.cos_d0 * cb - q.sin_d0 * sb;
  out.d_beta = p.beta.derivative(t);
  out.dd_beta = p.beta.second_derivative(t);
  return out;
}

void check_lr_domain(double t, const LrPulseParams& p) {
  const double slack = 1e-12 * p.t_f;
  if (!(t >= -slack && t <= p.t_f + slack)) {
    std::ostringstream os;
    os << "lr_pulse: t=" << t << " outside [0, " << p.t_f << "]";
    fail(ErrorKind::domain, os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------------------

CubicPolynomial::CubicPolynomial(const std::array<double, 4>& coefficients,
                                 double duration)
    : c_(coefficients), duration_(duration) {}

double CubicPolynomial::operator()(double t) const {
  return c_[0] + t * (c_[1] + t * (c_[2] + t * c_[3]));
}

double CubicPolynomial::derivative(double t) const {
  return c_[1] + t * (2.0 * c_[2] + 3.0 * c_[3] * t);
}

double CubicPolynomial::second_derivative(double t) const {
  return 2.0 * c_[2] + 6.0 * c_[3] * t;
}

CubicPolynomial CubicPolynomial::reflected() const {
  const double T = duration_;
  return CubicPolynomial({(*this)(T), -derivative(T),
                          0.5 * second_derivative(T), -c_[3]},
                         T);
}

CubicPolynomial solve_alpha(double t_f) {
  require_positive(t_f, "t_f");
  return hermite_cubic(t_f, 0.0, pi, 0.0, 0.0);
}

CubicPolynomial solve_beta(double t_f, double beta_endpoint) {
  require_positive(t_f, "t_f");
  const double slope = 3.0 * pi / (2.0 * t_f);
  return hermite_cubic(t_f, beta_endpoint, beta_endpoint, slope, -slope);
}

Deviation Deviation::then(double omega_rel, double delta_rel,
                          double delta_abs) const {
  Deviation d;
  d.omega_scale = omega_scale * (1.0 + omega_rel);
  d.delta_scale = delta_scale * (1.0 + delta_rel);
  d.delta_offset = delta_offset * (1.0 + delta_rel) + delta_abs;
  return d;
}

LrPulseParams LrPulseParams::standard(double t_f, double phi,
                                      double beta_endpoint) {
  LrPulseParams p;
  p.t_f = t_f;
  p.phi = phi;
  p.alpha = solve_alpha(t_f);
  p.beta = solve_beta(t_f, beta_endpoint);
  p.beta_endpoint = beta_endpoint;
  return p;
}

PulseSample lr_pulse(double t, const LrPulseParams& p) {
  check_lr_domain(t, p);
  PulseSample s;
  s.t = t;
  s.phi = p.phi;

  const bool at_start = t <= kEndpointSnap * p.t_f;
  const bool at_end = p.t_f - t <= kEndpointSnap * p.t_f;
  if (at_start || at_end) {
    const double te = at_start ? 0.0 : p.t_f;
    const QuarterTurn q = endpoint_phase(p);
    if (q.cos_d0 != 0.0) {
      fail(ErrorKind::degenerate_point,
           "lr_pulse: detuning diverges at the pulse endpoint unless "
           "beta_endpoint - phi = pi/2 (mod pi)");
    }
    s.omega = 0.0;
    s.delta = -3.0 * p.beta.derivative(te);
    return s;
  }

  const LrLocal l = lr_local(t, p);
  if (l.sin_bp == 0.0) {
    fail(ErrorKind::degenerate_point, "lr_pulse: sin(beta - phi) vanishes");
  }
  s.omega = l.d_alpha / l.sin_bp;
  s.delta = s.omega * (l.cos_alpha / l.sin_alpha) * l.cos_bp - l.d_beta;
  return s;
}

PulseRates lr_pulse_rates(double t, const LrPulseParams& p) {
  check_lr_domain(t, p);
  if (t <= kEndpointSnap * p.t_f || p.t_f - t <= kEndpointSnap * p.t_f) {
    fail(ErrorKind::domain,
         "lr_pulse_rates: defined on the open interval (0, t_f) only");
  }
  const LrLocal l = lr_local(t, p);
  const double omega = l.d_alpha / l.sin_bp;
  const double cot_a = l.cos_alpha / l.sin_alpha;
  PulseRates r;
  r.d_omega = l.dd_alpha / l.sin_bp -
              l.d_alpha * l.cos_bp * l.d_beta / (l.sin_bp * l.sin_bp);
  r.d_delta = r.d_omega * cot_a * l.cos_bp -
              omega * l.d_alpha / (l.sin_alpha * l.sin_alpha) * l.cos_bp -
              omega * cot_a * l.sin_bp * l.d_beta - l.dd_beta;
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct CosineLocal {
  double x;       // phase of the active cosine branch
  bool rising;    // first quarter of a half (ground-state side)
};

CosineLocal cosine_branch(double t, const AdiabaticPulseParams& p,
                          AdiabaticHalf half) {
  require_positive(p.tau, "tau");
  const double origin = half == AdiabaticHalf::first ? 0.0 : 2.0 * p.tau;
  const double local = t - origin;
  const double slack = 1e-12 * p.tau;
  if (!(local >= -slack && local <= 2.0 * p.tau + slack)) {
    std::ostringstream os;
    os << "adiabatic_pulse: t=" << t << " outside ["
       << origin << ", " << origin + 2.0 * p.tau << "]";
    fail(ErrorKind::domain, os.str());
  }
  if (local < p.tau) return {pi * std::max(local, 0.0) / p.tau, true};
  return {pi * (std::min(local, 2.0 * p.tau) - p.tau) / p.tau, false};
}

}  // namespace

PulseSample adiabatic_pulse(double t, const AdiabaticPulseParams& p,
                            AdiabaticHalf half) {
  const CosineLocal c = cosine_branch(t, p, half);
  PulseSample s;
  s.t = t;
  const double cx = std::cos(c.x);
  if (c.rising) {
    s.omega = p.omega0 * (1.0 - cx);
    s.delta = p.delta0 * (1.0 + cx);
  } else {
    s.omega = p.omega0 * (1.0 + cx);
    s.delta = p.delta0 * (cx - 1.0);
  }
  return s;
}

PulseRates adiabatic_pulse_rates(double t, const AdiabaticPulseParams& p,
                                 AdiabaticHalf half) {
  const CosineLocal c = cosine_branch(t, p, half);
  const double k = pi / p.tau;
  const double sx = std::sin(c.x);
  PulseRates r;
  r.d_omega = (c.rising ? 1.0 : -1.0) * p.omega0 * k * sx;
  r.d_delta = -p.delta0 * k * sx;
  return r;
}

// ---------------------------------------------------------------------------

PulseSample gaussian_pulse(double t, const GaussianPulseParams& p) {
  require_positive(p.sigma, "sigma");
  PulseSample s;
  s.t = t;
  if (t < p.t_start || t > p.t_end) return s;
  const double x = t - p.center();
  s.omega = p.omega_n * std::exp(-x * x / p.sigma);
  return s;
}

PulseRates gaussian_pulse_rates(double t, const GaussianPulseParams& p) {
  const PulseSample s = gaussian_pulse(t, p);
  PulseRates r;
  r.d_omega = -2.0 * (t - p.center()) / p.sigma * s.omega;
  return r;
}

double gaussian_area(double omega_n, double sigma, double window) {
  const double root = std::sqrt(sigma);
  return omega_n * std::sqrt(pi) * root * std::erf(0.5 * window / root);
}

SigmaCalibration calibrate_sigma(double omega_n, double window,
                                 double target_area) {
  require_positive(omega_n, "omega_n");
  require_positive(window, "window");
  const double ceiling = omega_n * window;
  if (!(target_area > 0.0) || !(target_area < ceiling)) {
    std::ostringstream os;
    os << "calibrate_sigma: target area " << target_area
       << " not reachable (must lie in (0, " << ceiling << "))";
    fail(ErrorKind::infeasible, os.str());
  }

  // Solve in s = sqrt(sigma); area is monotone increasing in s.
  auto residual = [&](double s) {
    return gaussian_area(omega_n, s * s, window) - target_area;
  };
  const double s_free = target_area / (omega_n * std::sqrt(pi));
  double lo = 0.5 * s_free;
  double hi = s_free;
  for (int i = 0; residual(hi) <= 0.0; ++i) {
    if (i > 200) fail(ErrorKind::infeasible, "calibrate_sigma: no bracket");
    lo = hi;
    hi *= 2.0;
  }
  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(
      residual, lo, hi, boost::math::tools::eps_tolerance<double>(52),
      max_iter);
  const double s = 0.5 * (a + b);

  SigmaCalibration out;
  out.sigma = s * s;
  out.area = gaussian_area(omega_n, out.sigma, window);
  if (std::abs(target_area - pi) < 1e-9) out.quoted_sigma = 0.08293;
  if (std::abs(target_area - two_pi) < 1e-9) out.quoted_sigma = 0.33171;
  return out;
}

}  // namespace rydsim
