#pragma once

#include <array>
#include <optional>

namespace rydsim {

/// Cubic c0 + c1 t + c2 t^2 + c3 t^3 on the domain [0, duration].
class CubicPolynomial {
 public:
  CubicPolynomial() = default;
  CubicPolynomial(const std::array<double, 4>& coefficients, double duration);

  double operator()(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;
  double third_derivative() const { return 6.0 * c_[3]; }

  /// The polynomial u -> p(duration - u), expanded exactly about the right
  /// endpoint. Evaluating close to `duration` through it avoids the
  /// cancellation in p(t) - p(duration).
  CubicPolynomial reflected() const;

  const std::array<double, 4>& coefficients() const { return c_; }
  double duration() const { return duration_; }

  friend bool operator==(const CubicPolynomial&, const CubicPolynomial&) = default;

 private:
  std::array<double, 4> c_{};
  double duration_ = 0.0;
};

/// alpha(0)=0, alpha(t_f)=pi, alpha'(0)=alpha'(t_f)=0.
CubicPolynomial solve_alpha(double t_f);

/// beta(0)=beta(t_f)=endpoint, beta'(0)=-beta'(t_f)=3pi/(2 t_f).
CubicPolynomial solve_beta(double t_f, double beta_endpoint);

/// One time sample of a drive: Rabi frequency and detuning in rad/us, laser
/// phase in rad.
struct PulseSample {
  double t = 0.0;
  double omega = 0.0;
  double delta = 0.0;
  double phi = 0.0;
};

/// Closed-form time derivatives of a pulse (rad/us^2).
struct PulseRates {
  double d_omega = 0.0;
  double d_delta = 0.0;
};

/// Additive/multiplicative control-parameter error applied on top of an
/// ideal pulse: omega *= (1 + omega_rel); delta = delta*(1 + delta_rel) + delta_abs.
struct Deviation {
  double omega_scale = 1.0;
  double delta_scale = 1.0;
  double delta_offset = 0.0;

  PulseSample apply(PulseSample s) const {
    s.omega *= omega_scale;
    s.delta = s.delta * delta_scale + delta_offset;
    return s;
  }
  /// Composes a further deviation on top of this one.
  Deviation then(double omega_rel, double delta_rel, double delta_abs) const;

  friend bool operator==(const Deviation&, const Deviation&) = default;
};

// ---------------------------------------------------------------------------
// Invariant-based (shortcut) pulses

struct LrPulseParams {
  double t_f = 1.0;
  double phi = 0.0;
  CubicPolynomial alpha;
  CubicPolynomial beta;
  double beta_endpoint = 0.0;

  /// Standard boundary set: alpha from solve_alpha, beta from solve_beta.
  static LrPulseParams standard(double t_f, double phi, double beta_endpoint);

  friend bool operator==(const LrPulseParams&, const LrPulseParams&) = default;
};

/// Omega = alpha'/sin(beta-phi), Delta = Omega cot(alpha) cos(beta-phi) - beta'.
/// At t in {0, t_f} the analytic limits Omega=0, Delta=-3 beta'(t) are
/// returned. Throws ErrorKind::domain for t outside [0, t_f].
PulseSample lr_pulse(double t, const LrPulseParams& params);

/// Closed-form d(Omega)/dt and d(Delta)/dt on the open interval (0, t_f).
PulseRates lr_pulse_rates(double t, const LrPulseParams& params);

// ---------------------------------------------------------------------------
// Piecewise-cosine adiabatic pulses

struct AdiabaticPulseParams {
  double omega0 = 0.0;
  double delta0 = 0.0;
  double tau = 0.0;

  friend bool operator==(const AdiabaticPulseParams&,
                         const AdiabaticPulseParams&) = default;
};

enum class AdiabaticHalf { first, second };

/// `first` is defined on [0, 2tau] (ground -> Rydberg), `second` on
/// [2tau, 4tau] (Rydberg -> ground); t is measured in the 4tau frame.
PulseSample adiabatic_pulse(double t, const AdiabaticPulseParams& params,
                            AdiabaticHalf half);
PulseRates adiabatic_pulse_rates(double t, const AdiabaticPulseParams& params,
                                 AdiabaticHalf half);

// ---------------------------------------------------------------------------
// Truncated Gaussian pulses (resonant)

struct GaussianPulseParams {
  double omega_n = 0.0;
  double sigma = 0.0;  // us^2
  double t_start = 0.0;
  double t_end = 0.0;

  double center() const { return 0.5 * (t_start + t_end); }
  double window() const { return t_end - t_start; }

  friend bool operator==(const GaussianPulseParams&,
                         const GaussianPulseParams&) = default;
};

/// Omega_n exp(-(t-center)^2/sigma) inside the window, 0 outside; Delta = 0.
PulseSample gaussian_pulse(double t, const GaussianPulseParams& params);
PulseRates gaussian_pulse_rates(double t, const GaussianPulseParams& params);

/// Pulse area over the truncation window, erf closed form.
double gaussian_area(double omega_n, double sigma, double window);

struct SigmaCalibration {
  double sigma = 0.0;
  double area = 0.0;
  /// sigma quoted in the original non-adiabatic proposal for this target
  /// area (pi and 2pi only), for side-by-side reporting.
  std::optional<double> quoted_sigma;
};

/// Finds sigma such that the truncated pulse area equals `target_area`.
/// Throws ErrorKind::infeasible when the area cannot be reached.
SigmaCalibration calibrate_sigma(double omega_n, double window,
                                 double target_area);

}  // namespace rydsim
