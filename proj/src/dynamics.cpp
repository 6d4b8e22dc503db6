#include "rydsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "rydsim/errors.hpp"

namespace rydsim {
namespace {

constexpr cplx kI{0.0, 1.0};

void validate(const IntegratorConfig& c, const TimeDependentHamiltonian& h,
              double t0, double t1) {
  if (!h.evaluate) fail(ErrorKind::invalid_parameter, "Hamiltonian has no evaluator");
  if (!(t1 >= t0)) fail(ErrorKind::invalid_parameter, "integration span must have t1 >= t0");
  if (c.method == IntegratorMethod::rk4) {
    if (c.steps_per_segment < 1) {
      fail(ErrorKind::invalid_parameter, "steps_per_segment must be >= 1");
    }
    if (!(c.max_step_phase > 0.0)) {
      fail(ErrorKind::invalid_parameter, "max_step_phase must be > 0");
    }
  } else if (!(c.tolerance > 0.0)) {
    fail(ErrorKind::invalid_parameter, "adaptive tolerance must be > 0");
  }
}

// Breakpoint-delimited intervals of [t0, t1].
std::vector<double> interval_knots(const TimeDependentHamiltonian& h, double t0,
                                   double t1) {
  std::vector<double> knots{t0};
  for (double b : h.breakpoints) {
    if (b > t0 && b < t1) knots.push_back(b);
  }
  knots.push_back(t1);
  std::sort(knots.begin(), knots.end());
  const double eps = 1e-12 * std::max(1.0, std::abs(t1 - t0));
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [eps](double a, double b) { return b - a <= eps; }),
              knots.end());
  if (knots.back() != t1) knots.back() = t1;
  return knots;
}

std::vector<double> sample_times(const IntegratorConfig& c, double t0,
                                 double t1) {
  std::vector<double> out;
  if (!c.record_trajectory) return out;
  const int n = std::max(c.sample_count, 2);
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    out.push_back(k == n - 1 ? t1 : t0 + (t1 - t0) * k / (n - 1));
  }
  return out;
}

// Drives `rhs(t, y, dy)` over [t0, t1] honouring breakpoints and recording
// `y` at the requested sample times.
template <class Rhs>
long long integrate(Matrix& y, Rhs&& rhs, const TimeDependentHamiltonian& h,
                    double t0, double t1, const IntegratorConfig& cfg,
                    Trajectory* traj) {
  const std::vector<double> knots = interval_knots(h, t0, t1);
  const std::vector<double> samples = sample_times(cfg, t0, t1);
  std::size_t next_sample = 0;
  auto record_upto = [&](double t) {
    if (!traj) return;
    const double eps = 1e-12 * std::max(1.0, std::abs(t1 - t0));
    while (next_sample < samples.size() && samples[next_sample] <= t + eps) {
      traj->times.push_back(samples[next_sample]);
      traj->states.push_back(y);
      ++next_sample;
    }
  };
  record_upto(t0);
  if (t1 == t0) return 0;

  long long steps = 0;
  if (cfg.method == IntegratorMethod::rk4) {
    Matrix k1(y.rows(), y.cols()), k2(y.rows(), y.cols()),
        k3(y.rows(), y.cols()), k4(y.rows(), y.cols()), tmp(y.rows(), y.cols());
    for (std::size_t s = 0; s + 1 < knots.size(); ++s) {
      const double a = knots[s];
      const double b = knots[s + 1];
      const double anchor = 0.5 * (a + b);
      double h_target = (b - a) / cfg.steps_per_segment;
      if (h.norm_bound > 0.0) {
        h_target = std::min(h_target, cfg.max_step_phase / h.norm_bound);
      }
      // Sub-intervals between sample times so samples land on step edges.
      std::vector<double> cuts{a};
      for (double ts : samples) {
        if (ts > a && ts < b) cuts.push_back(ts);
      }
      cuts.push_back(b);
      for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double ca = cuts[c];
        const double cb = cuts[c + 1];
        const long long n = std::max<long long>(
            1, static_cast<long long>(std::ceil((cb - ca) / h_target - 1e-9)));
        const double step = (cb - ca) / static_cast<double>(n);
        for (long long k = 0; k < n; ++k) {
          const double t = ca + step * static_cast<double>(k);
          const double t_end = k == n - 1 ? cb : t + step;
          const double hs = t_end - t;
          rhs(t, anchor, y, k1);
          tmp.noalias() = y + (0.5 * hs) * k1;
          rhs(t + 0.5 * hs, anchor, tmp, k2);
          tmp.noalias() = y + (0.5 * hs) * k2;
          rhs(t + 0.5 * hs, anchor, tmp, k3);
          tmp.noalias() = y + hs * k3;
          rhs(t_end, anchor, tmp, k4);
          y.noalias() += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
          ++steps;
        }
        record_upto(cb);
      }
    }
    return steps;
  }

  // Adaptive Dormand-Prince 5(4); state flattened to interleaved re/im.
  namespace ode = boost::numeric::odeint;
  using State = std::vector<double>;
  const Eigen::Index rows = y.rows();
  const Eigen::Index cols = y.cols();
  State x(2 * static_cast<std::size_t>(y.size()));
  auto to_state = [&](const Matrix& m, State& out) {
    Eigen::Map<Matrix>(reinterpret_cast<cplx*>(out.data()), rows, cols) = m;
  };
  to_state(y, x);
  Matrix ym(rows, cols), dym(rows, cols);
  double anchor = t0;
  auto system = [&](const State& xs, State& dxs, double t) {
    ym = Eigen::Map<const Matrix>(reinterpret_cast<const cplx*>(xs.data()), rows, cols);
    rhs(t, anchor, ym, dym);
    to_state(dym, dxs);
  };
  auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<State>>(
      cfg.tolerance, cfg.tolerance);

  std::vector<double> stops(knots.begin(), knots.end());
  for (double ts : samples) stops.push_back(ts);
  std::sort(stops.begin(), stops.end());
  double t = t0;
  double dt = std::min((knots[1] - knots[0]) / 100.0, 1e-3);
  for (double stop : stops) {
    if (stop <= t) continue;
    const auto knot = std::upper_bound(knots.begin(), knots.end(), t);
    anchor = 0.5 * (t + std::min(stop, *knot));
    while (t < stop) {
      const bool reaches_stop = dt >= stop - t;
      double trial = reaches_stop ? stop - t : dt;
      const ode::controlled_step_result r = stepper.try_step(system, x, t, trial);
      dt = trial;  // controller's suggestion (grown on success, shrunk on fail)
      if (r == ode::success) {
        ++steps;
        if (reaches_stop) t = stop;  // no rounding drift past breakpoints
        continue;
      }
      if (dt < cfg.min_step) {
        std::ostringstream os;
        os << "adaptive step size underflow (dt=" << dt << " us) at t=" << t
           << " us";
        throw IntegrationFailure(t, os.str());
      }
    }
    ym = Eigen::Map<const Matrix>(reinterpret_cast<const cplx*>(x.data()), rows, cols);
    y = ym;
    record_upto(stop);
  }
  return steps;
}

}  // namespace

Matrix JumpOperator::dense(Eigen::Index dim) const {
  Matrix m = Matrix::Zero(dim, dim);
  const double amp = std::sqrt(rate);
  for (const auto& [from, to] : transitions) m(to, from) += amp;
  return m;
}

std::vector<JumpOperator> decay_operators(int n_atoms, const NoiseSpec& noise) {
  if (noise.gamma_r0 < 0.0 || noise.gamma_r1 < 0.0) {
    fail(ErrorKind::invalid_parameter, "decay rates must be >= 0");
  }
  const Eigen::Index dim = hilbert_dim(n_atoms);
  std::vector<JumpOperator> out;
  for (int atom = 0; atom < n_atoms; ++atom) {
    const double rate = atom == 0 ? noise.gamma_r0 : noise.gamma_r1;
    if (rate <= 0.0) continue;
    const Level dest = atom == 0 ? Level::zero : Level::one;
    Eigen::Index stride = 1;
    for (int k = atom + 1; k < n_atoms; ++k) stride *= kLevelsPerAtom;
    JumpOperator op;
    op.rate = rate;
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (level_of(i, atom, n_atoms) != Level::rydberg) continue;
      op.transitions.emplace_back(
          i, i - stride * (static_cast<int>(Level::rydberg) - static_cast<int>(dest)));
    }
    out.push_back(std::move(op));
  }
  return out;
}

Matrix propagate_columns(const Matrix& columns,
                         const TimeDependentHamiltonian& h, double t0,
                         double t1, const IntegratorConfig& config) {
  validate(config, h, t0, t1);
  if (columns.rows() != h.dim) {
    fail(ErrorKind::invalid_parameter, "state dimension does not match H");
  }
  Matrix y = columns;
  Matrix hm(h.dim, h.dim);
  double cached_t = std::nan("");
  double cached_anchor = std::nan("");
  auto rhs = [&](double t, double anchor, const Matrix& in, Matrix& out) {
    if (t != cached_t || anchor != cached_anchor) {
      h.evaluate(t, anchor, hm);
      cached_t = t;
      cached_anchor = anchor;
    }
    out.noalias() = -kI * (hm * in);
  };
  integrate(y, rhs, h, t0, t1, config, nullptr);
  return y;
}

SchrodingerResult evolve_schrodinger(const StateVector& psi0,
                                     const TimeDependentHamiltonian& h,
                                     double t0, double t1,
                                     const IntegratorConfig& config) {
  validate(config, h, t0, t1);
  if (psi0.amplitudes().size() != h.dim) {
    fail(ErrorKind::invalid_parameter, "state dimension does not match H");
  }
  Matrix y = psi0.amplitudes();
  Matrix hm(h.dim, h.dim);
  double cached_t = std::nan("");
  double cached_anchor = std::nan("");
  auto rhs = [&](double t, double anchor, const Matrix& in, Matrix& out) {
    if (t != cached_t || anchor != cached_anchor) {
      h.evaluate(t, anchor, hm);
      cached_t = t;
      cached_anchor = anchor;
    }
    out.noalias() = -kI * (hm * in);
  };
  Trajectory traj;
  const long long steps = integrate(y, rhs, h, t0, t1, config,
                                    config.record_trajectory ? &traj : nullptr);
  SchrodingerResult out{StateVector(psi0.n_atoms(), y.col(0)), std::move(traj), steps};
  return out;
}

LindbladResult evolve_lindblad(const DensityMatrix& rho0,
                               const TimeDependentHamiltonian& h,
                               const std::vector<JumpOperator>& jumps,
                               double t0, double t1,
                               const IntegratorConfig& config) {
  validate(config, h, t0, t1);
  const Eigen::Index dim = h.dim;
  if (rho0.entries().rows() != dim) {
    fail(ErrorKind::invalid_parameter, "density matrix dimension does not match H");
  }
  // Every jump here is a sum of |to><from| with distinct `from`, so L^+L is
  // diagonal: rate on each `from`.
  Eigen::VectorXd loss = Eigen::VectorXd::Zero(dim);
  for (const auto& j : jumps) {
    for (const auto& [from, to] : j.transitions) loss[from] += j.rate;
  }
  Matrix hm(dim, dim);
  Matrix k(dim, dim);
  double cached_t = std::nan("");
  double cached_anchor = std::nan("");
  auto rhs = [&](double t, double anchor, const Matrix& rho, Matrix& out) {
    if (t != cached_t || anchor != cached_anchor) {
      h.evaluate(t, anchor, hm);
      cached_t = t;
      cached_anchor = anchor;
    }
    // K = -i H_eff rho with H_eff = H - i/2 sum L^+L; d rho = K + K^+ + jumps
    k.noalias() = -kI * (hm * rho);
    k -= 0.5 * (loss.asDiagonal() * rho);
    out = k + k.adjoint();
    for (const auto& j : jumps) {
      for (const auto& [fa, ta] : j.transitions) {
        for (const auto& [fb, tb] : j.transitions) {
          out(ta, tb) += j.rate * rho(fa, fb);
        }
      }
    }
  };
  Matrix y = rho0.entries();
  Trajectory traj;
  const long long steps = integrate(y, rhs, h, t0, t1, config,
                                    config.record_trajectory ? &traj : nullptr);
  return {DensityMatrix(rho0.n_atoms(), std::move(y)), std::move(traj), steps};
}

LindbladResult evolve_lindblad(const DensityMatrix& rho0,
                               const TimeDependentHamiltonian& h,
                               const NoiseSpec& noise, double t0, double t1,
                               const IntegratorConfig& config) {
  return evolve_lindblad(rho0, h, decay_operators(rho0.n_atoms(), noise), t0,
                         t1, config);
}

}  // namespace rydsim
