#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "ltavg/model.hpp"
#include "ltavg/verdict.hpp"

namespace ltavg {

struct IntegratorSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double initial_dt = 1e-3;
  double blowup_norm = 1e8;
  bool fixed_step = false;  // disables the controller (order checks)
  double fixed_dt = 0.0;
  long max_steps = 50000000;
};

template <typename Scalar>
struct TrajectoryT {
  std::vector<double> times;
  std::vector<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> states;
  std::optional<double> blow_up;  // time at which the norm passed blowup_norm
  bool step_underflow = false;
};

using Trajectory = TrajectoryT<double>;
using CTrajectory = TrajectoryT<std::complex<double>>;

namespace detail {
double scaled_error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& scale);
}

/// Adaptive Dormand-Prince 5(4) with PI step control. Rhs is called as
/// rhs(t, y, dydt). Works for real and complex states.
template <typename Scalar, typename Rhs>
TrajectoryT<Scalar> integrate_rk45(Rhs&& rhs, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y,
                                   double t0, double t_end, const IntegratorSettings& s = {}) {
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                          e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                          e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;

  TrajectoryT<Scalar> traj;
  double t = t0;
  double dt = s.fixed_step ? s.fixed_dt : std::min(s.initial_dt, t_end - t0);
  if (dt <= 0) throw std::invalid_argument("integrate_rk45: nonpositive step");
  traj.times.push_back(t);
  traj.states.push_back(y);

  const auto n = y.size();
  Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), y5(n);
  rhs(t, y, k1);
  double err_prev = 1.0;
  for (long step = 0; step < s.max_steps && t < t_end; ++step) {
    if (t + dt > t_end) dt = t_end - t;
    ytmp = y + dt * (a21 * k1);
    rhs(t + c2 * dt, ytmp, k2);
    ytmp = y + dt * (a31 * k1 + a32 * k2);
    rhs(t + c3 * dt, ytmp, k3);
    ytmp = y + dt * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * dt, ytmp, k4);
    ytmp = y + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * dt, ytmp, k5);
    ytmp = y + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + dt, ytmp, k6);
    y5 = y + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + dt, y5, k7);

    bool accept = true;
    if (!s.fixed_step) {
      Vec errv = dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      Eigen::VectorXd scale(n), errabs(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        scale[i] = s.abs_tol + s.rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        errabs[i] = std::abs(errv[i]);
      }
      const double err = detail::scaled_error_norm(errabs, scale);
      accept = err <= 1.0;
      double fac;
      if (accept) {
        fac = 0.9 * std::pow(std::max(err, 1e-10), -0.14) * std::pow(err_prev, 0.08);
        err_prev = std::max(err, 1e-10);
      } else {
        fac = std::max(0.1, 0.9 * std::pow(err, -0.2));
      }
      const double dt_new = dt * std::min(10.0, std::max(0.2, fac));
      if (accept) {
        t += dt;
        y = y5;
        k1 = k7;
        traj.times.push_back(t);
        traj.states.push_back(y);
        if (y.norm() > s.blowup_norm) {
          traj.blow_up = t;
          return traj;
        }
      }
      if (dt_new < 1e-14 * std::max(1.0, std::abs(t))) {
        traj.step_underflow = true;
        return traj;
      }
      dt = dt_new;
    } else {
      t += dt;
      y = y5;
      k1 = k7;
      traj.times.push_back(t);
      traj.states.push_back(y);
      if (y.norm() > s.blowup_norm) {
        traj.blow_up = t;
        return traj;
      }
    }
  }
  return traj;
}

/// Integrates the polynomial system from `ic`, recording every accepted step.
Trajectory integrate(const PolySystem& system, const Eigen::VectorXd& ic, double t_end,
                     double rel_tol = 1e-8, double abs_tol = 1e-10);

struct DnsSettings {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double horizon = 0.0;  // 0: derived from the loss rate
  int n_ic = 3;
  unsigned long seed = 12345;
  double window_fraction = 0.1;
  double grow_ratio = 10.0;
  double decay_ratio = 1e-3;
};

double default_horizon(const OscillatorParams& p);

/// Ensemble classification: unstable if any trajectory blows up or its
/// end-window amplitude grows past grow_ratio; stable if every end-window
/// amplitude falls below decay_ratio; indeterminate otherwise. Seeded and
/// reproducible.
Verdict classify_dns(const OscillatorParams& p, const DnsSettings& s = {});
Verdict classify_dns(const OscillatorParams& p, int n_ic, double horizon,
                     unsigned long seed = 12345);

/// Trapezoidal average of `quantity` over the trailing window of a trajectory.
/// Throws if the trajectory blew up.
double time_average(const Trajectory& traj, const Polynomial& quantity, double window_fraction);

/// Running maximum of |state[var_index]| over times in [t_lo, t_hi].
double envelope_max(const Trajectory& traj, int var_index, double t_lo, double t_hi);

}  // namespace ltavg
