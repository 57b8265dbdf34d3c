#include "ltavg/dns.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace ltavg {

namespace detail {
double scaled_error_norm(const Eigen::VectorXd& err, const Eigen::VectorXd& scale) {
  double acc = 0;
  for (Eigen::Index i = 0; i < err.size(); ++i) {
    const double r = err[i] / scale[i];
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(err.size()));
}
}  // namespace detail

namespace {

// Flattened polynomial terms for fast repeated evaluation in the RHS loop.
struct CompiledPoly {
  struct Term {
    double coeff;
    int exps[8];
  };
  std::vector<Term> terms;
  int nvars = 0;

  static CompiledPoly from(const Polynomial& p) {
    CompiledPoly cp;
    cp.nvars = p.nvars();
    if (cp.nvars > 8) throw std::invalid_argument("CompiledPoly: too many variables");
    for (const auto& [m, c] : p.terms()) {
      Term t{};
      t.coeff = c;
      for (int i = 0; i < cp.nvars; ++i) t.exps[i] = m.exponent(i);
      cp.terms.push_back(t);
    }
    return cp;
  }

  double eval(const Eigen::VectorXd& x) const {
    double total = 0;
    for (const auto& t : terms) {
      double v = t.coeff;
      for (int i = 0; i < nvars; ++i)
        for (int k = 0; k < t.exps[i]; ++k) v *= x[i];
      total += v;
    }
    return total;
  }
};

struct CompiledSystem {
  std::vector<CompiledPoly> field;
  explicit CompiledSystem(const PolySystem& sys) {
    for (const auto& f : sys.field) field.push_back(CompiledPoly::from(f));
  }
  void operator()(double, const Eigen::VectorXd& y, Eigen::VectorXd& dydt) const {
    for (size_t i = 0; i < field.size(); ++i) dydt[static_cast<Eigen::Index>(i)] = field[i].eval(y);
  }
};

double window_amplitude(const Trajectory& traj, double t_lo, double t_hi, int osc_vars) {
  double amp = 0;
  for (size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] < t_lo || traj.times[k] > t_hi) continue;
    amp = std::max(amp, traj.states[k].head(osc_vars).norm());
  }
  return amp;
}

}  // namespace

Trajectory integrate(const PolySystem& system, const Eigen::VectorXd& ic, double t_end,
                     double rel_tol, double abs_tol) {
  if (ic.size() != system.nvars) throw std::invalid_argument("integrate: bad initial state size");
  if (!ic.allFinite()) throw std::invalid_argument("integrate: non-finite initial state");
  if (!(rel_tol > 0) || !(abs_tol > 0)) throw std::invalid_argument("integrate: nonpositive tolerance");
  IntegratorSettings s;
  s.rel_tol = rel_tol;
  s.abs_tol = abs_tol;
  CompiledSystem rhs(system);
  return integrate_rk45<double>(rhs, ic, 0.0, t_end, s);
}

double default_horizon(const OscillatorParams& p) {
  const double base = 200.0 * 2.0 * M_PI / p.omega0;
  const double rate = 0.5 * p.g * p.omega0;
  double horizon = base;
  if (rate > 0) horizon = std::max(horizon, 1.5 * std::log(3e3) / rate);
  return std::min(horizon, 1e5);
}

Verdict classify_dns(const OscillatorParams& p, const DnsSettings& s) {
  Verdict v;
  v.method = "dns";
  const double horizon = s.horizon > 0 ? s.horizon : default_horizon(p);
  PolySystem sys = build_system(p);
  std::mt19937_64 rng(s.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  int stable_votes = 0, unstable_votes = 0;
  const double wf = s.window_fraction;
  std::ostringstream note;
  for (int trial = 0; trial < std::max(1, s.n_ic); ++trial) {
    Eigen::VectorXd ic = Eigen::VectorXd::Zero(sys.nvars);
    for (int i = 0; i < 4; ++i) ic[i] = uni(rng);
    if (sys.nvars == 6) {
      ic[4] = 0.0;  // sin(0)
      ic[5] = 1.0;  // cos(0)
    }
    IntegratorSettings is;
    is.rel_tol = s.rel_tol;
    is.abs_tol = s.abs_tol;
    CompiledSystem rhs(sys);
    Trajectory traj = integrate_rk45<double>(rhs, ic, 0.0, horizon, is);
    if (traj.blow_up) {
      ++unstable_votes;
      note << "ic" << trial << ":blowup@" << *traj.blow_up << " ";
      continue;
    }
    const double t_end = traj.times.back();
    const double amp0 = window_amplitude(traj, 0.0, wf * t_end, 4);
    const double amp1 = window_amplitude(traj, (1.0 - wf) * t_end, t_end, 4);
    if (amp1 >= s.grow_ratio * amp0 && amp0 > 0) {
      ++unstable_votes;
      note << "ic" << trial << ":grew " << amp1 / amp0 << "x ";
    } else if (amp1 <= s.decay_ratio * amp0) {
      ++stable_votes;
    } else {
      note << "ic" << trial << ":ratio " << (amp0 > 0 ? amp1 / amp0 : 0.0) << " ";
    }
  }
  if (unstable_votes > 0)
    v.label = StabilityLabel::Unstable;
  else if (stable_votes == std::max(1, s.n_ic))
    v.label = StabilityLabel::Stable;
  else
    v.label = StabilityLabel::Indeterminate;
  v.detail = note.str();
  return v;
}

Verdict classify_dns(const OscillatorParams& p, int n_ic, double horizon, unsigned long seed) {
  if (n_ic < 1) throw std::invalid_argument("classify_dns: n_ic must be >= 1");
  DnsSettings s;
  s.n_ic = n_ic;
  s.horizon = horizon;
  s.seed = seed;
  return classify_dns(p, s);
}

double time_average(const Trajectory& traj, const Polynomial& quantity, double window_fraction) {
  if (traj.blow_up)
    throw std::runtime_error("time_average: trajectory blew up (diverging average)");
  if (!(window_fraction > 0) || window_fraction > 1)
    throw std::invalid_argument("time_average: window_fraction must lie in (0, 1]");
  if (traj.times.size() < 2) throw std::invalid_argument("time_average: trajectory too short");
  const double t_end = traj.times.back();
  const double t_lo = traj.times.front() + (1.0 - window_fraction) * (t_end - traj.times.front());
  double integral = 0, span = 0;
  double prev_t = 0, prev_v = 0;
  bool have_prev = false;
  for (size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] < t_lo) continue;
    const double val = quantity.eval(traj.states[k]);
    if (have_prev) {
      integral += 0.5 * (val + prev_v) * (traj.times[k] - prev_t);
      span += traj.times[k] - prev_t;
    }
    prev_t = traj.times[k];
    prev_v = val;
    have_prev = true;
  }
  if (span <= 0) throw std::runtime_error("time_average: empty averaging window");
  return integral / span;
}

double envelope_max(const Trajectory& traj, int var_index, double t_lo, double t_hi) {
  double amp = 0;
  for (size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] < t_lo || traj.times[k] > t_hi) continue;
    amp = std::max(amp, std::abs(traj.states[k][var_index]));
  }
  return amp;
}

}  // namespace ltavg
