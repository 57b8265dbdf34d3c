#include "ltavg/model.hpp"

#include <cmath>

namespace ltavg {

namespace {

// cos(pi/2) comes out as ~6e-17; snap so phase multipliers stay exact.
double snap(double v) { return std::abs(v) < 1e-15 ? 0.0 : v; }

}  // namespace

void OscillatorParams::validate() const {
  if (!(omega0 > 0)) throw std::invalid_argument("OscillatorParams: omega0 must be positive");
  if (h < 0 || h > 1) throw std::invalid_argument("OscillatorParams: h must lie in [0, 1]");
  if (g < 0) throw std::invalid_argument("OscillatorParams: g must be nonnegative");
  if (!std::isfinite(gamma) || !std::isfinite(r) || !std::isfinite(phi))
    throw std::invalid_argument("OscillatorParams: non-finite parameter");
}

PolySystem build_system(const OscillatorParams& p) {
  p.validate();
  const double w = p.omega0;
  const double w2 = w * w;
  const bool reduced = (p.gamma == 0.0 && p.phi == 0.0);
  const int n = reduced ? 4 : 6;

  PolySystem sys;
  sys.nvars = n;
  sys.state_names = {"x1", "x2", "y1", "y2"};
  auto X1 = Polynomial::variable(n, 0);
  auto X2 = Polynomial::variable(n, 1);
  auto Y1 = Polynomial::variable(n, 2);
  auto Y2 = Polynomial::variable(n, 3);

  // Drive multipliers: sin(gamma t +/- phi/2) expanded over (x3, x4).
  Polynomial drive1(n), drive2(n);
  if (!reduced) {
    sys.state_names.push_back("x3");
    sys.state_names.push_back("x4");
    auto X3 = Polynomial::variable(n, 4);
    auto X4 = Polynomial::variable(n, 5);
    const double c = snap(std::cos(p.phi / 2));
    const double s = snap(std::sin(p.phi / 2));
    drive1 = X3 * c + X4 * s;
    drive2 = X3 * c - X4 * s;
  }

  Polynomial f_y1 =
      -(X1 + drive1 * X1 * p.h) * w2 - Y1 * (w * p.g) + Y2 * (w * p.r);
  Polynomial f_y2 =
      -(X2 + drive2 * X2 * p.h) * w2 - Y2 * (w * p.g) - Y1 * (w * p.r);

  sys.field = {Y1, Y2, f_y1, f_y2};
  if (!reduced) {
    auto X3 = Polynomial::variable(n, 4);
    auto X4 = Polynomial::variable(n, 5);
    sys.field.push_back(X4 * p.gamma);
    sys.field.push_back(-(X3 * p.gamma));
    sys.constraints.push_back(X3 * X3 + X4 * X4 - Polynomial::constant(n, 1.0));
  }
  return sys;
}

Polynomial build_phi(int nvars) {
  if (nvars != 4 && nvars != 6) throw std::invalid_argument("build_phi: nvars must be 4 or 6");
  auto X1 = Polynomial::variable(nvars, 0);
  auto X2 = Polynomial::variable(nvars, 1);
  return X1 * X1 + X2 * X2;
}

ResonanceFrequencies resonance_frequencies(const OscillatorParams& p) {
  const double arg = 1.0 + (p.r * p.r - p.g * p.g) / 4.0;
  if (!(arg > 0)) throw std::domain_error("resonance_frequencies: 1 + (r^2 - g^2)/4 must be positive");
  const double two_omega_r = 2.0 * p.omega0 * std::sqrt(arg);
  return {two_omega_r, two_omega_r - p.omega0 * p.r, two_omega_r + p.omega0 * p.r};
}

SignedVarMap negate_oscillators(int nvars) {
  SignedVarMap m = SignedVarMap::identity(nvars);
  for (int i = 0; i < 4; ++i) m.sign[i] = -1;
  return m;
}

SignedVarMap quarter_turn(int nvars, bool negate_trig) {
  // Substitution x1 -> x2, x2 -> -x1, y1 -> y2, y2 -> -y1. In SignedVarMap
  // terms (x_i -> sign[i] * x_{perm[i]}) this is perm = (1,0,3,2),
  // sign = (+,-,+,-).
  SignedVarMap m = SignedVarMap::identity(nvars);
  m.perm[0] = 1;
  m.perm[1] = 0;
  m.sign[1] = -1;
  m.perm[2] = 3;
  m.perm[3] = 2;
  m.sign[3] = -1;
  if (negate_trig) {
    if (nvars < 6) throw std::invalid_argument("quarter_turn: no trig variables to negate");
    m.sign[4] = -1;
    m.sign[5] = -1;
  }
  return m;
}

}  // namespace ltavg
