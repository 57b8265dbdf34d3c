#include "ltavg/floquet.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "ltavg/dns.hpp"

namespace ltavg {

namespace {

using cxd = std::complex<double>;
using CPoly1 = std::vector<cxd>;  // univariate, ascending powers

CPoly1 mul1(const CPoly1& a, const CPoly1& b) {
  CPoly1 out(a.size() + b.size() - 1, cxd(0, 0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

CPoly1 add1(CPoly1 a, const CPoly1& b, cxd scale = cxd(1, 0)) {
  if (b.size() > a.size()) a.resize(b.size(), cxd(0, 0));
  for (size_t i = 0; i < b.size(); ++i) a[i] += scale * b[i];
  return a;
}

// D_{branch,n}(mu) = w0^2 - (n gamma - mu)^2 + i w0 loss (n gamma - mu)
CPoly1 mode_poly(double w0, double gamma, int n, cxd loss) {
  const double nu = n * gamma;
  const cxd il = cxd(0, 1) * w0 * loss;
  // constant: w0^2 - nu^2 + i w0 loss nu ; mu: 2 nu - i w0 loss ; mu^2: -1
  return {w0 * w0 - nu * nu + il * nu, cxd(2 * nu, 0) - il, cxd(-1, 0)};
}

cxd eval1(const CPoly1& p, cxd mu) {
  cxd acc(0, 0);
  for (size_t i = p.size(); i-- > 0;) acc = acc * mu + p[i];
  return acc;
}

std::vector<cxd> poly_roots(const CPoly1& coeffs) {
  // strip tiny leading coefficients, then companion-matrix eigenvalues
  double maxc = 0;
  for (const auto& c : coeffs) maxc = std::max(maxc, std::abs(c));
  if (maxc == 0) throw std::invalid_argument("poly_roots: zero polynomial");
  size_t deg = coeffs.size() - 1;
  while (deg > 0 && std::abs(coeffs[deg]) < 1e-14 * maxc) --deg;
  if (deg == 0) throw std::invalid_argument("poly_roots: leading-coefficient underflow");
  const cxd lead = coeffs[deg];
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(static_cast<int>(deg), static_cast<int>(deg));
  for (size_t i = 0; i + 1 < deg; ++i) comp(static_cast<int>(i) + 1, static_cast<int>(i)) = 1.0;
  for (size_t i = 0; i < deg; ++i)
    comp(static_cast<int>(i), static_cast<int>(deg) - 1) = -coeffs[i] / lead;
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eig(comp, false);
  std::vector<cxd> roots(deg);
  for (size_t i = 0; i < deg; ++i) roots[i] = eig.eigenvalues()[static_cast<int>(i)];
  return roots;
}

}  // namespace

std::array<BranchSystem, 2> decouple(const OscillatorParams& p) {
  if (p.phi != 0.0)
    throw std::invalid_argument("decouple: the x1 +/- i x2 change of basis needs phi = 0");
  return {BranchSystem{cxd(p.g, p.r), p}, BranchSystem{cxd(p.g, -p.r), p}};
}

HillDeterminant simplified_determinant(const OscillatorParams& p) {
  HillDeterminant det;
  det.variant = HillDeterminant::Variant::Simplified;
  det.params = p;
  const double a = p.omega0 * p.omega0;  // w0^2
  const double g = p.gamma;
  // (w0^2 - (g - mu)^2)(w0^2 - mu^2) - h^2 w0^4 / 4, ascending in mu
  det.coeffs = {cxd(a * a - a * g * g - p.h * p.h * a * a / 4.0, 0), cxd(2 * a * g, 0),
                cxd(g * g - 2 * a, 0), cxd(-2 * g, 0), cxd(1, 0)};
  return det;
}

HillDeterminant general_determinant(const OscillatorParams& p) {
  if (p.phi != 0.0)
    throw std::invalid_argument("general_determinant: closed form only available for phi = 0");
  HillDeterminant det;
  det.variant = HillDeterminant::Variant::General;
  det.params = p;
  const double c = p.h * p.omega0 * p.omega0 / 2.0;  // coupling magnitude
  CPoly1 total = {cxd(1, 0)};
  for (const cxd loss : {cxd(p.g, p.r), cxd(p.g, -p.r)}) {
    CPoly1 dm = mode_poly(p.omega0, p.gamma, -1, loss);
    CPoly1 d0 = mode_poly(p.omega0, p.gamma, 0, loss);
    CPoly1 dp = mode_poly(p.omega0, p.gamma, +1, loss);
    // det of the tridiagonal 3-mode block: Dm D0 Dp - c^2 (Dm + Dp)
    CPoly1 branch = mul1(mul1(dm, d0), dp);
    branch = add1(branch, dm, cxd(-c * c, 0));
    branch = add1(branch, dp, cxd(-c * c, 0));
    total = mul1(total, branch);
  }
  det.coeffs = total;
  return det;
}

FloquetSpectrum roots(const HillDeterminant& det) {
  FloquetSpectrum spec;
  spec.mu_roots = poly_roots(det.coeffs);
  const double damping = (det.variant == HillDeterminant::Variant::Simplified)
                             ? 0.5 * det.params.g * det.params.omega0
                             : 0.0;
  spec.max_growth = -std::numeric_limits<double>::infinity();
  for (const auto& mu : spec.mu_roots) {
    const double sigma = mu.imag() - damping;
    spec.growth_rates.push_back(sigma);
    spec.max_growth = std::max(spec.max_growth, sigma);
  }
  spec.unstable = spec.max_growth > 1e-9;
  return spec;
}

MonodromySpectrum monodromy(const OscillatorParams& p, int branch_sign) {
  if (p.gamma == 0.0) throw std::invalid_argument("monodromy: gamma must be nonzero");
  if (branch_sign != 1 && branch_sign != -1)
    throw std::invalid_argument("monodromy: branch_sign must be +1 or -1");
  const cxd loss(p.g, branch_sign * p.r);
  const double w2 = p.omega0 * p.omega0;
  const cxd base = w2 * (cxd(1, 0) - loss * loss / 4.0);
  const double T = 2.0 * M_PI / std::abs(p.gamma);

  // Fundamental matrix of y'' + (base + w2 h sin(gamma t)) y = 0 from identity
  // initial data; state is the flattened 2x2 (y columns, then y' rows).
  auto rhs = [&](double t, const Eigen::VectorXcd& s, Eigen::VectorXcd& ds) {
    const cxd q = base + w2 * p.h * std::sin(p.gamma * t);
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = -q * s[0];
    ds[3] = -q * s[1];
  };
  Eigen::VectorXcd ic(4);
  ic << cxd(1, 0), cxd(0, 0), cxd(0, 0), cxd(1, 0);
  IntegratorSettings is;
  is.rel_tol = 1e-10;
  is.abs_tol = 1e-12;
  is.blowup_norm = 1e30;
  CTrajectory traj = integrate_rk45<cxd>(rhs, ic, 0.0, T, is);
  if (traj.step_underflow || traj.times.back() < T * (1 - 1e-12))
    throw std::runtime_error("monodromy: integration failed");
  const Eigen::VectorXcd& fin = traj.states.back();
  const cxd m00 = fin[0], m01 = fin[1], m10 = fin[2], m11 = fin[3];
  const cxd tr = m00 + m11;
  const cxd dt = m00 * m11 - m01 * m10;
  const cxd disc = std::sqrt(tr * tr - 4.0 * dt);
  MonodromySpectrum out;
  out.period = T;
  out.multipliers = {(tr + disc) / 2.0, (tr - disc) / 2.0};
  return out;
}

double monodromy_max_growth(const OscillatorParams& p) {
  double best = -std::numeric_limits<double>::infinity();
  for (int sgn : {1, -1}) {
    MonodromySpectrum ms = monodromy(p, sgn);
    const double lam = std::max(std::abs(ms.multipliers[0]), std::abs(ms.multipliers[1]));
    best = std::max(best, std::log(lam) / ms.period);
  }
  return best - 0.5 * p.g * p.omega0;
}

StabilityLabel floquet_label(const HillDeterminant& det) {
  return roots(det).unstable ? StabilityLabel::Unstable : StabilityLabel::Stable;
}

}  // namespace ltavg
