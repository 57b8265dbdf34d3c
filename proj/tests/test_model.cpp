#include <cmath>

#include "doctest.h"
#include "ltavg/model.hpp"

using namespace ltavg;

namespace {
OscillatorParams params(double gamma, double h, double r = 0.2, double g = 0.01,
                        double phi = 0.0, double omega0 = 1.0) {
  OscillatorParams p;
  p.omega0 = omega0;
  p.g = g;
  p.r = r;
  p.h = h;
  p.gamma = gamma;
  p.phi = phi;
  return p;
}
}  // namespace

TEST_CASE("model: phi = 0 system matches the stated coefficients") {
  OscillatorParams p = params(2.0, 0.4);
  PolySystem sys = build_system(p);
  REQUIRE(sys.nvars == 6);
  REQUIRE(sys.field.size() == 6);
  const Polynomial& fy1 = sys.field[2];
  // x3 x1 coefficient is -w0^2 h, x4 x1 coefficient is 0
  CHECK(fy1.coeff(Monomial({1, 0, 0, 0, 1, 0})) == doctest::Approx(-p.omega0 * p.omega0 * p.h));
  CHECK(fy1.coeff(Monomial({1, 0, 0, 0, 0, 1})) == doctest::Approx(0.0));
  CHECK(fy1.coeff(Monomial({1, 0, 0, 0, 0, 0})) == doctest::Approx(-p.omega0 * p.omega0));
  CHECK(fy1.coeff(Monomial({0, 0, 1, 0, 0, 0})) == doctest::Approx(-p.omega0 * p.g));
  CHECK(fy1.coeff(Monomial({0, 0, 0, 1, 0, 0})) == doctest::Approx(p.omega0 * p.r));
  // trig pair
  CHECK((sys.field[4] - Polynomial::variable(6, 5) * p.gamma).is_zero());
  CHECK((sys.field[5] + Polynomial::variable(6, 4) * p.gamma).is_zero());
}

TEST_CASE("model: h = 0 decouples the trig pair and the field is linear") {
  PolySystem sys = build_system(params(1.5, 0.0));
  for (const auto& f : sys.field) CHECK(f.degree() <= 1);
  std::vector<int> trig = {4, 5};
  for (int i = 0; i < 4; ++i)
    for (const auto& [m, c] : sys.field[i].terms()) CHECK(m.degree_over(trig) == 0);
}

TEST_CASE("model: phi = pi sends the drive to +/- x4") {
  OscillatorParams p = params(2.0, 0.3, 0.2, 0.01, M_PI);
  PolySystem sys = build_system(p);
  const Polynomial& fy1 = sys.field[2];
  const Polynomial& fy2 = sys.field[3];
  CHECK(fy1.coeff(Monomial({1, 0, 0, 0, 0, 1})) == doctest::Approx(-p.h));  // w0 = 1
  CHECK(fy1.coeff(Monomial({1, 0, 0, 0, 1, 0})) == doctest::Approx(0.0));
  CHECK(fy2.coeff(Monomial({0, 1, 0, 0, 0, 1})) == doctest::Approx(p.h));
  CHECK(fy2.coeff(Monomial({0, 1, 0, 0, 1, 0})) == doctest::Approx(0.0));
}

TEST_CASE("model: the circle is conserved exactly") {
  for (double phi : {0.0, M_PI / 2, M_PI}) {
    PolySystem sys = build_system(params(1.3, 0.7, 0.3, 0.02, phi));
    REQUIRE(sys.constraints.size() == 1);
    CHECK(lie_derivative(sys.constraints[0], sys.field).is_zero());
  }
}

TEST_CASE("model: parity equivariance always; quarter turn at phi in {0, pi}") {
  PolySystem s0 = build_system(params(1.1, 0.5, 0.2, 0.01, 0.0));
  CHECK(is_equivariant(s0.field, negate_oscillators(6)));
  CHECK(is_equivariant(s0.field, quarter_turn(6, false)));
  CHECK_FALSE(is_equivariant(s0.field, quarter_turn(6, true)));

  PolySystem spi = build_system(params(1.1, 0.5, 0.2, 0.01, M_PI));
  CHECK(is_equivariant(spi.field, negate_oscillators(6)));
  CHECK(is_equivariant(spi.field, quarter_turn(6, true)));
  CHECK_FALSE(is_equivariant(spi.field, quarter_turn(6, false)));

  PolySystem shalf = build_system(params(1.1, 0.5, 0.2, 0.01, M_PI / 2));
  CHECK(is_equivariant(shalf.field, negate_oscillators(6)));
  CHECK_FALSE(is_equivariant(shalf.field, quarter_turn(6, false)));
  CHECK_FALSE(is_equivariant(shalf.field, quarter_turn(6, true)));
}

TEST_CASE("model: r = 0 decouples the oscillators") {
  PolySystem sys = build_system(params(2.0, 0.3, 0.0));
  std::vector<int> osc2 = {1, 3};
  for (const auto& [m, c] : sys.field[2].terms()) CHECK(m.degree_over(osc2) == 0);
  std::vector<int> osc1 = {0, 2};
  for (const auto& [m, c] : sys.field[3].terms()) CHECK(m.degree_over(osc1) == 0);
}

TEST_CASE("model: gamma = 0 with phi = 0 reduces to four variables") {
  PolySystem sys = build_system(params(0.0, 0.5, 0.2, 0.01, 0.0));
  CHECK(sys.nvars == 4);
  CHECK(sys.constraints.empty());
  // the drive drops out entirely: linear field
  for (const auto& f : sys.field) CHECK(f.degree() <= 1);
  // gamma = 0 but phi != 0 keeps the six-variable form
  CHECK(build_system(params(0.0, 0.5, 0.2, 0.01, M_PI)).nvars == 6);
}

TEST_CASE("model: quantity of interest") {
  Polynomial phi6 = build_phi(6);
  Eigen::VectorXd z(6);
  z << 1, 1, 0, 0, 0.3, 0.9;
  CHECK(phi6.eval(z) == doctest::Approx(2.0));
  CHECK(phi6.eval(Eigen::VectorXd::Zero(6)) == doctest::Approx(0.0));
  Eigen::VectorXd zn = z;
  zn[0] = -z[0];
  zn[1] = -z[1];
  CHECK(phi6.eval(zn) == doctest::Approx(phi6.eval(z)));
}

TEST_CASE("model: resonance frequencies") {
  auto rf = resonance_frequencies(params(0, 0, 0.0, 0.0));
  CHECK(rf.center == doctest::Approx(2.0));
  CHECK(rf.lower == doctest::Approx(2.0));
  CHECK(rf.upper == doctest::Approx(2.0));

  auto rf2 = resonance_frequencies(params(0, 0, 0.2, 0.01));
  const double expect2 = 2.0 * std::sqrt(1.0 + (0.04 - 0.0001) / 4.0);
  CHECK(rf2.center == doctest::Approx(expect2).epsilon(1e-12));
  CHECK(std::abs(rf2.center - 2.00997) < 1e-3);

  auto rf3 = resonance_frequencies(params(0, 0, 0.4, 0.01));
  const double expect3 = 2.0 * std::sqrt(1.0 + (0.16 - 0.0001) / 4.0);
  CHECK(rf3.center == doctest::Approx(expect3).epsilon(1e-12));
  CHECK(std::abs(rf3.center - 2.03937) < 3e-4);
  CHECK(rf3.lower == doctest::Approx(expect3 - 0.4));
  CHECK(rf3.upper == doctest::Approx(expect3 + 0.4));

  OscillatorParams bad = params(0, 0, 0.0, 3.0);
  CHECK_THROWS_AS(resonance_frequencies(bad), std::domain_error);
}

TEST_CASE("model: parameter validation") {
  OscillatorParams p = params(1, 0.5);
  p.h = 1.5;
  CHECK_THROWS_AS(build_system(p), std::invalid_argument);
  p = params(1, 0.5);
  p.omega0 = 0;
  CHECK_THROWS_AS(build_system(p), std::invalid_argument);
}
