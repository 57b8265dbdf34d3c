#include <random>

#include "doctest.h"
#include "ltavg/poly.hpp"

using namespace ltavg;

namespace {

Polynomial var(int n, int i) { return Polynomial::variable(n, i); }

long long binom(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

Polynomial random_poly(std::mt19937_64& rng, int nvars, int deg, double density = 0.35) {
  std::uniform_real_distribution<double> uni(-2, 2);
  std::uniform_real_distribution<double> pick(0, 1);
  Polynomial p(nvars);
  for (const auto& m : enumerate_monomials(nvars, deg))
    if (pick(rng) < density) p.add_term(m, uni(rng));
  return p;
}

}  // namespace

TEST_CASE("poly: addition merges and prunes") {
  auto x1 = var(2, 0), x2 = var(2, 1);
  CHECK((x1 * x1 + (-(x1 * x1))).is_zero());
  Polynomial s = (x1 + x2) + x1;
  CHECK(s.coeff(Monomial({1, 0})) == doctest::Approx(2.0));
  CHECK(s.coeff(Monomial({0, 1})) == doctest::Approx(1.0));
  CHECK(s.num_terms() == 2);
  Polynomial t = x1 * x1 * x2 + (x1 * x1 * x2) * 3.0;
  CHECK(t.coeff(Monomial({2, 1})) == doctest::Approx(4.0));
}

TEST_CASE("poly: products") {
  auto x1 = var(2, 0), x2 = var(2, 1);
  Polynomial p = (x1 + x2) * (x1 - x2);
  CHECK(p.coeff(Monomial({2, 0})) == doctest::Approx(1.0));
  CHECK(p.coeff(Monomial({0, 2})) == doctest::Approx(-1.0));
  CHECK(p.num_terms() == 2);

  std::mt19937_64 rng7(7);
  Polynomial q = random_poly(rng7, 2, 3);
  Polynomial one = Polynomial::constant(2, 1.0);
  Polynomial qq = q * one;
  CHECK((qq - q).is_zero());

  // unit-circle value
  auto x3 = var(6, 4), x4 = var(6, 5);
  Polynomial circ = (x3 * x3 + x4 * x4) * Polynomial::constant(6, 1.0);
  Eigen::VectorXd z(6);
  z << 0, 0, 0, 0, 0.6, 0.8;
  CHECK(circ.eval(z) == doctest::Approx(1.0));
}

TEST_CASE("poly: partial derivatives") {
  auto x1 = var(2, 0), x2 = var(2, 1);
  Polynomial p = x1 * x1 * x2;
  Polynomial d = p.partial(0);
  CHECK(d.coeff(Monomial({1, 1})) == doctest::Approx(2.0));
  CHECK(d.num_terms() == 1);
  CHECK((x1 * x1).partial(1).is_zero());
  Polynomial x14 = x1 * x1 * x1 * x1;
  Eigen::Vector2d at(2.0, 0.0);
  CHECK(x14.partial(0).eval(at) == doctest::Approx(32.0));
}

TEST_CASE("poly: lie derivative") {
  auto x = var(1, 0);
  std::vector<Polynomial> decay = {-x};
  Polynomial v = x * x * 0.5;
  Polynomial l = lie_derivative(v, decay);
  CHECK(l.coeff(Monomial({2})) == doctest::Approx(-1.0));
  CHECK(l.num_terms() == 1);

  Polynomial c = Polynomial::constant(1, 3.0);
  CHECK(lie_derivative(c, decay).is_zero());

  // circle conservation for the rotation subsystem
  const double gamma = 1.7;
  auto x3 = var(2, 0), x4 = var(2, 1);
  std::vector<Polynomial> rot = {x4 * gamma, -(x3 * gamma)};
  CHECK(lie_derivative(x3 * x3 + x4 * x4, rot).is_zero());
}

TEST_CASE("poly: basis enumeration and order") {
  MonomialBasis b1 = basis(2, 1);
  REQUIRE(b1.size() == 3);
  CHECK(b1.entries[0] == Monomial({0, 0}));
  CHECK(b1.entries[1] == Monomial({1, 0}));
  CHECK(b1.entries[2] == Monomial({0, 1}));

  CHECK(basis(6, 4).size() == 210);  // C(10, 4)

  MonomialBasis bp = basis(2, 2, std::vector<int>{0});
  REQUIRE(bp.size() == 4);
  CHECK(bp.entries[0] == Monomial({0, 0}));
  CHECK(bp.entries[1] == Monomial({0, 1}));
  CHECK(bp.entries[2] == Monomial({2, 0}));
  CHECK(bp.entries[3] == Monomial({0, 2}));
}

TEST_CASE("poly: basis size equals the multiset count") {
  for (int n = 1; n <= 5; ++n)
    for (int d = 0; d <= 5; ++d) CHECK(basis(n, d).size() == binom(n + d, d));
}

TEST_CASE("poly: eval is multiplicative on random inputs") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uni(-1, 1);
  for (int t = 0; t < 60; ++t) {
    const int n = 1 + static_cast<int>(rng() % 6);
    Polynomial a = random_poly(rng, n, 4), b = random_poly(rng, n, 4);
    Eigen::VectorXd z = Eigen::VectorXd::NullaryExpr(n, [&]() { return uni(rng); });
    const double lhs = (a * b).eval(z);
    const double rhs = a.eval(z) * b.eval(z);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("poly: lie derivative is linear in V") {
  std::mt19937_64 rng(43);
  const int n = 3;
  std::vector<Polynomial> field;
  for (int i = 0; i < n; ++i) field.push_back(random_poly(rng, n, 2));
  for (int t = 0; t < 20; ++t) {
    Polynomial v1 = random_poly(rng, n, 3), v2 = random_poly(rng, n, 3);
    const double a = 1.25, b = -0.75;
    Polynomial lhs = lie_derivative(v1 * a + v2 * b, field);
    Polynomial rhs = lie_derivative(v1, field) * a + lie_derivative(v2, field) * b;
    CHECK((lhs - rhs).is_zero());
  }
}

TEST_CASE("poly: partial then term-wise integration recovers p") {
  std::mt19937_64 rng(44);
  for (int t = 0; t < 20; ++t) {
    const int n = 2 + static_cast<int>(rng() % 3);
    const int v = static_cast<int>(rng() % n);
    Polynomial p = random_poly(rng, n, 4);
    Polynomial d = p.partial(v);
    Polynomial rebuilt(n);
    for (const auto& [m, c] : d.terms()) {
      std::vector<int> e = m.exponents();
      e[v] += 1;
      rebuilt.add_term(Monomial(e), c / e[v]);
    }
    // p minus its v-independent part
    Polynomial expect(n);
    for (const auto& [m, c] : p.terms())
      if (m.exponent(v) > 0) expect.add_term(m, c);
    Polynomial diff = rebuilt - expect;
    for (const auto& [m, c] : diff.terms()) CHECK(std::abs(c) < 1e-12);
  }
}

TEST_CASE("poly: dimension mismatches throw") {
  CHECK_THROWS_AS(var(2, 0) + var(3, 0), std::invalid_argument);
  CHECK_THROWS_AS(var(2, 0) * var(3, 0), std::invalid_argument);
  std::vector<Polynomial> field = {var(2, 0)};
  CHECK_THROWS_AS(lie_derivative(var(2, 0), field), std::invalid_argument);
}
