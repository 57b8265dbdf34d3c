#include "doctest.h"
#include "ltavg/model.hpp"
#include "ltavg/symmetry.hpp"

using namespace ltavg;

TEST_CASE("symmetry: signed map application and composition") {
  SignedVarMap t = quarter_turn(4, false);
  // x1 -> x2 under the substitution
  auto [m1, s1] = t.apply(Monomial({1, 0, 0, 0}));
  CHECK(m1 == Monomial({0, 1, 0, 0}));
  CHECK(s1 == 1);
  auto [m2, s2] = t.apply(Monomial({0, 1, 0, 0}));  // x2 -> -x1
  CHECK(m2 == Monomial({1, 0, 0, 0}));
  CHECK(s2 == -1);
  // order 4
  CyclicGroup g = CyclicGroup::generated_by(t);
  CHECK(g.order() == 4);
  CHECK(CyclicGroup::generated_by(negate_oscillators(4)).order() == 2);
  SignedVarMap t2 = t.compose(t);
  // t^2 is the parity map
  for (int i = 0; i < 4; ++i) {
    CHECK(t2.perm[i] == i);
    CHECK(t2.sign[i] == -1);
  }
}

TEST_CASE("symmetry: apply_map substitutes correctly") {
  auto x1 = Polynomial::variable(4, 0);
  auto x2 = Polynomial::variable(4, 1);
  SignedVarMap t = quarter_turn(4, false);
  // (x1)(Mx) = x2, (x2)(Mx) = -x1
  CHECK((apply_map(x1, t) - x2).is_zero());
  CHECK((apply_map(x2, t) + x1).is_zero());
  Polynomial phi = x1 * x1 + x2 * x2;
  CHECK(is_invariant(phi, t));
}

TEST_CASE("symmetry: isotypic split spans and eigen-structure") {
  CyclicGroup g4 = CyclicGroup::generated_by(quarter_turn(4, false));
  auto monos = enumerate_monomials(4, 3);
  IsotypicBlocks blocks = isotypic_split(monos, g4);
  const size_t total = blocks.plus.size() + blocks.minus.size() + 2 * blocks.cplx.size();
  CHECK(total == monos.size());

  const SignedVarMap& t = g4.elements[1];
  for (const auto& p : blocks.plus) CHECK((apply_map(p, t) - p).is_zero());
  for (const auto& p : blocks.minus) CHECK((apply_map(p, t) + p).is_zero());
  for (const auto& q : blocks.cplx) {
    CPolynomial img = apply_map(q, t);
    CPolynomial expect = q * std::complex<double>(0, 1);
    CHECK((img - expect).is_zero());
  }
}

TEST_CASE("symmetry: parity split is even/odd") {
  CyclicGroup g2 = CyclicGroup::generated_by(negate_oscillators(6));
  auto monos = enumerate_monomials(6, 2);
  IsotypicBlocks blocks = isotypic_split(monos, g2);
  CHECK(blocks.cplx.empty());
  CHECK(blocks.plus.size() + blocks.minus.size() == monos.size());
  std::vector<int> osc = {0, 1, 2, 3};
  for (const auto& p : blocks.plus)
    for (const auto& [m, c] : p.terms()) CHECK(m.degree_over(osc) % 2 == 0);
  for (const auto& p : blocks.minus)
    for (const auto& [m, c] : p.terms()) CHECK(m.degree_over(osc) % 2 == 1);
}

TEST_CASE("symmetry: orbit representatives transport signs consistently") {
  CyclicGroup g4 = CyclicGroup::generated_by(quarter_turn(4, false));
  // x1^2 orbit: {x1^2, x2^2}; invariant combos have equal coefficients
  auto [rep, sgn] = orbit_representative(Monomial({0, 2, 0, 0}), g4);
  CHECK(rep == Monomial({2, 0, 0, 0}));
  CHECK(sgn == 1);
  // x1 x2 maps to -x1 x2 under the quarter turn: null class for rows
  auto [rep2, sgn2] = orbit_representative(Monomial({1, 1, 0, 0}), g4);
  CHECK(sgn2 == 0);
}
