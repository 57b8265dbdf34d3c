#include "ltavg/symmetry.hpp"

#include <cmath>

namespace ltavg {

SignedVarMap SignedVarMap::compose(const SignedVarMap& other) const {
  if (other.nvars() != nvars()) throw std::invalid_argument("compose: nvars mismatch");
  SignedVarMap out;
  out.perm.resize(nvars());
  out.sign.resize(nvars());
  for (int i = 0; i < nvars(); ++i) {
    out.perm[i] = other.perm[perm[i]];
    out.sign[i] = sign[i] * other.sign[perm[i]];
  }
  return out;
}

std::pair<Monomial, int> SignedVarMap::apply(const Monomial& m) const {
  if (m.nvars() != nvars()) throw std::invalid_argument("SignedVarMap::apply: nvars mismatch");
  std::vector<int> exps(nvars(), 0);
  int sgn = 1;
  for (int i = 0; i < nvars(); ++i) {
    const int e = m.exponent(i);
    if (e == 0) continue;
    exps[perm[i]] += e;
    if (sign[i] < 0 && (e % 2) == 1) sgn = -sgn;
  }
  return {Monomial(std::move(exps)), sgn};
}

CyclicGroup CyclicGroup::generated_by(const SignedVarMap& g, int max_order) {
  CyclicGroup grp;
  grp.elements.push_back(SignedVarMap::identity(g.nvars()));
  SignedVarMap cur = g;
  for (int k = 1; k <= max_order; ++k) {
    if (cur.is_identity()) return grp;
    grp.elements.push_back(cur);
    cur = cur.compose(g);
  }
  throw std::invalid_argument("CyclicGroup: generator order exceeds max_order");
}

bool is_invariant(const Polynomial& p, const SignedVarMap& map, double tol) {
  Polynomial diff = apply_map(p, map) - p;
  for (const auto& [m, c] : diff.terms())
    if (std::abs(c) > tol) return false;
  return true;
}

bool is_equivariant(const std::vector<Polynomial>& field, const SignedVarMap& map, double tol) {
  const int n = static_cast<int>(field.size());
  if (map.nvars() != n) return false;
  for (int i = 0; i < n; ++i) {
    // d/dt of (Mx)_i is sign[i] * f_{perm[i]}(x); it must equal f_i(Mx).
    Polynomial lhs = apply_map(field[i], map);
    Polynomial rhs = field[map.perm[i]] * static_cast<double>(map.sign[i]);
    Polynomial diff = lhs - rhs;
    for (const auto& [m, c] : diff.terms())
      if (std::abs(c) > tol) return false;
  }
  return true;
}

MonomialOrbit orbit_of(const Monomial& m, const CyclicGroup& g) {
  MonomialOrbit orb;
  orb.members.reserve(g.order());
  GrlexLess less;
  Monomial rep = m;
  for (const auto& el : g.elements) {
    auto [img, sgn] = el.apply(m);
    if (img == m && sgn < 0) orb.null_class = true;
    if (less(img, rep)) rep = img;
    orb.members.emplace_back(std::move(img), sgn);
  }
  orb.representative = rep;
  return orb;
}

std::pair<Monomial, int> orbit_representative(const Monomial& m, const CyclicGroup& g) {
  GrlexLess less;
  Monomial rep = m;
  int rep_sign = 1;
  bool null_class = false;
  for (const auto& el : g.elements) {
    auto [img, sgn] = el.apply(m);
    if (img == m && sgn < 0) null_class = true;
    if (less(img, rep)) {
      rep = img;
      rep_sign = sgn;
    }
  }
  if (null_class) return {rep, 0};
  return {rep, rep_sign};
}

namespace {

Polynomial combo(const std::vector<std::pair<Monomial, double>>& terms) {
  Polynomial p(terms.front().first.nvars());
  for (const auto& [m, c] : terms) p.add_term(m, c);
  return p;
}

}  // namespace

IsotypicBlocks isotypic_split(const std::vector<Monomial>& monos, const CyclicGroup& g) {
  IsotypicBlocks out;
  const int order = g.order();
  if (order == 1) {
    for (const auto& m : monos) out.plus.push_back(combo({{m, 1.0}}));
    return out;
  }
  if (order != 2 && order != 4)
    throw std::invalid_argument("isotypic_split: only cyclic orders 1, 2, 4 supported");

  GrlexLess less;
  const double s2 = std::sqrt(0.5);
  for (const auto& m : monos) {
    auto [m1, s1] = g.elements[1].apply(m);
    if (m1 == m) {
      // Fixed up to sign: direct eigenvector of the generator.
      if (s1 > 0)
        out.plus.push_back(combo({{m, 1.0}}));
      else
        out.minus.push_back(combo({{m, 1.0}}));
      continue;
    }
    if (less(m1, m)) continue;  // orbit handled from its least monomial

    auto [m2, s2full] = (order == 4) ? g.elements[2].apply(m) : std::pair<Monomial, int>{m, 1};
    if (m2 == m) {
      // Two-monomial orbit. g^2 m = +m splits into real +/- vectors;
      // g^2 m = -m carries the complex pair.
      if (s2full > 0 || order == 2) {
        out.plus.push_back(combo({{m, s2}, {m1, s2 * s1}}));
        out.minus.push_back(combo({{m, s2}, {m1, -s2 * s1}}));
      } else {
        CPolynomial q(m.nvars());
        q.add_term(m, {s2, 0.0});
        q.add_term(m1, {0.0, -s2 * s1});
        out.cplx.push_back(std::move(q));
      }
      continue;
    }
    // Four-monomial orbit (order 4 only): character projections.
    auto [m3, s3] = g.elements[3].apply(m);
    if (less(m2, m) || less(m3, m)) continue;
    const std::vector<std::pair<Monomial, int>> orbit = {
        {m, 1}, {m1, s1}, {m2, s2full}, {m3, s3}};
    Polynomial vp(m.nvars()), vm(m.nvars());
    CPolynomial vc(m.nvars());
    const std::complex<double> mi(0.0, -1.0);
    std::complex<double> chi(1.0, 0.0);
    for (int k = 0; k < 4; ++k) {
      const double c = 0.5 * orbit[k].second;
      vp.add_term(orbit[k].first, c);
      vm.add_term(orbit[k].first, (k % 2 == 0) ? c : -c);
      vc.add_term(orbit[k].first, chi * c);
      chi *= mi;
    }
    out.plus.push_back(std::move(vp));
    out.minus.push_back(std::move(vm));
    out.cplx.push_back(std::move(vc));
  }
  return out;
}

}  // namespace ltavg
