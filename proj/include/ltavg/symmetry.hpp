#pragma once

#include <optional>
#include <vector>

#include "ltavg/poly.hpp"

namespace ltavg {

/// Linear variable substitution x_i -> sign[i] * x_{perm[i]}, i.e. a signed
/// permutation of coordinates. These are exactly the symmetries the oscillator
/// system exhibits, and they map monomials to signed monomials.
struct SignedVarMap {
  std::vector<int> perm;
  std::vector<int> sign;  // +1 / -1

  int nvars() const { return static_cast<int>(perm.size()); }

  static SignedVarMap identity(int nvars) {
    SignedVarMap m;
    m.perm.resize(nvars);
    m.sign.assign(nvars, 1);
    for (int i = 0; i < nvars; ++i) m.perm[i] = i;
    return m;
  }

  bool is_identity() const {
    for (int i = 0; i < nvars(); ++i)
      if (perm[i] != i || sign[i] != 1) return false;
    return true;
  }

  /// this followed by other: (other ∘ this)(x)_i evaluates this map first.
  SignedVarMap compose(const SignedVarMap& other) const;

  /// Image of a monomial: m(Mx) = sgn * (monomial with permuted exponents).
  std::pair<Monomial, int> apply(const Monomial& m) const;
};

/// Substitutes x_i -> sign[i]*x_{perm[i]} into p, returning p(Mx).
template <typename Scalar>
PolynomialT<Scalar> apply_map(const PolynomialT<Scalar>& p, const SignedVarMap& map) {
  if (map.nvars() != p.nvars()) throw std::invalid_argument("apply_map: nvars mismatch");
  PolynomialT<Scalar> out(p.nvars());
  for (const auto& [m, c] : p.terms()) {
    auto [img, sgn] = map.apply(m);
    out.add_term(img, c * Scalar(sgn));
  }
  return out;
}

/// Cyclic symmetry group generated by one signed permutation; order 1, 2 or 4
/// in this artifact. elements[0] is the identity.
struct CyclicGroup {
  std::vector<SignedVarMap> elements;

  int order() const { return static_cast<int>(elements.size()); }
  static CyclicGroup trivial(int nvars) { return CyclicGroup{{SignedVarMap::identity(nvars)}}; }
  static CyclicGroup generated_by(const SignedVarMap& g, int max_order = 8);
};

/// Exact coefficient-level check that p(Mx) == p(x).
bool is_invariant(const Polynomial& p, const SignedVarMap& map, double tol = 1e-12);

/// Exact equivariance check for a vector field: f_i(Mx) == sign[i] f_{perm[i]}(x).
bool is_equivariant(const std::vector<Polynomial>& field, const SignedVarMap& map,
                    double tol = 1e-12);

/// Orbit of a monomial under the group, with the sign picked up at each power
/// of the generator. members[k] is (image under elements[k], sign).
struct MonomialOrbit {
  Monomial representative;              // grlex-least monomial of the orbit
  std::vector<std::pair<Monomial, int>> members;  // indexed by group element
  bool null_class = false;              // some element maps rep -> -rep
};

MonomialOrbit orbit_of(const Monomial& m, const CyclicGroup& g);

/// Representative monomial and transported sign: the grlex-least image of m
/// over the group, and the sign s with  m == s * (that image as it appears in
/// any invariant polynomial's transport). For a null class, sign is 0.
std::pair<Monomial, int> orbit_representative(const Monomial& m, const CyclicGroup& g);

/// One basis vector of an isotypic component: a short signed/complex
/// combination of monomials, stored as a polynomial.
struct IsotypicBlocks {
  // Real blocks: generator eigenvalue +1 and (for order >= 2) -1.
  std::vector<Polynomial> plus;
  std::vector<Polynomial> minus;
  // Complex block (order 4 only): generator eigenvalue +i.
  std::vector<CPolynomial> cplx;
};

/// Splits a monomial list into isotypic components of the cyclic group.
/// The union of blocks spans the same space; each block is internally
/// orthogonal to the others under any invariant quadratic form.
IsotypicBlocks isotypic_split(const std::vector<Monomial>& monos, const CyclicGroup& g);

}  // namespace ltavg
