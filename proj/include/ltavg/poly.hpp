#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace ltavg {

/// Coefficients with magnitude at or below this are pruned from polynomials.
inline constexpr double kCoeffZeroTol = 1e-14;

/// Exponent vector of a single monomial. The length is the ambient variable
/// count; total degree is the sum of exponents.
class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exps) : e_(std::move(exps)) {
    for (int e : e_)
      if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
  }

  static Monomial unit(int nvars) { return Monomial(std::vector<int>(nvars, 0)); }
  static Monomial var(int nvars, int index, int power = 1) {
    std::vector<int> e(nvars, 0);
    e.at(index) = power;
    return Monomial(std::move(e));
  }

  int nvars() const { return static_cast<int>(e_.size()); }
  int degree() const { return std::accumulate(e_.begin(), e_.end(), 0); }
  int exponent(int i) const { return e_[i]; }
  const std::vector<int>& exponents() const { return e_; }

  /// Total degree restricted to the given variable indices.
  int degree_over(std::span<const int> vars) const {
    int d = 0;
    for (int v : vars) d += e_[v];
    return d;
  }

  Monomial times(const Monomial& o) const {
    if (o.nvars() != nvars()) throw std::invalid_argument("Monomial::times: nvars mismatch");
    std::vector<int> e(e_);
    for (int i = 0; i < nvars(); ++i) e[i] += o.e_[i];
    return Monomial(std::move(e));
  }

  bool operator==(const Monomial& o) const { return e_ == o.e_; }
  bool operator!=(const Monomial& o) const { return !(*this == o); }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (int i = 0; i < nvars(); ++i) {
      if (e_[i] == 0) continue;
      if (!first) os << "*";
      os << "x" << (i + 1);
      if (e_[i] > 1) os << "^" << e_[i];
      first = false;
    }
    if (first) os << "1";
    return os.str();
  }

 private:
  std::vector<int> e_;
};

/// Graded lexicographic order used everywhere: lower total degree first, ties
/// broken so that x1 precedes x2 within a degree block.
struct GrlexLess {
  bool operator()(const Monomial& a, const Monomial& b) const {
    const int da = a.degree(), db = b.degree();
    if (da != db) return da < db;
    const auto& ea = a.exponents();
    const auto& eb = b.exponents();
    // a precedes b when a is lexicographically larger ((2,0) before (1,1)).
    return std::lexicographical_compare(eb.begin(), eb.end(), ea.begin(), ea.end());
  }
};

/// Sparse multivariate polynomial over real or complex coefficients.
/// Zero coefficients (magnitude <= kCoeffZeroTol) are never stored.
template <typename Scalar>
class PolynomialT {
 public:
  using TermMap = std::map<Monomial, Scalar, GrlexLess>;

  PolynomialT() = default;
  explicit PolynomialT(int nvars) : nvars_(nvars) {}

  static PolynomialT zero(int nvars) { return PolynomialT(nvars); }
  static PolynomialT constant(int nvars, Scalar c) {
    PolynomialT p(nvars);
    p.add_term(Monomial::unit(nvars), c);
    return p;
  }
  static PolynomialT variable(int nvars, int index) {
    PolynomialT p(nvars);
    p.add_term(Monomial::var(nvars, index), Scalar(1));
    return p;
  }
  static PolynomialT monomial(Monomial m, Scalar c) {
    PolynomialT p(m.nvars());
    p.add_term(std::move(m), c);
    return p;
  }

  int nvars() const { return nvars_; }
  bool is_zero() const { return terms_.empty(); }
  int num_terms() const { return static_cast<int>(terms_.size()); }
  int degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
    return d;
  }
  const TermMap& terms() const { return terms_; }

  Scalar coeff(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Scalar(0) : it->second;
  }

  void add_term(const Monomial& m, Scalar c) {
    if (m.nvars() != nvars_) throw std::invalid_argument("Polynomial::add_term: nvars mismatch");
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) <= kCoeffZeroTol) terms_.erase(it);
  }

  PolynomialT& operator+=(const PolynomialT& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  PolynomialT& operator-=(const PolynomialT& o) {
    check_same(o);
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  PolynomialT& operator*=(Scalar s) {
    if (std::abs(s) <= kCoeffZeroTol) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend PolynomialT operator+(PolynomialT a, const PolynomialT& b) { return a += b; }
  friend PolynomialT operator-(PolynomialT a, const PolynomialT& b) { return a -= b; }
  friend PolynomialT operator*(PolynomialT a, Scalar s) { return a *= s; }
  friend PolynomialT operator*(Scalar s, PolynomialT a) { return a *= s; }
  PolynomialT operator-() const {
    PolynomialT p(*this);
    for (auto& [m, c] : p.terms_) c = -c;
    return p;
  }

  friend PolynomialT operator*(const PolynomialT& a, const PolynomialT& b) {
    a.check_same(b);
    PolynomialT out(a.nvars_);
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma.times(mb), ca * cb);
    return out;
  }

  /// Formal partial derivative with respect to variable `var`.
  PolynomialT partial(int var) const {
    if (var < 0 || var >= nvars_) throw std::invalid_argument("partial: bad variable index");
    PolynomialT out(nvars_);
    for (const auto& [m, c] : terms_) {
      const int e = m.exponent(var);
      if (e == 0) continue;
      std::vector<int> exps = m.exponents();
      exps[var] -= 1;
      out.add_term(Monomial(std::move(exps)), c * Scalar(e));
    }
    return out;
  }

  template <typename Derived>
  Scalar eval(const Eigen::MatrixBase<Derived>& point) const {
    if (point.size() != nvars_) throw std::invalid_argument("eval: point dimension mismatch");
    Scalar total(0);
    for (const auto& [m, c] : terms_) {
      Scalar v = c;
      for (int i = 0; i < nvars_; ++i)
        for (int k = 0; k < m.exponent(i); ++k) v *= Scalar(point[i]);
      total += v;
    }
    return total;
  }

  /// Complex-conjugates all coefficients (no-op for real Scalar).
  PolynomialT conjugated() const {
    PolynomialT p(*this);
    if constexpr (!std::is_floating_point_v<Scalar>) {
      for (auto& [m, c] : p.terms_) c = std::conj(c);
    }
    return p;
  }

  std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      os << format_coeff(c);
      if (m.degree() > 0) os << "*" << m.str();
      first = false;
    }
    return os.str();
  }

 private:
  void check_same(const PolynomialT& o) const {
    if (o.nvars_ != nvars_) throw std::invalid_argument("Polynomial: nvars mismatch");
  }
  static std::string format_coeff(double c) {
    std::ostringstream os;
    os << c;
    return os.str();
  }
  static std::string format_coeff(std::complex<double> c) {
    std::ostringstream os;
    os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    return os.str();
  }

  int nvars_ = 0;
  TermMap terms_;
};

using Polynomial = PolynomialT<double>;
using CPolynomial = PolynomialT<std::complex<double>>;

inline CPolynomial to_complex(const Polynomial& p) {
  CPolynomial out(p.nvars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, std::complex<double>(c, 0.0));
  return out;
}

inline Polynomial real_part(const CPolynomial& p) {
  Polynomial out(p.nvars());
  for (const auto& [m, c] : p.terms()) out.add_term(m, c.real());
  return out;
}

template <typename Scalar>
PolynomialT<Scalar> add(const PolynomialT<Scalar>& a, const PolynomialT<Scalar>& b) {
  return a + b;
}
template <typename Scalar>
PolynomialT<Scalar> mul(const PolynomialT<Scalar>& a, const PolynomialT<Scalar>& b) {
  return a * b;
}
template <typename Scalar>
PolynomialT<Scalar> partial(const PolynomialT<Scalar>& p, int var) {
  return p.partial(var);
}

/// Directional derivative of V along a vector field: sum_i field[i] * dV/dx_i.
template <typename Scalar>
PolynomialT<Scalar> lie_derivative(const PolynomialT<Scalar>& v,
                                   std::span<const PolynomialT<Scalar>> field) {
  if (static_cast<int>(field.size()) != v.nvars())
    throw std::invalid_argument("lie_derivative: field length must equal nvars");
  PolynomialT<Scalar> out(v.nvars());
  for (int i = 0; i < v.nvars(); ++i) out += field[i] * v.partial(i);
  return out;
}

template <typename Scalar>
PolynomialT<Scalar> lie_derivative(const PolynomialT<Scalar>& v,
                                   const std::vector<PolynomialT<Scalar>>& field) {
  return lie_derivative(v, std::span<const PolynomialT<Scalar>>(field));
}

/// Ordered monomial list used as a Gram basis. Entries are distinct, sorted in
/// graded lexicographic order, and respect max_degree and the optional parity
/// restriction (even total degree over the masked variables).
struct MonomialBasis {
  std::vector<Monomial> entries;
  int max_degree = 0;
  std::optional<std::vector<int>> parity_mask;

  int size() const { return static_cast<int>(entries.size()); }
};

/// Enumerates all monomials in `nvars` variables of total degree <= max_degree
/// that satisfy `keep` (pass nullptr to keep everything), in graded-lex order.
std::vector<Monomial> enumerate_monomials(int nvars, int max_degree,
                                          const std::function<bool(const Monomial&)>& keep = {});

MonomialBasis basis(int nvars, int max_degree,
                    std::optional<std::vector<int>> parity_mask = std::nullopt);

}  // namespace ltavg
