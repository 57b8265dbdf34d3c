#include "ltavg/poly.hpp"

namespace ltavg {

namespace {

void enumerate_rec(int nvars, int var, int remaining, std::vector<int>& exps,
                   const std::function<bool(const Monomial&)>& keep,
                   std::vector<Monomial>& out) {
  if (var == nvars) {
    Monomial m(exps);
    if (!keep || keep(m)) out.push_back(std::move(m));
    return;
  }
  for (int e = 0; e <= remaining; ++e) {
    exps[var] = e;
    enumerate_rec(nvars, var + 1, remaining - e, exps, keep, out);
  }
  exps[var] = 0;
}

}  // namespace

std::vector<Monomial> enumerate_monomials(int nvars, int max_degree,
                                          const std::function<bool(const Monomial&)>& keep) {
  if (max_degree < 0) throw std::invalid_argument("enumerate_monomials: negative degree");
  std::vector<Monomial> out;
  std::vector<int> exps(nvars, 0);
  enumerate_rec(nvars, 0, max_degree, exps, keep, out);
  std::sort(out.begin(), out.end(), GrlexLess{});
  return out;
}

MonomialBasis basis(int nvars, int max_degree, std::optional<std::vector<int>> parity_mask) {
  MonomialBasis b;
  b.max_degree = max_degree;
  b.parity_mask = parity_mask;
  if (parity_mask) {
    std::span<const int> mask(*parity_mask);
    b.entries = enumerate_monomials(
        nvars, max_degree, [mask](const Monomial& m) { return m.degree_over(mask) % 2 == 0; });
  } else {
    b.entries = enumerate_monomials(nvars, max_degree);
  }
  return b;
}

}  // namespace ltavg
