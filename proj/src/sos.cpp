#include "ltavg/sos.hpp"

#include <Eigen/LU>
#include <cmath>

namespace ltavg {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
using cxd = std::complex<double>;
}  // namespace

template <typename Scalar>
PolynomialT<Scalar> reduce_circle(const PolynomialT<Scalar>& p, int i3, int i4) {
  PolynomialT<Scalar> cur = p;
  while (true) {
    const Monomial* found = nullptr;
    Scalar coeff{};
    for (const auto& [m, c] : cur.terms()) {
      if (m.exponent(i4) >= 2) {
        found = &m;
        coeff = c;
        break;
      }
    }
    if (!found) return cur;
    std::vector<int> base = found->exponents();
    base[i4] -= 2;
    std::vector<int> with3 = base;
    with3[i3] += 2;
    Monomial orig = *found;
    cur.add_term(orig, -coeff);               // remove x4^2 * rest
    cur.add_term(Monomial(base), coeff);      // + rest
    cur.add_term(Monomial(with3), -coeff);    // - x3^2 * rest
  }
}

template Polynomial reduce_circle<double>(const Polynomial&, int, int);
template CPolynomial reduce_circle<std::complex<double>>(const CPolynomial&, int, int);

std::pair<Polynomial, Polynomial> divide_circle(const Polynomial& p, int i3, int i4) {
  Polynomial q(p.nvars());
  Polynomial cur = p;
  while (true) {
    const Monomial* found = nullptr;
    double coeff = 0;
    for (const auto& [m, c] : cur.terms()) {
      if (m.exponent(i4) >= 2) {
        found = &m;
        coeff = c;
        break;
      }
    }
    if (!found) return {q, cur};
    std::vector<int> base = found->exponents();
    base[i4] -= 2;
    std::vector<int> with3 = base;
    with3[i3] += 2;
    // x4^2 rest = (x3^2 + x4^2 - 1) rest - x3^2 rest + rest
    q.add_term(Monomial(base), coeff);
    Monomial orig = *found;
    cur.add_term(orig, -coeff);
    cur.add_term(Monomial(base), coeff);
    cur.add_term(Monomial(with3), -coeff);
  }
}

SosProgram make_program(const PolySystem& system, const Polynomial& phi, int aux_degree,
                        int multiplier_degree, const SosOptions& options) {
  if (aux_degree < 2 || aux_degree % 2 != 0)
    throw std::invalid_argument("make_program: aux_degree must be even and >= 2");
  if (multiplier_degree < 0) throw std::invalid_argument("make_program: negative multiplier degree");
  SosProgram prog;
  prog.system = system;
  prog.phi = phi;
  prog.aux_degree = aux_degree;
  prog.multiplier_degree = multiplier_degree;
  prog.options = options;
  return prog;
}

SosProgram make_program(const OscillatorParams& params, int aux_degree, int multiplier_degree,
                        const SosOptions& options) {
  PolySystem sys = build_system(params);
  return make_program(sys, build_phi(sys.nvars), aux_degree, multiplier_degree, options);
}

SosProgram symmetry_reduce(SosProgram program) {
  const int n = program.system.nvars;
  auto verifies = [&](const SignedVarMap& m) {
    if (!is_equivariant(program.system.field, m)) return false;
    if (!is_invariant(program.phi, m)) return false;
    for (const auto& c : program.system.constraints)
      if (!is_invariant(c, m)) return false;
    return true;
  };

  std::vector<SignedVarMap> candidates;
  auto negate_all = [&]() {
    SignedVarMap m = SignedVarMap::identity(n);
    for (int i = 0; i < n; ++i) m.sign[i] = -1;
    return m;
  };
  if (program.options.symmetry == SosOptions::Symmetry::Auto) {
    if (n >= 4) {
      candidates.push_back(quarter_turn(n, false));
      if (n >= 6) candidates.push_back(quarter_turn(n, true));
      candidates.push_back(negate_oscillators(n));
    }
    candidates.push_back(negate_all());
  } else if (program.options.symmetry == SosOptions::Symmetry::Parity) {
    if (n >= 4) candidates.push_back(negate_oscillators(n));
    candidates.push_back(negate_all());
  }

  for (const auto& cand : candidates) {
    if (verifies(cand)) {
      program.symmetry.group = CyclicGroup::generated_by(cand);
      program.symmetry.name = program.symmetry.group.order() == 4 ? "z4" : "parity";
      return program;
    }
  }
  program.symmetry.group = CyclicGroup::trivial(n);
  program.symmetry.name = "none";
  program.symmetry_warning = program.options.symmetry != SosOptions::Symmetry::None;
  return program;
}

namespace {

// Accumulates coefficient-matching rows keyed by orbit-representative
// monomials, transporting signs through the symmetry group.
class RowBuilder {
 public:
  explicit RowBuilder(const CyclicGroup& g) : group_(g) {}

  // (row id, transported sign); sign 0 marks a null class.
  std::pair<int, int> rep_row(const Monomial& m) {
    auto it = cache_.find(m);
    if (it == cache_.end()) {
      it = cache_.emplace(m, orbit_representative(m, group_)).first;
    }
    const auto& [rep, sgn] = it->second;
    if (sgn == 0) return {-1, 0};
    auto rit = row_ids_.find(rep);
    if (rit == row_ids_.end()) {
      rit = row_ids_.emplace(rep, static_cast<int>(row_monos_.size())).first;
      row_monos_.push_back(rep);
      bvals_.push_back(0.0);
    }
    return {rit->second, sgn};
  }

  void add_psd(const Monomial& m, double value, int col) {
    auto [rid, s] = rep_row(m);
    if (s == 0) {
      if (std::abs(value) > 1e-6)
        throw std::logic_error("sos assembly: non-invariant Gram contribution");
      return;
    }
    psd_trip_.emplace_back(rid, col, value * s);
  }

  void add_free(const Monomial& m, double value, int col) {
    auto [rid, s] = rep_row(m);
    if (s == 0) {
      if (std::abs(value) > 1e-6)
        throw std::logic_error("sos assembly: non-invariant free contribution");
      return;
    }
    free_trip_.emplace_back(rid, col, value * s);
  }

  void add_b(const Monomial& m, double value) {
    auto [rid, s] = rep_row(m);
    if (s == 0) {
      if (std::abs(value) > 1e-6) throw std::logic_error("sos assembly: non-invariant rhs");
      return;
    }
    bvals_[rid] += value * s;
  }

  // Adds a synthetic row (no monomial transport); entries via raw_entry.
  void raw_row(const Monomial& tag, double bval) {
    row_monos_.push_back(tag);
    bvals_.push_back(bval);
  }
  void raw_entry(int row, int col, double value) { psd_trip_.emplace_back(row, col, value); }

  const std::vector<Monomial>& row_monos() const { return row_monos_; }
  const std::vector<Eigen::Triplet<double>>& psd_trips() const { return psd_trip_; }
  const std::vector<Eigen::Triplet<double>>& free_trips() const { return free_trip_; }
  std::vector<double>& bvals() { return bvals_; }

 private:
  const CyclicGroup& group_;
  std::map<Monomial, std::pair<Monomial, int>, GrlexLess> cache_;
  std::map<Monomial, int, GrlexLess> row_ids_;
  std::vector<Monomial> row_monos_;
  std::vector<double> bvals_;
  std::vector<Eigen::Triplet<double>> psd_trip_, free_trip_;
};

// Emits the coefficient rows of transform(basis_k * conj(basis_l)) against
// the svec variables of one Gram block. The transform carries the block's
// role: identity for the certificate, the negated Lie derivative for the
// auxiliary function V, multiplication by the circle for an SOS multiplier.
void emit_gram_block(RowBuilder& bld, const GramBlockBasis& bb, int svec_offset,
                     const std::function<CPolynomial(CPolynomial)>& transform) {
  const int d = static_cast<int>(bb.basis.size());
  auto local_index = [&](int k, int l) {
    // within-block svec position of the (k, l) pair, k <= l
    if (bb.type == BlockType::Real) return l * (l + 1) / 2 + k;
    return l * l + 2 * k;  // diag at l*l + 2l; re/im at l*l + 2k (+1)
  };
  for (int l = 0; l < d; ++l) {
    for (int k = 0; k <= l; ++k) {
      CPolynomial prod = transform(bb.basis[k] * bb.basis[l].conjugated());
      const int base = svec_offset + local_index(k, l);
      for (const auto& [m, c] : prod.terms()) {
        if (k == l) {
          if (std::abs(c.imag()) > 1e-9)
            throw std::logic_error("sos assembly: diagonal Gram product not real");
          bld.add_psd(m, c.real(), base);
        } else if (bb.type == BlockType::Real) {
          if (std::abs(c.imag()) > 1e-9)
            throw std::logic_error("sos assembly: real-block Gram product not real");
          bld.add_psd(m, kSqrt2 * c.real(), base);
        } else {
          bld.add_psd(m, kSqrt2 * c.real(), base);
          bld.add_psd(m, -kSqrt2 * c.imag(), base + 1);
        }
      }
    }
  }
}

// Invariant class polynomials (group orbit averages) over candidate monomials.
std::vector<Polynomial> invariant_classes(const std::vector<Monomial>& cands,
                                          const CyclicGroup& g) {
  std::vector<Polynomial> out;
  for (const auto& m : cands) {
    MonomialOrbit orb = orbit_of(m, g);
    if (orb.null_class) continue;
    if (!(orb.representative == m)) continue;  // process each orbit once
    Polynomial p(m.nvars());
    for (const auto& [img, sgn] : orb.members) p.add_term(img, sgn / double(g.order()));
    if (!p.is_zero()) out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

AssembledSdp assemble(const SosProgram& program_in) {
  SosProgram prog = program_in;
  if (prog.symmetry.group.elements.empty()) prog = symmetry_reduce(std::move(prog));
  const PolySystem& sys = prog.system;
  const int n = sys.nvars;
  const CyclicGroup& group = prog.symmetry.group;
  const bool circle = sys.has_circle();
  const int i3 = n - 2, i4 = n - 1;
  const bool quotient = circle && !prog.options.force_explicit_multiplier &&
                        !prog.options.multiplier_in_sos &&
                        prog.multiplier_degree == prog.aux_degree - 2;
  const bool explicit_s = circle && !quotient;
  const bool lambda_form = prog.fixed_bound.has_value() && prog.options.aux_in_sos;

  int deg_f = 0;
  for (const auto& f : sys.field) deg_f = std::max(deg_f, f.degree());
  int deg_expr = std::max(prog.phi.degree(), prog.aux_degree - 1 + deg_f);
  if (explicit_s) deg_expr = std::max(deg_expr, prog.multiplier_degree + 2);
  const int db = deg_expr / 2;

  auto canon = [&](const Monomial& m) { return !quotient || m.exponent(i4) <= 1; };

  // Auxiliary-function parameterization: either a PSD Gram form (default) or
  // free invariant coefficient classes.
  std::vector<Polynomial> v_basis;
  IsotypicBlocks v_iso;
  if (prog.options.aux_in_sos) {
    // Basis entries must carry at least one oscillator variable. Pure-trig
    // entries add Casimir-type null directions (combinations congruent to a
    // constant on the circle have vanishing Lie derivative) that strip the
    // problem of a strictly feasible dual point, and a trig-only component of
    // V can never improve the bound.
    std::vector<int> osc_vars;
    for (int i = 0; i < std::min(n, 4); ++i) osc_vars.push_back(i);
    std::vector<Monomial> vg = enumerate_monomials(
        n, prog.aux_degree / 2, [&](const Monomial& m) {
          return m.degree() >= 1 && canon(m) &&
                 m.degree_over(std::span<const int>(osc_vars)) >= 1;
        });
    v_iso = isotypic_split(vg, group);
  } else {
    std::vector<Monomial> vc = enumerate_monomials(
        n, prog.aux_degree, [&](const Monomial& m) { return m.degree() >= 1 && canon(m); });
    v_basis = invariant_classes(vc, group);
  }

  // Gram blocks from the isotypic split of the candidate monomials.
  std::vector<Monomial> gc =
      enumerate_monomials(n, db, [&](const Monomial& m) { return canon(m); });
  IsotypicBlocks iso = isotypic_split(gc, group);

  AssembledSdp out;
  out.program = prog;
  out.quotient_mode = quotient;
  out.trig_x3 = circle ? i3 : -1;
  out.trig_x4 = circle ? i4 : -1;
  out.v_basis = v_basis;

  auto add_block = [&](std::vector<CPolynomial> basis, BlockType type, bool mult, bool aux) {
    if (basis.empty()) return;
    GramBlockBasis bb;
    bb.type = type;
    bb.basis = std::move(basis);
    bb.multiplier = mult;
    bb.auxiliary = aux;
    out.bases.push_back(std::move(bb));
  };
  auto to_cplx_vec = [](const std::vector<Polynomial>& v) {
    std::vector<CPolynomial> out;
    out.reserve(v.size());
    for (const auto& p : v) out.push_back(to_complex(p));
    return out;
  };
  add_block(to_cplx_vec(iso.plus), BlockType::Real, false, false);
  add_block(to_cplx_vec(iso.minus), BlockType::Real, false, false);
  add_block(iso.cplx, BlockType::Complex, false, false);
  if (prog.options.aux_in_sos) {
    add_block(to_cplx_vec(v_iso.plus), BlockType::Real, false, true);
    add_block(to_cplx_vec(v_iso.minus), BlockType::Real, false, true);
    add_block(v_iso.cplx, BlockType::Complex, false, true);
  }

  // Explicit multiplier: either free coefficients or its own SOS block.
  std::vector<Polynomial> s_basis;
  Polynomial circle_poly(n);
  if (circle) circle_poly = sys.constraints[0];  // x3^2 + x4^2 - 1
  if (explicit_s && !prog.options.multiplier_in_sos) {
    std::vector<Monomial> sc = enumerate_monomials(n, prog.multiplier_degree);
    s_basis = invariant_classes(sc, group);
  } else if (explicit_s) {
    if (prog.multiplier_degree % 2 != 0)
      throw std::invalid_argument("assemble: multiplier_in_sos needs an even multiplier degree");
    std::vector<Monomial> sc = enumerate_monomials(n, prog.multiplier_degree / 2);
    IsotypicBlocks siso = isotypic_split(sc, group);
    add_block(to_cplx_vec(siso.plus), BlockType::Real, true, false);
    add_block(to_cplx_vec(siso.minus), BlockType::Real, true, false);
    add_block(siso.cplx, BlockType::Complex, true, false);
  }
  out.s_basis = s_basis;

  if (lambda_form) {
    GramBlockBasis lb;
    lb.type = BlockType::Real;
    lb.basis = {to_complex(Polynomial::constant(n, 1.0))};
    lb.lambda = true;
    out.bases.push_back(std::move(lb));
  }

  std::vector<CPolynomial> cfield;
  for (const auto& f : sys.field) cfield.push_back(to_complex(f));
  auto maybe_reduce = [&](CPolynomial p) {
    return quotient ? reduce_circle(p, i3, i4) : std::move(p);
  };
  auto cert_tf = [&](CPolynomial p) { return maybe_reduce(std::move(p)); };
  auto aux_tf = [&](CPolynomial p) { return maybe_reduce(lie_derivative(p, cfield)); };
  auto mult_tf = [&](CPolynomial p) { return maybe_reduce(p * to_complex(circle_poly)); };
  CPolynomial phi_m_u0 = to_complex(prog.phi);
  if (prog.fixed_bound) phi_m_u0.add_term(Monomial::unit(n), {-*prog.fixed_bound, 0.0});
  auto lambda_tf = [&](CPolynomial p) { return maybe_reduce(p * phi_m_u0); };

  // Emit all rows.
  RowBuilder bld(group);
  std::vector<BlockSpec> blocks;
  int svec_off = 0;
  int lambda_slot = -1;
  for (const auto& bb : out.bases) {
    if (bb.lambda) lambda_slot = svec_off;
    BlockSpec spec{static_cast<int>(bb.basis.size()), bb.type};
    if (bb.auxiliary)
      emit_gram_block(bld, bb, svec_off, aux_tf);
    else if (bb.multiplier)
      emit_gram_block(bld, bb, svec_off, mult_tf);
    else if (bb.lambda)
      emit_gram_block(bld, bb, svec_off, lambda_tf);
    else
      emit_gram_block(bld, bb, svec_off, cert_tf);
    svec_off += spec.svec_size();
    blocks.push_back(spec);
  }

  // Trace normalization of the auxiliary Gram blocks: tr(H) + slack = bound.
  int trace_row = -1;
  if (prog.options.aux_in_sos) {
    GramBlockBasis sb;
    sb.type = BlockType::Real;
    sb.basis = {CPolynomial(n)};
    sb.slack = true;
    out.bases.push_back(sb);
    blocks.push_back(BlockSpec{1, BlockType::Real});
    const int slack_col = svec_off;
    svec_off += 1;
    trace_row = static_cast<int>(bld.row_monos().size());
    int off = 0;
    for (size_t bi = 0; bi + 1 < out.bases.size(); ++bi) {
      const auto& bb = out.bases[bi];
      const BlockSpec spec{static_cast<int>(bb.basis.size()), bb.type};
      if (bb.auxiliary) {
        for (int q = 0; q < spec.dim; ++q) {
          const int diag = bb.type == BlockType::Real ? q * (q + 1) / 2 + q : q * q + 2 * q;
          bld.raw_entry(trace_row, off + diag, 1.0 / prog.options.aux_trace_bound);
        }
      }
      off += spec.svec_size();
    }
    bld.raw_entry(trace_row, slack_col, 1.0 / prog.options.aux_trace_bound);
    bld.raw_row(Monomial::unit(n), 1.0);
  }

  const int n_v = static_cast<int>(v_basis.size());
  const int n_s = static_cast<int>(s_basis.size());
  const int n_u = prog.fixed_bound ? 0 : 1;
  const int n_freevars = n_u + n_v + n_s;

  if (lambda_form) {
    // handled through the lambda block; rows are homogeneous
  } else if (prog.fixed_bound) {
    bld.add_b(Monomial::unit(n), *prog.fixed_bound);
  } else {
    bld.add_free(Monomial::unit(n), -1.0, 0);  // the bound U
  }
  for (int k = 0; k < n_v; ++k) {
    Polynomial lie = lie_derivative(v_basis[k], sys.field);
    if (quotient) lie = reduce_circle(lie, i3, i4);
    for (const auto& [m, c] : lie.terms()) bld.add_free(m, c, n_u + k);
  }
  for (int k = 0; k < n_s; ++k) {
    Polynomial col = s_basis[k] * circle_poly;  // -S(1-c) contribution
    for (const auto& [m, c] : col.terms()) bld.add_free(m, c, n_u + n_v + k);
  }
  if (!lambda_form)
    for (const auto& [m, c] : prog.phi.terms()) bld.add_b(m, -c);

  const int m_rows = static_cast<int>(bld.row_monos().size());
  const int n_svec = svec_off;

  // Identify rows with no Gram entries: they constrain the free variables
  // only (top-degree cancellations) and are eliminated through a null-space
  // substitution so the Schur complement stays positive definite.
  std::vector<bool> has_psd(m_rows, false);
  for (const auto& t : bld.psd_trips()) has_psd[t.row()] = true;

  std::vector<int> pure_rows;
  for (int i = 0; i < m_rows; ++i)
    if (!has_psd[i]) pure_rows.push_back(i);

  Eigen::MatrixXd recovery = Eigen::MatrixXd::Identity(n_freevars, n_freevars);
  std::vector<Eigen::Triplet<double>> free_trips_final;
  std::vector<int> row_map(m_rows);
  int kept = 0;
  for (int i = 0; i < m_rows; ++i) row_map[i] = has_psd[i] ? kept++ : -1;

  if (!pure_rows.empty()) {
    // Support columns of the pure-free rows.
    std::vector<int> pure_index(m_rows, -1);
    for (size_t k = 0; k < pure_rows.size(); ++k) pure_index[pure_rows[k]] = static_cast<int>(k);
    std::vector<char> in_support(n_freevars, 0);
    for (const auto& t : bld.free_trips())
      if (pure_index[t.row()] >= 0) in_support[t.col()] = 1;
    std::vector<int> support, support_pos(n_freevars, -1);
    for (int j = 0; j < n_freevars; ++j)
      if (in_support[j]) {
        support_pos[j] = static_cast<int>(support.size());
        support.push_back(j);
      }
    for (int i : pure_rows)
      if (std::abs(bld.bvals()[i]) > 1e-9)
        throw std::logic_error("sos assembly: inconsistent top-degree row");

    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(static_cast<int>(pure_rows.size()),
                                              static_cast<int>(support.size()));
    for (const auto& t : bld.free_trips())
      if (pure_index[t.row()] >= 0) R(pure_index[t.row()], support_pos[t.col()]) += t.value();

    Eigen::FullPivLU<Eigen::MatrixXd> lu(R);
    lu.setThreshold(1e-9);
    Eigen::MatrixXd kern = lu.kernel();  // support.size() x nulldim
    if (lu.dimensionOfKernel() == 0) kern.resize(static_cast<int>(support.size()), 0);

    const int n_unconstrained = n_freevars - static_cast<int>(support.size());
    const int n_reduced = n_unconstrained + static_cast<int>(kern.cols());
    recovery = Eigen::MatrixXd::Zero(n_freevars, n_reduced);
    std::vector<int> newcol(n_freevars, -1);
    int jj = 0;
    for (int j = 0; j < n_freevars; ++j)
      if (!in_support[j]) {
        newcol[j] = jj;
        recovery(j, jj) = 1.0;
        ++jj;
      }
    for (int kc = 0; kc < kern.cols(); ++kc)
      for (int sj = 0; sj < static_cast<int>(support.size()); ++sj)
        recovery(support[sj], jj + kc) = kern(sj, kc);

    for (const auto& t : bld.free_trips()) {
      const int nr = row_map[t.row()];
      if (nr < 0) continue;
      if (!in_support[t.col()]) {
        free_trips_final.emplace_back(nr, newcol[t.col()], t.value());
      } else {
        const int sp = support_pos[t.col()];
        for (int kc = 0; kc < kern.cols(); ++kc) {
          const double v = t.value() * kern(sp, kc);
          if (v != 0.0) free_trips_final.emplace_back(nr, jj + kc, v);
        }
      }
    }
  } else {
    for (const auto& t : bld.free_trips())
      free_trips_final.emplace_back(row_map[t.row()], t.col(), t.value());
  }

  const int m_final = kept;
  const int nf_final = static_cast<int>(recovery.cols());

  SdpProblem& p = out.problem;
  p.blocks = blocks;
  std::vector<Eigen::Triplet<double>> psd_final;
  psd_final.reserve(bld.psd_trips().size());
  for (const auto& t : bld.psd_trips())
    psd_final.emplace_back(row_map[t.row()], t.col(), t.value());
  p.a_psd.resize(m_final, n_svec);
  p.a_psd.setFromTriplets(psd_final.begin(), psd_final.end());
  p.a_free.resize(m_final, nf_final);
  p.a_free.setFromTriplets(free_trips_final.begin(), free_trips_final.end());
  p.b = Eigen::VectorXd::Zero(m_final);
  out.row_monomials.clear();
  for (int i = 0; i < m_rows; ++i)
    if (row_map[i] >= 0) {
      p.b[row_map[i]] = bld.bvals()[i];
      out.row_monomials.push_back(bld.row_monos()[i]);
    }
  p.c_psd = Eigen::VectorXd::Zero(n_svec);
  if (lambda_slot >= 0) p.c_psd[lambda_slot] = -1.0;  // maximize lambda
  Eigen::VectorXd c_orig = Eigen::VectorXd::Zero(n_freevars);
  if (!prog.fixed_bound) c_orig[0] = 1.0;  // minimize U
  p.c_free = recovery.transpose() * c_orig;
  out.free_recovery = recovery;
  return out;
}

AssembledSdp assemble(const OscillatorParams& params, int aux_degree, int multiplier_degree,
                      const SosOptions& options) {
  return assemble(make_program(params, aux_degree, multiplier_degree, options));
}

GramCertificate extract_certificate(const AssembledSdp& a, const SdpSolution& sol) {
  GramCertificate cert;
  const int n = a.program.system.nvars;
  Eigen::VectorXd w = a.free_recovery * sol.w;
  const int n_u = a.program.fixed_bound ? 0 : 1;
  cert.u = a.program.fixed_bound ? *a.program.fixed_bound : w[0];
  cert.v = Polynomial(n);
  for (size_t k = 0; k < a.v_basis.size(); ++k)
    cert.v += a.v_basis[k] * w[n_u + static_cast<int>(k)];
  cert.s = Polynomial(n);
  for (size_t k = 0; k < a.s_basis.size(); ++k)
    cert.s += a.s_basis[k] * w[n_u + static_cast<int>(a.v_basis.size() + k)];

  // Certificate polynomial from the Gram blocks (multiplier blocks go to S).
  Polynomial gram_poly(n), s_from_blocks(n);
  cert.min_gram_eig = std::numeric_limits<double>::infinity();
  for (size_t bi = 0; bi < a.bases.size(); ++bi) {
    const auto& bb = a.bases[bi];
    Eigen::MatrixXcd G = solution_block_cplx(a.problem, sol.x, static_cast<int>(bi));
    cert.gram.push_back(G);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G, Eigen::EigenvaluesOnly);
    cert.min_gram_eig = std::min(cert.min_gram_eig, eig.eigenvalues().minCoeff());
    Polynomial acc(n);
    const int d = static_cast<int>(bb.basis.size());
    for (int l = 0; l < d; ++l)
      for (int k = 0; k <= l; ++k) {
        CPolynomial prod = bb.basis[k] * bb.basis[l].conjugated();
        const cxd g = G(k, l);
        for (const auto& [m, c] : prod.terms()) {
          const cxd tv = (k == l) ? g * c : (g * c + std::conj(g * c));
          acc.add_term(m, tv.real());
        }
      }
    if (bb.multiplier)
      s_from_blocks += acc;
    else if (bb.auxiliary)
      cert.v += acc;
    else if (bb.lambda)
      cert.lambda = G(0, 0).real();
    else if (!bb.slack)
      gram_poly += acc;
  }
  if (!s_from_blocks.is_zero()) cert.s += s_from_blocks;

  // Certified identity, full ring: for the normalized form it reads
  // lambda (U0 - Phi) - f.grad(V) = certificate; otherwise U - Phi - f.grad(V).
  const bool lambda_form = a.program.fixed_bound.has_value() && a.program.options.aux_in_sos;
  const double lam = lambda_form ? cert.lambda : 1.0;
  Polynomial expr = Polynomial::constant(n, lam * cert.u) - a.program.phi * lam -
                    lie_derivative(cert.v, a.program.system.field);
  Polynomial diff = expr - gram_poly;
  if (a.quotient_mode) {
    auto [q, rem] = divide_circle(diff, a.trig_x3, a.trig_x4);
    cert.s = q;
    diff = rem;
  } else if (a.program.system.has_circle()) {
    // expr + S(1 - c) should equal the certificate: 1 - c = -circle_poly.
    diff -= cert.s * a.program.system.constraints[0];
  }
  double res = 0;
  for (const auto& [m, c] : diff.terms()) res = std::max(res, std::abs(c));
  cert.reconstruction_residual = res;
  return cert;
}

GramFragment bound_above(const Polynomial& p, int basis_degree) {
  AffineUnknownPoly expr;
  expr.constant = -p;
  expr.linear = {Polynomial::constant(p.nvars(), 1.0)};
  GramFragment frag = gram_parameterize(expr, basis(p.nvars(), basis_degree));
  frag.problem.c_free[0] = 1.0;
  return frag;
}

GramFragment gram_parameterize(const AffineUnknownPoly& expr, const MonomialBasis& basis) {
  const int n = expr.constant.nvars();
  int deg = expr.constant.degree();
  for (const auto& lp : expr.linear) deg = std::max(deg, lp.degree());
  if (deg > 2 * basis.max_degree)
    throw std::invalid_argument("gram_parameterize: expression degree exceeds 2x basis degree");

  GramFragment frag;
  frag.basis = basis;
  const int d = basis.size();
  CyclicGroup trivial = CyclicGroup::trivial(n);
  RowBuilder bld(trivial);

  GramBlockBasis bb;
  bb.type = BlockType::Real;
  for (const auto& m : basis.entries) bb.basis.push_back(to_complex(Polynomial::monomial(m, 1.0)));
  emit_gram_block(bld, bb, 0, [](CPolynomial p) { return p; });

  for (size_t j = 0; j < expr.linear.size(); ++j)
    for (const auto& [m, c] : expr.linear[j].terms())
      bld.add_free(m, -c, static_cast<int>(j));
  for (const auto& [m, c] : expr.constant.terms()) bld.add_b(m, c);

  const int m_rows = static_cast<int>(bld.row_monos().size());
  SdpProblem& p = frag.problem;
  p.blocks = {BlockSpec{d, BlockType::Real}};
  p.a_psd.resize(m_rows, p.blocks[0].svec_size());
  p.a_psd.setFromTriplets(bld.psd_trips().begin(), bld.psd_trips().end());
  p.a_free.resize(m_rows, static_cast<int>(expr.linear.size()));
  p.a_free.setFromTriplets(bld.free_trips().begin(), bld.free_trips().end());
  p.b = Eigen::Map<Eigen::VectorXd>(bld.bvals().data(), m_rows);
  p.c_psd = Eigen::VectorXd::Zero(p.blocks[0].svec_size());
  p.c_free = Eigen::VectorXd::Zero(static_cast<int>(expr.linear.size()));
  return frag;
}

}  // namespace ltavg
