#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltavg/model.hpp"
#include "ltavg/poly.hpp"
#include "ltavg/sdp.hpp"
#include "ltavg/symmetry.hpp"

namespace ltavg {

struct SosOptions {
  enum class Symmetry { None, Parity, Auto };
  Symmetry symmetry = Symmetry::Auto;
  // Require the auxiliary function V to be a sum of squares (modulo the
  // circle ideal), i.e. V >= 0 along trajectories. Without this the program
  // admits indefinite time-periodic Lyapunov-type certificates on both sides
  // of the stability boundary and loses all discriminating power; with it,
  // feasibility soundly implies a bound on the long-time average.
  bool aux_in_sos = true;
  // Scale normalization tr(H) <= aux_trace_bound on V's Gram matrix. Valid
  // certificates are scale free, so without it the optimal face recedes to
  // infinity and the dual cone has no interior.
  double aux_trace_bound = 1.0;
  // Force the circle multiplier into the SOS cone instead of leaving it free.
  bool multiplier_in_sos = false;
  // Keep the multiplier as explicit decision variables even when the
  // quotient-ring route is available.
  bool force_explicit_multiplier = false;
};

struct SymmetryInfo {
  CyclicGroup group;
  std::string name = "none";  // none | parity | z4
};

/// The bounding program min U s.t. U - Phi - f.grad(V) + S(1 - x3^2 - x4^2)
/// is a sum of squares, before compilation to a semidefinite program.
struct SosProgram {
  PolySystem system;
  Polynomial phi;
  int aux_degree = 4;         // degree bound on V, even
  int multiplier_degree = 2;  // degree bound on S
  SosOptions options;
  SymmetryInfo symmetry;
  bool symmetry_warning = false;
  // When set together with aux_in_sos, the program is compiled in normalized
  // form: maximize lambda >= 0 subject to
  //     lambda (U0 - Phi) - f.grad(V) in SOS (mod circle),  V in SOS, tr H <= 1,
  // with U0 = *fixed_bound. A certificate with lambda > 0 rescales to the
  // bound U0 on the long-time average; at the true optimum U* = 0 of the
  // un-normalized program both its primal and dual lose interior points,
  // while this form keeps a Slater point on both sides.
  std::optional<double> fixed_bound;
};

SosProgram make_program(const PolySystem& system, const Polynomial& phi, int aux_degree,
                        int multiplier_degree, const SosOptions& options = {});
SosProgram make_program(const OscillatorParams& params, int aux_degree, int multiplier_degree,
                        const SosOptions& options = {});

/// Verifies the candidate symmetries of the system (the quarter-turn rotation
/// and the oscillator-negation parity) and stores the finest verified group.
/// V and S are then restricted to invariant polynomials and the Gram basis is
/// split into isotypic blocks; the optimum is unchanged. If a symmetry was
/// requested but none verifies, the program is returned unchanged with
/// symmetry_warning set.
SosProgram symmetry_reduce(SosProgram program);

struct GramBlockBasis {
  BlockType type;
  std::vector<CPolynomial> basis;  // real blocks carry zero imaginary parts
  bool multiplier = false;         // block parameterizes S rather than the certificate
  bool auxiliary = false;          // block parameterizes the Gram matrix of V
  bool slack = false;              // scalar slack of the trace normalization
  bool lambda = false;             // scalar multiplier of (U0 - Phi)
};

/// Compiled bounding problem plus everything needed to interpret a solution.
struct AssembledSdp {
  SdpProblem problem;
  SosProgram program;                    // the reduced program this compiles
  std::vector<GramBlockBasis> bases;     // parallel to problem.blocks
  std::vector<Monomial> row_monomials;   // representative monomial per row
  Eigen::MatrixXd free_recovery;         // original free vars from reduced ones
  std::vector<Polynomial> v_basis;       // invariant basis of V (original vars 1..)
  std::vector<Polynomial> s_basis;       // explicit multiplier basis (may be empty)
  bool quotient_mode = false;            // multiplier eliminated through the circle ideal
  int trig_x3 = -1, trig_x4 = -1;

  int num_original_free() const { return static_cast<int>(free_recovery.rows()); }
};

AssembledSdp assemble(const SosProgram& program);
AssembledSdp assemble(const OscillatorParams& params, int aux_degree, int multiplier_degree,
                      const SosOptions& options = {});

/// Positive semidefinite witness recovered from a solved bounding problem.
struct GramCertificate {
  double u = 0.0;
  double lambda = 1.0;  // multiplier of the normalized form
  Polynomial v;
  Polynomial s;
  std::vector<Eigen::MatrixXcd> gram;
  double reconstruction_residual = 0.0;
  double min_gram_eig = 0.0;
};

GramCertificate extract_certificate(const AssembledSdp& assembled, const SdpSolution& solution);

/// Expression affine in unknown scalars: constant + sum_j w_j * linear[j].
struct AffineUnknownPoly {
  Polynomial constant;
  std::vector<Polynomial> linear;
};

struct GramFragment {
  SdpProblem problem;
  MonomialBasis basis;
};

/// Compiles "expr == basis^T G basis with G PSD" into an equality-form SDP
/// fragment: one PSD block over `basis` and one coefficient-matching row per
/// monomial. The unknown scalars of `expr` become free variables (objective
/// left zero; callers set problem.c_free as needed).
/// Throws if the expression degree exceeds twice the basis degree.
GramFragment gram_parameterize(const AffineUnknownPoly& expr, const MonomialBasis& basis);

/// min U subject to U - p being a sum of squares over a monomial basis of the
/// given degree; the optimum upper-bounds max p on R^n when p - its maximum
/// admits an SOS witness at this degree.
GramFragment bound_above(const Polynomial& p, int basis_degree);

/// Canonical form modulo the circle ideal <x3^2 + x4^2 - 1>: the returned
/// polynomial has degree at most 1 in x4 (indices i3, i4).
template <typename Scalar>
PolynomialT<Scalar> reduce_circle(const PolynomialT<Scalar>& p, int i3, int i4);

/// Division p = q * (x3^2 + x4^2 - 1) + r with r canonical; returns (q, r).
std::pair<Polynomial, Polynomial> divide_circle(const Polynomial& p, int i3, int i4);

}  // namespace ltavg
