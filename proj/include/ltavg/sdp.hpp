#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ltavg {

enum class BlockType { Real, Complex };

/// One positive semidefinite matrix variable: real symmetric or complex
/// Hermitian of the given dimension.
struct BlockSpec {
  int dim = 0;
  BlockType type = BlockType::Real;

  int svec_size() const { return type == BlockType::Real ? dim * (dim + 1) / 2 : dim * dim; }
};

/// Equality-form conic program
///     minimize    c_psd . x  +  c_free . w
///     subject to  A_psd x + A_free w = b,   x in product of PSD cones, w free,
/// with x the concatenated scaled-vectorized (svec) PSD blocks.
struct SdpProblem {
  std::vector<BlockSpec> blocks;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_psd;
  Eigen::SparseMatrix<double, Eigen::RowMajor> a_free;
  Eigen::VectorXd b;
  Eigen::VectorXd c_psd;
  Eigen::VectorXd c_free;

  int num_rows() const { return static_cast<int>(b.size()); }
  int num_free() const { return static_cast<int>(c_free.size()); }
  int svec_total() const;
  int psd_dim_total() const;
  std::vector<int> svec_offsets() const;
  void validate() const;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, NumericalTrouble, IterationLimit };

std::string to_string(SolveStatus s);

struct SolverSettings {
  double tol_feas = 1e-8;    // primal/dual residual tolerance, relative
  double tol_gap = 1e-7;     // relative duality gap tolerance
  double tol_infeas = 1e-6;  // Farkas certificate residual tolerance
  // Fallback acceptance: if strict tolerances are never met, the best iterate
  // is still returned as Optimal when it meets these (defaults: disabled).
  double tol_feas_soft = 0.0;
  double tol_gap_soft = 0.0;
  int max_iter = 200;
  double step_frac = 0.99;   // fraction of the step to the cone boundary
  int dim_cap = 600;         // total PSD dimension guard
  bool verbose = false;
};

struct SdpSolution {
  SolveStatus status = SolveStatus::NumericalTrouble;
  double objective = 0.0;  // primal objective at the returned point
  Eigen::VectorXd x;       // svec of PSD blocks (tau-normalized)
  Eigen::VectorXd w;       // free variables
  Eigen::VectorXd y;       // dual multipliers
  Eigen::VectorXd z;       // svec of dual slack blocks
  double primal_res = 0.0, dual_res = 0.0, rel_gap = 0.0;
  double tau = 0.0, kappa = 0.0, mu = 0.0;
  int iterations = 0;
};

SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings = {});

struct KktReport {
  double primal_res = 0.0;
  double dual_res = 0.0;
  double rel_gap = 0.0;
  double complementarity = 0.0;  // <X, Z> at the returned point
  double min_eig_x = 0.0;
  double min_eig_z = 0.0;
  bool pass = false;
};

/// Recomputes feasibility and optimality residuals from scratch, independent
/// of solver internals. Thresholds default to the Optimal-status contract.
KktReport verify_kkt(const SdpProblem& problem, const SdpSolution& solution,
                     double tol_feas = 1e-8, double tol_gap = 1e-7);

// svec packing: real blocks store the upper triangle column by column with
// off-diagonal entries scaled by sqrt(2); complex blocks additionally store
// the imaginary part, so inner products of svec vectors match trace inner
// products of the matrices.
Eigen::VectorXd mat_to_svec(const Eigen::MatrixXd& s);
Eigen::VectorXd mat_to_svec(const Eigen::MatrixXcd& s);
Eigen::MatrixXd svec_to_mat_real(const Eigen::Ref<const Eigen::VectorXd>& v, int dim);
Eigen::MatrixXcd svec_to_mat_cplx(const Eigen::Ref<const Eigen::VectorXd>& v, int dim);

/// Materializes PSD block `index` of an svec vector (real part for complex blocks
/// is the full Hermitian matrix).
Eigen::MatrixXd solution_block_real(const SdpProblem&, const Eigen::VectorXd& svec, int index);
Eigen::MatrixXcd solution_block_cplx(const SdpProblem&, const Eigen::VectorXd& svec, int index);

/// Smallest eigenvalue across all PSD blocks of an svec vector.
double min_block_eigenvalue(const SdpProblem&, const Eigen::VectorXd& svec);

// Plain-text sparse interchange format (block dims, then triplets).
void write_problem(std::ostream& os, const SdpProblem& p);
SdpProblem read_problem(std::istream& is);

/// Randomly generated strictly feasible problem (both sides), built from a
/// known interior primal/dual pair; used by the self-test battery.
SdpProblem random_feasible_problem(unsigned long seed, int max_block_dim = 20, int max_rows = 50,
                                   bool with_free = true, bool with_complex = true);

}  // namespace ltavg
