#include "ltavg/sdp.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <random>
#include <variant>

namespace ltavg {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInvSqrt2 = 0.7071067811865475;
using cxd = std::complex<double>;

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

}  // namespace

int SdpProblem::svec_total() const {
  int n = 0;
  for (const auto& b : blocks) n += b.svec_size();
  return n;
}

int SdpProblem::psd_dim_total() const {
  int n = 0;
  for (const auto& b : blocks) n += b.dim;
  return n;
}

std::vector<int> SdpProblem::svec_offsets() const {
  std::vector<int> off;
  off.reserve(blocks.size() + 1);
  int n = 0;
  for (const auto& b : blocks) {
    off.push_back(n);
    n += b.svec_size();
  }
  off.push_back(n);
  return off;
}

void SdpProblem::validate() const {
  const int n = svec_total();
  if (a_psd.cols() != n) throw std::invalid_argument("SdpProblem: a_psd column count mismatch");
  if (c_psd.size() != n) throw std::invalid_argument("SdpProblem: c_psd size mismatch");
  if (a_psd.rows() != b.size()) throw std::invalid_argument("SdpProblem: row count mismatch");
  if (a_free.rows() != b.size() && num_free() > 0)
    throw std::invalid_argument("SdpProblem: a_free row count mismatch");
  if (a_free.cols() != c_free.size())
    throw std::invalid_argument("SdpProblem: c_free size mismatch");
  for (const auto& bl : blocks)
    if (bl.dim <= 0) throw std::invalid_argument("SdpProblem: nonpositive block dimension");
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::NumericalTrouble: return "numerical_trouble";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "unknown";
}

Eigen::VectorXd mat_to_svec(const Eigen::MatrixXd& s) {
  const int d = static_cast<int>(s.rows());
  Eigen::VectorXd v(d * (d + 1) / 2);
  int k = 0;
  for (int q = 0; q < d; ++q)
    for (int p = 0; p <= q; ++p)
      v[k++] = (p == q) ? s(p, p) : kSqrt2 * 0.5 * (s(p, q) + s(q, p));
  return v;
}

Eigen::VectorXd mat_to_svec(const Eigen::MatrixXcd& s) {
  const int d = static_cast<int>(s.rows());
  Eigen::VectorXd v(d * d);
  int k = 0;
  for (int q = 0; q < d; ++q)
    for (int p = 0; p <= q; ++p) {
      if (p == q) {
        v[k++] = s(p, p).real();
      } else {
        const cxd e = 0.5 * (s(p, q) + std::conj(s(q, p)));
        v[k++] = kSqrt2 * e.real();
        v[k++] = kSqrt2 * e.imag();
      }
    }
  return v;
}

Eigen::MatrixXd svec_to_mat_real(const Eigen::Ref<const Eigen::VectorXd>& v, int dim) {
  Eigen::MatrixXd s(dim, dim);
  int k = 0;
  for (int q = 0; q < dim; ++q)
    for (int p = 0; p <= q; ++p) {
      const double val = v[k++];
      if (p == q) {
        s(p, p) = val;
      } else {
        s(p, q) = s(q, p) = val * kInvSqrt2;
      }
    }
  return s;
}

Eigen::MatrixXcd svec_to_mat_cplx(const Eigen::Ref<const Eigen::VectorXd>& v, int dim) {
  Eigen::MatrixXcd s(dim, dim);
  int k = 0;
  for (int q = 0; q < dim; ++q)
    for (int p = 0; p <= q; ++p) {
      if (p == q) {
        s(p, p) = v[k++];
      } else {
        const double re = v[k++] * kInvSqrt2;
        const double im = v[k++] * kInvSqrt2;
        s(p, q) = cxd(re, im);
        s(q, p) = cxd(re, -im);
      }
    }
  return s;
}

Eigen::MatrixXd solution_block_real(const SdpProblem& prob, const Eigen::VectorXd& svec, int index) {
  const auto off = prob.svec_offsets();
  const auto& bl = prob.blocks[index];
  if (bl.type != BlockType::Real) throw std::invalid_argument("solution_block_real: complex block");
  return svec_to_mat_real(svec.segment(off[index], bl.svec_size()), bl.dim);
}

Eigen::MatrixXcd solution_block_cplx(const SdpProblem& prob, const Eigen::VectorXd& svec, int index) {
  const auto off = prob.svec_offsets();
  const auto& bl = prob.blocks[index];
  if (bl.type == BlockType::Real)
    return solution_block_real(prob, svec, index).cast<cxd>();
  return svec_to_mat_cplx(svec.segment(off[index], bl.svec_size()), bl.dim);
}

double min_block_eigenvalue(const SdpProblem& prob, const Eigen::VectorXd& svec) {
  double mn = std::numeric_limits<double>::infinity();
  const auto off = prob.svec_offsets();
  for (size_t i = 0; i < prob.blocks.size(); ++i) {
    const auto& bl = prob.blocks[i];
    if (bl.type == BlockType::Real) {
      Eigen::MatrixXd s = svec_to_mat_real(svec.segment(off[i], bl.svec_size()), bl.dim);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
      mn = std::min(mn, eig.eigenvalues().minCoeff());
    } else {
      Eigen::MatrixXcd s = svec_to_mat_cplx(svec.segment(off[i], bl.svec_size()), bl.dim);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(s, Eigen::EigenvaluesOnly);
      mn = std::min(mn, eig.eigenvalues().minCoeff());
    }
  }
  return mn;
}

namespace {

// One full-matrix constraint entry at (p, q) with p <= q; the matrix also
// carries conj(a) at (q, p). Real blocks have a.imag() == 0.
struct RowEntry {
  int p, q;
  cxd a;
};

struct BlockRows {
  std::vector<int> row_ids;
  std::vector<std::vector<RowEntry>> entries;
};

template <typename T>
struct BlockWork {
  using Scalar = T;
  int dim = 0;
  int offset = 0;
  Mat<T> X, Z;
  Mat<T> G, Ginv, W;
  Eigen::VectorXd lambda;
};

template <typename T>
Mat<T> psd_factor(const Mat<T>& s, bool& ok) {
  Eigen::LLT<Mat<T>> llt(s);
  if (llt.info() == Eigen::Success) {
    ok = true;
    return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<Mat<T>> eig(s);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double mx = std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
  ok = ev.minCoeff() > -1e-7 * mx && std::isfinite(mx);
  Eigen::VectorXd floored = ev.cwiseMax(1e-14 * mx);
  return eig.eigenvectors() * floored.cwiseSqrt().asDiagonal();
}

template <typename T>
bool compute_scaling(BlockWork<T>& b) {
  bool okx = false, okz = false;
  Mat<T> lx = psd_factor(b.X, okx);
  Mat<T> lz = psd_factor(b.Z, okz);
  if (!okx || !okz) return false;
  // lambda^2 and V from the Hermitian product Lx^H Z Lx = V diag(lambda^2) V^H.
  Mat<T> core = lx.adjoint() * (b.Z * lx);
  Eigen::SelfAdjointEigenSolver<Mat<T>> eig(core);
  if (eig.info() != Eigen::Success) return false;
  Eigen::VectorXd ev = eig.eigenvalues();
  const double evmax = ev.maxCoeff();
  if (!(evmax > 0) || !std::isfinite(evmax)) return false;
  ev = ev.cwiseMax(1e-18 * evmax);
  b.lambda = ev.cwiseSqrt();
  Eigen::VectorXd isq = b.lambda.cwiseSqrt().cwiseInverse();
  b.G = lx * eig.eigenvectors() * isq.asDiagonal();
  b.Ginv = b.lambda.cwiseSqrt().asDiagonal() * eig.eigenvectors().adjoint() *
           lx.partialPivLu().solve(Mat<T>::Identity(b.dim, b.dim));
  b.W = b.G * b.G.adjoint();
  return true;
}

template <typename T>
Mat<T> unpack_block(const Eigen::Ref<const Eigen::VectorXd>& seg, int dim) {
  if constexpr (std::is_same_v<T, double>)
    return svec_to_mat_real(seg, dim);
  else
    return svec_to_mat_cplx(seg, dim);
}

class HsdSolver {
 public:
  HsdSolver(const SdpProblem& p, const SolverSettings& s) : p_(p), set_(s) {
    m_ = p.num_rows();
    n_ = p.svec_total();
    nf_ = p.num_free();
    nu_ = p.psd_dim_total();
    const auto off = p.svec_offsets();
    for (size_t i = 0; i < p.blocks.size(); ++i) {
      const auto& bl = p.blocks[i];
      if (bl.type == BlockType::Real) {
        BlockWork<double> w;
        w.dim = bl.dim;
        w.offset = off[i];
        w.X = Eigen::MatrixXd::Identity(bl.dim, bl.dim);
        w.Z = w.X;
        works_.emplace_back(std::move(w));
      } else {
        BlockWork<cxd> w;
        w.dim = bl.dim;
        w.offset = off[i];
        w.X = Eigen::MatrixXcd::Identity(bl.dim, bl.dim);
        w.Z = w.X;
        works_.emplace_back(std::move(w));
      }
    }
    build_rowdata(off);
    if (nf_ > 0) af_dense_ = Eigen::MatrixXd(p.a_free);
    y_ = Eigen::VectorXd::Zero(m_);
    w_ = Eigen::VectorXd::Zero(nf_);
    tau_ = 1.0;
    kappa_ = 1.0;
  }

  SdpSolution run();

 private:
  struct Direction {
    Eigen::VectorXd dxh, dzh, dy, dw;
    double dtau = 0, dkappa = 0;
  };

  void build_rowdata(const std::vector<int>& off) {
    // Column lookup: svec index -> (block, p, q, component).
    struct ColInfo {
      int block, p, q, comp;  // comp: 0 diag, 1 re off-diag, 2 im off-diag
    };
    std::vector<ColInfo> cols(n_);
    for (size_t bi = 0; bi < p_.blocks.size(); ++bi) {
      const auto& bl = p_.blocks[bi];
      int k = off[bi];
      for (int q = 0; q < bl.dim; ++q)
        for (int p = 0; p <= q; ++p) {
          if (p == q) {
            cols[k++] = {static_cast<int>(bi), p, q, 0};
          } else if (bl.type == BlockType::Real) {
            cols[k++] = {static_cast<int>(bi), p, q, 1};
          } else {
            cols[k++] = {static_cast<int>(bi), p, q, 1};
            cols[k++] = {static_cast<int>(bi), p, q, 2};
          }
        }
    }
    rowdata_.resize(p_.blocks.size());
    std::vector<std::vector<RowEntry>> scratch(p_.blocks.size());
    for (int i = 0; i < m_; ++i) {
      for (auto& s : scratch) s.clear();
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p_.a_psd, i); it; ++it) {
        const ColInfo& ci = cols[it.col()];
        cxd a;
        switch (ci.comp) {
          case 0: a = cxd(it.value(), 0.0); break;
          case 1: a = cxd(it.value() * kInvSqrt2, 0.0); break;
          default: a = cxd(0.0, it.value() * kInvSqrt2); break;
        }
        auto& list = scratch[ci.block];
        if (!list.empty() && list.back().p == ci.p && list.back().q == ci.q)
          list.back().a += a;
        else
          list.push_back({ci.p, ci.q, a});
      }
      for (size_t bi = 0; bi < scratch.size(); ++bi) {
        if (scratch[bi].empty()) continue;
        rowdata_[bi].row_ids.push_back(i);
        rowdata_[bi].entries.push_back(scratch[bi]);
      }
    }
  }

  void pack_xz() {
    x_.resize(n_);
    z_.resize(n_);
    for (auto& v : works_)
      std::visit(
          [&](auto& bw) {
            const int sz = static_cast<int>(
                std::is_same_v<typename std::decay_t<decltype(bw)>::Scalar, double>
                    ? bw.dim * (bw.dim + 1) / 2
                    : bw.dim * bw.dim);
            x_.segment(bw.offset, sz) = mat_to_svec(bw.X);
            z_.segment(bw.offset, sz) = mat_to_svec(bw.Z);
          },
          v);
  }

  // svec of the scaled image G^H mat(v) G per block (z-space scaling).
  Eigen::VectorXd scale_zspace(const Eigen::VectorXd& v) const {
    Eigen::VectorXd out(n_);
    for (const auto& var : works_)
      std::visit(
          [&](const auto& bw) {
            using T = typename std::decay_t<decltype(bw)>::Scalar;
            const int sz = std::is_same_v<T, double> ? bw.dim * (bw.dim + 1) / 2 : bw.dim * bw.dim;
            Mat<T> mv = unpack_block<T>(v.segment(bw.offset, sz), bw.dim);
            Mat<T> res = bw.G.adjoint() * mv * bw.G;
            out.segment(bw.offset, sz) = mat_to_svec(res);
          },
          var);
    return out;
  }

  // A_hat v = a_psd . svec(G mat(v) G^H) per block.
  Eigen::VectorXd apply_ahat(const Eigen::VectorXd& v) const {
    Eigen::VectorXd u(n_);
    for (const auto& var : works_)
      std::visit(
          [&](const auto& bw) {
            using T = typename std::decay_t<decltype(bw)>::Scalar;
            const int sz = std::is_same_v<T, double> ? bw.dim * (bw.dim + 1) / 2 : bw.dim * bw.dim;
            Mat<T> mv = unpack_block<T>(v.segment(bw.offset, sz), bw.dim);
            Mat<T> res = bw.G * mv * bw.G.adjoint();
            u.segment(bw.offset, sz) = mat_to_svec(res);
          },
          var);
    return p_.a_psd * u;
  }

  // A_hat^T y = svec(G^H mat(a_psd^T y) G) per block.
  Eigen::VectorXd apply_ahat_t(const Eigen::VectorXd& y) const {
    Eigen::VectorXd s = p_.a_psd.transpose() * y;
    return scale_zspace(s);
  }

  void build_schur() {
    M_.setZero(m_, m_);
    for (size_t bi = 0; bi < p_.blocks.size(); ++bi) {
      const BlockRows& br = rowdata_[bi];
      if (br.row_ids.empty()) continue;
      std::visit(
          [&](const auto& bw) {
            using T = typename std::decay_t<decltype(bw)>::Scalar;
            const Mat<T>& W = bw.W;
            Mat<T> Ti(bw.dim, bw.dim);
            const int nrows = static_cast<int>(br.row_ids.size());
            for (int ii = 0; ii < nrows; ++ii) {
              Ti.setZero();
              for (const RowEntry& e : br.entries[ii]) {
                if constexpr (std::is_same_v<T, double>) {
                  const double a = e.a.real();
                  if (e.p == e.q)
                    Ti.noalias() += a * W.col(e.p) * W.col(e.p).transpose();
                  else {
                    Ti.noalias() += a * W.col(e.p) * W.col(e.q).transpose();
                    Ti.noalias() += a * W.col(e.q) * W.col(e.p).transpose();
                  }
                } else {
                  if (e.p == e.q)
                    Ti.noalias() += e.a.real() * W.col(e.p) * W.col(e.p).adjoint();
                  else {
                    Ti.noalias() += e.a * W.col(e.p) * W.col(e.q).adjoint();
                    Ti.noalias() += std::conj(e.a) * W.col(e.q) * W.col(e.p).adjoint();
                  }
                }
              }
              const int gi = br.row_ids[ii];
              for (int jj = ii; jj < nrows; ++jj) {
                double acc = 0;
                for (const RowEntry& e : br.entries[jj]) {
                  if constexpr (std::is_same_v<T, double>) {
                    const double a = e.a.real();
                    acc += (e.p == e.q) ? a * Ti(e.p, e.p)
                                        : a * (Ti(e.q, e.p) + Ti(e.p, e.q));
                  } else {
                    if (e.p == e.q)
                      acc += (e.a * Ti(e.p, e.p)).real();
                    else
                      acc += (e.a * Ti(e.q, e.p) + std::conj(e.a) * Ti(e.p, e.q)).real();
                  }
                }
                M_(gi, br.row_ids[jj]) += acc;
              }
            }
          },
          works_[bi]);
    }
    M_ = M_.selfadjointView<Eigen::Upper>();
  }

  bool factorize() {
    const double base = M_.diagonal().cwiseAbs().maxCoeff();
    double delta = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      Eigen::MatrixXd Mreg = M_;
      if (delta > 0) Mreg.diagonal().array() += delta;
      lltM_.compute(Mreg);
      if (lltM_.info() == Eigen::Success) {
        if (nf_ > 0) {
          Ym_ = lltM_.matrixL().solve(af_dense_);
          Sf_.setZero(nf_, nf_);
          Sf_.selfadjointView<Eigen::Lower>().rankUpdate(Ym_.transpose());
          Eigen::MatrixXd Sfull = Sf_.selfadjointView<Eigen::Lower>();
          double ds = 0.0;
          for (int at2 = 0; at2 < 4; ++at2) {
            Eigen::MatrixXd Sreg = Sfull;
            if (ds > 0) Sreg.diagonal().array() += ds;
            lltS_.compute(Sreg);
            if (lltS_.info() == Eigen::Success) return true;
            ds = (ds == 0) ? 1e-12 * std::max(1.0, Sfull.diagonal().maxCoeff()) : ds * 1e3;
          }
          return false;
        }
        return true;
      }
      delta = (delta == 0) ? 1e-12 * std::max(1.0, base) : delta * 1e3;
    }
    return false;
  }

  // Solves [M Af; Af^T 0] [dy; dw] = [r1; r2] with iterative refinement.
  void ksolve(const Eigen::VectorXd& r1, const Eigen::VectorXd& r2, Eigen::VectorXd& dy,
              Eigen::VectorXd& dw) const {
    auto solve_once = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b2,
                          Eigen::VectorXd& oy, Eigen::VectorXd& ow) {
      if (nf_ == 0) {
        oy = lltM_.solve(a);
        ow.resize(0);
        return;
      }
      Eigen::VectorXd t = lltM_.matrixL().solve(a);
      ow = lltS_.solve(Ym_.transpose() * t - b2);
      oy = lltM_.solve(a - af_dense_ * ow);
    };
    solve_once(r1, r2, dy, dw);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd res1 = r1 - M_ * dy;
      if (nf_ > 0) res1 -= af_dense_ * dw;
      Eigen::VectorXd res2 = nf_ > 0 ? Eigen::VectorXd(r2 - af_dense_.transpose() * dy)
                                     : Eigen::VectorXd();
      const double rn = res1.norm() + (nf_ > 0 ? res2.norm() : 0.0);
      if (rn < 1e-11 * (1.0 + r1.norm() + (nf_ ? r2.norm() : 0.0))) break;
      Eigen::VectorXd cy, cw;
      solve_once(res1, res2, cy, cw);
      dy += cy;
      if (nf_ > 0) dw += cw;
    }
  }

  bool newton(const Eigen::VectorXd& d, const Eigen::VectorXd& p1, const Eigen::VectorXd& p2hat,
              const Eigen::VectorXd& p2f, double p3, double p5, Direction& out) const {
    Eigen::VectorXd dp2 = d + p2hat;
    Eigen::VectorXd r1 = p1 - apply_ahat(dp2);
    Eigen::VectorXd u0y, u0w;
    ksolve(r1, nf_ > 0 ? Eigen::VectorXd(-p2f) : Eigen::VectorXd(), u0y, u0w);
    const double chat_d = chat_.size() ? chat_.dot(dp2) : 0.0;
    const double cf_u0 = nf_ > 0 ? p_.c_free.dot(u0w) : 0.0;
    const double num = p5 + tau_ * (p3 + chat_d) - tau_ * (bmac_.dot(u0y) - cf_u0);
    // den equals tau * ||A_hat^T u1 - c_hat||^2 + kappa exactly; the direct
    // expression cancels catastrophically near convergence.
    const double den = den_;
    if (!(den > 1e-300) || !std::isfinite(den)) return false;
    out.dtau = num / den;
    out.dy = u0y + out.dtau * u1y_;
    out.dw = nf_ > 0 ? Eigen::VectorXd(u0w + out.dtau * u1w_) : Eigen::VectorXd();
    out.dxh = dp2 + apply_ahat_t(out.dy);
    if (chat_.size()) out.dxh -= out.dtau * chat_;
    out.dzh = d - out.dxh;
    out.dkappa = (p5 - kappa_ * out.dtau) / tau_;
    return std::isfinite(out.dtau) && std::isfinite(out.dkappa);
  }

  // Largest step with X, Z staying PSD and tau, kappa nonnegative.
  double max_step(const Direction& dir) const {
    double alpha = std::numeric_limits<double>::infinity();
    for (const auto& var : works_)
      std::visit(
          [&](const auto& bw) {
            using T = typename std::decay_t<decltype(bw)>::Scalar;
            const int sz = std::is_same_v<T, double> ? bw.dim * (bw.dim + 1) / 2 : bw.dim * bw.dim;
            Eigen::VectorXd il = bw.lambda.cwiseSqrt().cwiseInverse();
            for (const Eigen::VectorXd* dv : {&dir.dxh, &dir.dzh}) {
              Mat<T> dm = unpack_block<T>(dv->segment(bw.offset, sz), bw.dim);
              Mat<T> scaled = il.asDiagonal() * dm * il.asDiagonal();
              Eigen::SelfAdjointEigenSolver<Mat<T>> eig(scaled, Eigen::EigenvaluesOnly);
              const double mn = eig.eigenvalues().minCoeff();
              if (mn < 0) alpha = std::min(alpha, -1.0 / mn);
            }
          },
          var);
    if (dir.dtau < 0) alpha = std::min(alpha, -tau_ / dir.dtau);
    if (dir.dkappa < 0) alpha = std::min(alpha, -kappa_ / dir.dkappa);
    return alpha;
  }

  void apply_step(const Direction& dir, double alpha) {
    for (auto& var : works_)
      std::visit(
          [&](auto& bw) {
            using T = typename std::decay_t<decltype(bw)>::Scalar;
            const int sz = std::is_same_v<T, double> ? bw.dim * (bw.dim + 1) / 2 : bw.dim * bw.dim;
            Mat<T> dx = unpack_block<T>(dir.dxh.segment(bw.offset, sz), bw.dim);
            Mat<T> dz = unpack_block<T>(dir.dzh.segment(bw.offset, sz), bw.dim);
            Mat<T> DX = bw.G * dx * bw.G.adjoint();
            Mat<T> DZ = bw.Ginv.adjoint() * dz * bw.Ginv;
            bw.X += alpha * DX;
            bw.Z += alpha * DZ;
            bw.X = T(0.5) * (bw.X + bw.X.adjoint()).eval();
            bw.Z = T(0.5) * (bw.Z + bw.Z.adjoint()).eval();
          },
          var);
    y_ += alpha * dir.dy;
    if (nf_ > 0) w_ += alpha * dir.dw;
    tau_ += alpha * dir.dtau;
    kappa_ += alpha * dir.dkappa;
    // The embedding is scale invariant; keep the iterate at O(1) scale.
    const double s = 1.0 / std::max(tau_, kappa_);
    if (s < 0.999 || s > 1.001) {
      for (auto& var : works_)
        std::visit(
            [&](auto& bw) {
              bw.X *= s;
              bw.Z *= s;
            },
            var);
      y_ *= s;
      if (nf_ > 0) w_ *= s;
      tau_ *= s;
      kappa_ *= s;
    }
  }

  Eigen::VectorXd lambda_svec() const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n_);
    for (const auto& var : works_)
      std::visit(
          [&](const auto& bw) {
            using T = typename std::decay_t<decltype(bw)>::Scalar;
            int k = bw.offset;
            for (int q = 0; q < bw.dim; ++q)
              for (int p = 0; p <= q; ++p) {
                if (p == q) {
                  v[k++] = bw.lambda[p];
                } else {
                  v[k++] = 0.0;
                  if constexpr (!std::is_same_v<T, double>) v[k++] = 0.0;
                }
              }
          },
          var);
    return v;
  }

  // Solves (Lambda U + U Lambda)/2 = R per block for the corrector target.
  Eigen::VectorXd corrector_rhs(double sigmu, const Direction& aff) const {
    Eigen::VectorXd d(n_);
    for (const auto& var : works_)
      std::visit(
          [&](const auto& bw) {
            using T = typename std::decay_t<decltype(bw)>::Scalar;
            const int sz = std::is_same_v<T, double> ? bw.dim * (bw.dim + 1) / 2 : bw.dim * bw.dim;
            Mat<T> dxa = unpack_block<T>(aff.dxh.segment(bw.offset, sz), bw.dim);
            Mat<T> dza = unpack_block<T>(aff.dzh.segment(bw.offset, sz), bw.dim);
            Mat<T> prod = dxa * dza;
            Mat<T> R = T(-0.5) * (prod + prod.adjoint());
            for (int i = 0; i < bw.dim; ++i)
              R(i, i) += T(sigmu - bw.lambda[i] * bw.lambda[i]);
            Mat<T> U(bw.dim, bw.dim);
            for (int i = 0; i < bw.dim; ++i)
              for (int j = 0; j < bw.dim; ++j)
                U(i, j) = R(i, j) * (2.0 / (bw.lambda[i] + bw.lambda[j]));
            d.segment(bw.offset, sz) = mat_to_svec(U);
          },
          var);
    return d;
  }

  const SdpProblem& p_;
  SolverSettings set_;
  int m_ = 0, n_ = 0, nf_ = 0, nu_ = 0;
  std::vector<std::variant<BlockWork<double>, BlockWork<cxd>>> works_;
  std::vector<BlockRows> rowdata_;
  Eigen::MatrixXd af_dense_;
  Eigen::VectorXd x_, z_, y_, w_;
  double tau_ = 1, kappa_ = 1;
  Eigen::MatrixXd M_, Ym_, Sf_;
  Eigen::LLT<Eigen::MatrixXd> lltM_, lltS_;
  Eigen::VectorXd chat_, u1y_, u1w_, bmac_;
  double chat2_ = 0;
  double den_ = 0;
};

SdpSolution HsdSolver::run() {
  SdpSolution sol;
  const double normb = std::max(1.0, p_.b.size() ? p_.b.cwiseAbs().maxCoeff() : 0.0);
  double normc = 0.0;
  if (p_.c_psd.size()) normc = p_.c_psd.cwiseAbs().maxCoeff();
  if (p_.c_free.size()) normc = std::max(normc, p_.c_free.cwiseAbs().maxCoeff());
  normc = std::max(1.0, normc);
  const bool has_cpsd = p_.c_psd.cwiseAbs().maxCoeff() > 0;

  int tiny_steps = 0;
  double mu0 = 0;
  (void)mu0;
  SolveStatus exit_status = SolveStatus::IterationLimit;
  struct Snapshot {
    bool valid = false;
    Eigen::VectorXd x, w, y, z;
    double pobj = 0, pres = 0, dres = 0, gap = 0, mu = 0;
    int iter = 0;
  } best;
  double best_merit = std::numeric_limits<double>::infinity();
  int stall = 0;
  for (int iter = 0; iter <= set_.max_iter; ++iter) {
    pack_xz();
    const double xz = x_.dot(z_);
    const double mu = (xz + tau_ * kappa_) / (nu_ + 1);
    if (iter == 0) mu0 = mu;

    Eigen::VectorXd rp = p_.a_psd * x_ - p_.b * tau_;
    if (nf_ > 0) rp += p_.a_free * w_;
    Eigen::VectorXd atz = p_.a_psd.transpose() * y_;
    Eigen::VectorXd rd = -atz - z_ + p_.c_psd * tau_;
    Eigen::VectorXd rdf = nf_ > 0 ? Eigen::VectorXd(-af_dense_.transpose() * y_ + p_.c_free * tau_)
                                  : Eigen::VectorXd();
    const double cx = p_.c_psd.dot(x_) + (nf_ ? p_.c_free.dot(w_) : 0.0);
    const double by = p_.b.dot(y_);
    const double rg = by - cx - kappa_;

    const double pobj = cx / tau_;
    const double dobj = by / tau_;
    const double bnorm = p_.b.size() ? p_.b.cwiseAbs().maxCoeff() : 0.0;
    const double pres = (rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0) / tau_ / (1.0 + bnorm);
    double dres = rd.size() ? rd.cwiseAbs().maxCoeff() : 0.0;
    if (nf_ > 0 && rdf.size()) dres = std::max(dres, rdf.cwiseAbs().maxCoeff());
    double cnorm = p_.c_psd.size() ? p_.c_psd.cwiseAbs().maxCoeff() : 0.0;
    if (p_.c_free.size()) cnorm = std::max(cnorm, p_.c_free.cwiseAbs().maxCoeff());
    dres = dres / tau_ / (1.0 + cnorm);
    const double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    const double compl_gap = xz / (tau_ * tau_) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (set_.verbose) {
      std::ostringstream os;
      os << "iter " << iter << " mu=" << mu << " pres=" << pres << " dres=" << dres
         << " gap=" << gap << " tau=" << tau_ << " kappa=" << kappa_ << " pobj=" << pobj;
      fprintf(stderr, "%s\n", os.str().c_str());
    }

    const double merit = std::max({pres, dres, std::min(gap, compl_gap)});
    if (merit < 0.98 * best_merit) {
      best_merit = merit;
      stall = 0;
      best.valid = true;
      best.x = x_ / tau_;
      best.w = w_ / tau_;
      best.y = y_ / tau_;
      best.z = z_ / tau_;
      best.pobj = pobj;
      best.pres = pres;
      best.dres = dres;
      best.gap = std::min(gap, compl_gap);
      best.mu = mu;
      best.iter = iter;
    } else if (++stall > 25) {
      break;
    }

    if (pres <= set_.tol_feas && dres <= set_.tol_feas &&
        (gap <= set_.tol_gap || compl_gap <= set_.tol_gap)) {
      sol.status = SolveStatus::Optimal;
      sol.objective = pobj;
      sol.x = x_ / tau_;
      sol.w = w_ / tau_;
      sol.y = y_ / tau_;
      sol.z = z_ / tau_;
      sol.primal_res = pres;
      sol.dual_res = dres;
      sol.rel_gap = gap;
      sol.tau = tau_;
      sol.kappa = kappa_;
      sol.mu = mu;
      sol.iterations = iter;
      return sol;
    }

    // Farkas certificate checks: the homogeneous ray signature is tau
    // collapsing relative to kappa (the iterate is kept at max(tau,kappa)=1).
    const bool ray_regime = tau_ < 0.2 * kappa_;
    if (by > 0 && ray_regime) {
      double res = (atz + z_).cwiseAbs().maxCoeff();
      if (nf_ > 0) res = std::max(res, (af_dense_.transpose() * y_).cwiseAbs().maxCoeff());
      if (res / by <= set_.tol_infeas * normc) {
        sol.status = SolveStatus::PrimalInfeasible;
        sol.objective = std::numeric_limits<double>::quiet_NaN();
        sol.y = y_ / by;
        sol.z = z_ / by;
        sol.x = x_;
        sol.w = w_;
        sol.tau = tau_;
        sol.kappa = kappa_;
        sol.mu = mu;
        sol.iterations = iter;
        return sol;
      }
    }
    if (cx < 0 && ray_regime) {
      Eigen::VectorXd ax = p_.a_psd * x_;
      if (nf_ > 0) ax += p_.a_free * w_;
      if (ax.cwiseAbs().maxCoeff() / (-cx) <= set_.tol_infeas * normb) {
        sol.status = SolveStatus::DualInfeasible;
        sol.objective = std::numeric_limits<double>::quiet_NaN();
        sol.x = x_ / (-cx);
        sol.w = w_ / (-cx);
        sol.y = y_;
        sol.z = z_;
        sol.tau = tau_;
        sol.kappa = kappa_;
        sol.mu = mu;
        sol.iterations = iter;
        return sol;
      }
    }

    if (iter == set_.max_iter) break;

    bool ok = true;
    for (auto& var : works_)
      ok = ok && std::visit([](auto& bw) { return compute_scaling(bw); }, var);
    if (!ok) {
      if (set_.verbose) fprintf(stderr, "FAIL: scaling\n");
      exit_status = SolveStatus::NumericalTrouble;
      break;
    }

    build_schur();
    if (!factorize()) {
      if (set_.verbose) fprintf(stderr, "FAIL: factorize\n");
      exit_status = SolveStatus::NumericalTrouble;
      break;
    }

    // Per-iteration scaled objective data and the tau-column solve.
    chat_ = has_cpsd ? scale_zspace(p_.c_psd) : Eigen::VectorXd();
    chat2_ = chat_.size() ? chat_.squaredNorm() : 0.0;
    bmac_ = p_.b;
    Eigen::VectorXd rhs1 = p_.b;
    if (chat_.size()) {
      Eigen::VectorXd ac = apply_ahat(chat_);
      bmac_ = p_.b - ac;
      rhs1 = p_.b + ac;
    }
    ksolve(rhs1, nf_ > 0 ? Eigen::VectorXd(p_.c_free) : Eigen::VectorXd(), u1y_, u1w_);
    {
      Eigen::VectorXd atu = apply_ahat_t(u1y_);
      if (chat_.size()) atu -= chat_;
      den_ = tau_ * atu.squaredNorm() + kappa_;
    }

    // Predictor.
    Eigen::VectorXd lam = lambda_svec();
    Direction aff;
    if (!newton(-lam, -rp, -scale_zspace(rd), nf_ > 0 ? Eigen::VectorXd(-rdf) : Eigen::VectorXd(),
                -rg, -tau_ * kappa_, aff)) {
      if (set_.verbose) fprintf(stderr, "FAIL: affine newton\n");
      exit_status = SolveStatus::NumericalTrouble;
      break;
    }
    const double a_aff = std::min(1.0, 0.995 * max_step(aff));
    const double mu_aff = ((lam + a_aff * aff.dxh).dot(lam + a_aff * aff.dzh) +
                           (tau_ + a_aff * aff.dtau) * (kappa_ + a_aff * aff.dkappa)) /
                          (nu_ + 1);
    double sigma = std::pow(std::max(0.0, mu_aff / mu), 3.0);
    sigma = std::min(std::max(sigma, 1e-8), 0.99999);

    // Corrector / combined.
    const double eta = 1.0 - sigma;
    Direction dir;
    Eigen::VectorXd d = corrector_rhs(sigma * mu, aff);
    if (!newton(d, -eta * rp, -eta * scale_zspace(rd),
                nf_ > 0 ? Eigen::VectorXd(-eta * rdf) : Eigen::VectorXd(), -eta * rg,
                sigma * mu - tau_ * kappa_ - aff.dtau * aff.dkappa, dir)) {
      if (set_.verbose) fprintf(stderr, "FAIL: corrector newton\n");
      exit_status = SolveStatus::NumericalTrouble;
      break;
    }
    double alpha = std::min(1.0, set_.step_frac * max_step(dir));
    if (alpha < 1e-8) {
      if (++tiny_steps >= 3) {
        exit_status = SolveStatus::NumericalTrouble;
        break;
      }
    } else {
      tiny_steps = 0;
    }
    apply_step(dir, alpha);
    sol.iterations = iter + 1;
  }

  // Soft acceptance from the best recorded iterate.
  if (set_.tol_feas_soft > 0 && best.valid && best.pres <= set_.tol_feas_soft &&
      best.dres <= set_.tol_feas_soft &&
      best.gap <= std::max(set_.tol_gap_soft, set_.tol_feas_soft)) {
    sol.status = SolveStatus::Optimal;
    sol.objective = best.pobj;
    sol.x = best.x;
    sol.w = best.w;
    sol.y = best.y;
    sol.z = best.z;
    sol.primal_res = best.pres;
    sol.dual_res = best.dres;
    sol.rel_gap = best.gap;
    sol.mu = best.mu;
    sol.iterations = best.iter;
    sol.tau = tau_;
    sol.kappa = kappa_;
    return sol;
  }

  // Ran out of iterations (or broke out with trouble): label what we can.
  sol.status = exit_status;
  pack_xz();
  const double by = p_.b.dot(y_);
  const double cx = p_.c_psd.dot(x_) + (nf_ ? p_.c_free.dot(w_) : 0.0);
  if (sol.status == SolveStatus::IterationLimit && by > 0) {
    double res = (p_.a_psd.transpose() * y_ + z_).cwiseAbs().maxCoeff();
    if (nf_ > 0) res = std::max(res, (af_dense_.transpose() * y_).cwiseAbs().maxCoeff());
    if (res / by <= 1e-4 * normc) sol.status = SolveStatus::PrimalInfeasible;
  }
  if (sol.status == SolveStatus::IterationLimit && cx < 0) {
    Eigen::VectorXd ax = p_.a_psd * x_;
    if (nf_ > 0) ax += p_.a_free * w_;
    if (ax.cwiseAbs().maxCoeff() / (-cx) <= 1e-4 * normb) sol.status = SolveStatus::DualInfeasible;
  }
  sol.x = x_ / tau_;
  sol.w = w_ / tau_;
  sol.y = y_ / tau_;
  sol.z = z_ / tau_;
  sol.objective = cx / tau_;
  sol.tau = tau_;
  sol.kappa = kappa_;
  return sol;
}

}  // namespace

SdpSolution solve(const SdpProblem& problem, const SolverSettings& settings) {
  problem.validate();
  if (problem.psd_dim_total() > settings.dim_cap)
    throw std::invalid_argument("solve: total PSD dimension exceeds dim_cap");
  HsdSolver solver(problem, settings);
  return solver.run();
}

KktReport verify_kkt(const SdpProblem& p, const SdpSolution& s, double tol_feas, double tol_gap) {
  KktReport rep;
  Eigen::VectorXd rp = p.a_psd * s.x - p.b;
  if (p.num_free() > 0) rp += p.a_free * s.w;
  const double bnorm = p.b.size() ? p.b.cwiseAbs().maxCoeff() : 0.0;
  rep.primal_res = (rp.size() ? rp.cwiseAbs().maxCoeff() : 0.0) / (1.0 + bnorm);

  Eigen::VectorXd rd = p.a_psd.transpose() * s.y + s.z - p.c_psd;
  double dr = rd.size() ? rd.cwiseAbs().maxCoeff() : 0.0;
  if (p.num_free() > 0 && p.c_free.size())
    dr = std::max(dr, (p.a_free.transpose() * s.y - p.c_free).cwiseAbs().maxCoeff());
  double cnorm = p.c_psd.size() ? p.c_psd.cwiseAbs().maxCoeff() : 0.0;
  if (p.c_free.size()) cnorm = std::max(cnorm, p.c_free.cwiseAbs().maxCoeff());
  rep.dual_res = dr / (1.0 + cnorm);

  const double pobj = p.c_psd.dot(s.x) + (p.num_free() ? p.c_free.dot(s.w) : 0.0);
  const double dobj = p.b.dot(s.y);
  rep.rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  rep.complementarity = s.x.dot(s.z);
  rep.min_eig_x = min_block_eigenvalue(p, s.x);
  rep.min_eig_z = min_block_eigenvalue(p, s.z);
  rep.pass = rep.primal_res <= tol_feas && rep.dual_res <= tol_feas && rep.rel_gap <= tol_gap &&
             rep.min_eig_x >= -1e-7 && rep.min_eig_z >= -1e-7;
  return rep;
}

SdpProblem random_feasible_problem(unsigned long seed, int max_block_dim, int max_rows,
                                   bool with_free, bool with_complex) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> nblk(1, 3);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::uniform_real_distribution<double> pos(0.5, 2.0);

  SdpProblem p;
  const int blocks = nblk(rng);
  int total = 0;
  for (int i = 0; i < blocks; ++i) {
    std::uniform_int_distribution<int> dsz(1, max_block_dim);
    const int d = dsz(rng);
    const bool cplx = with_complex && (rng() % 3 == 0) && d >= 2;
    p.blocks.push_back({d, cplx ? BlockType::Complex : BlockType::Real});
    total += d;
  }
  const int n = p.svec_total();
  std::uniform_int_distribution<int> mrows(1, std::max(1, std::min(max_rows, n - 1)));
  const int m = mrows(rng);
  const int nf = with_free && (rng() % 2 == 0) ? static_cast<int>(rng() % 4) : 0;

  // Interior primal point X0 and dual pair (y0, Z0); data built to match.
  Eigen::VectorXd x0(n), z0(n);
  {
    int off = 0;
    for (const auto& bl : p.blocks) {
      if (bl.type == BlockType::Real) {
        Eigen::MatrixXd q = Eigen::MatrixXd::NullaryExpr(bl.dim, bl.dim, [&]() { return uni(rng); });
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(q);
        Eigen::MatrixXd Q = qr.householderQ();
        Eigen::VectorXd ev = Eigen::VectorXd::NullaryExpr(bl.dim, [&]() { return pos(rng); });
        x0.segment(off, bl.svec_size()) = mat_to_svec(Eigen::MatrixXd(Q * ev.asDiagonal() * Q.transpose()));
        Eigen::VectorXd ev2 = Eigen::VectorXd::NullaryExpr(bl.dim, [&]() { return pos(rng); });
        z0.segment(off, bl.svec_size()) = mat_to_svec(Eigen::MatrixXd(Q * ev2.asDiagonal() * Q.transpose()));
      } else {
        Eigen::MatrixXcd q = Eigen::MatrixXcd::NullaryExpr(
            bl.dim, bl.dim, [&]() { return cxd(uni(rng), uni(rng)); });
        Eigen::HouseholderQR<Eigen::MatrixXcd> qr(q);
        Eigen::MatrixXcd Q = qr.householderQ();
        Eigen::VectorXd ev = Eigen::VectorXd::NullaryExpr(bl.dim, [&]() { return pos(rng); });
        x0.segment(off, bl.svec_size()) = mat_to_svec(Eigen::MatrixXcd(Q * ev.asDiagonal() * Q.adjoint()));
        Eigen::VectorXd ev2 = Eigen::VectorXd::NullaryExpr(bl.dim, [&]() { return pos(rng); });
        z0.segment(off, bl.svec_size()) = mat_to_svec(Eigen::MatrixXcd(Q * ev2.asDiagonal() * Q.adjoint()));
      }
      off += bl.svec_size();
    }
  }

  std::vector<Eigen::Triplet<double>> ta, tf;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j)
      if (rng() % 4 == 0) ta.emplace_back(i, j, uni(rng));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < nf; ++j) tf.emplace_back(i, j, uni(rng));
  p.a_psd.resize(m, n);
  p.a_psd.setFromTriplets(ta.begin(), ta.end());
  p.a_free.resize(m, nf);
  p.a_free.setFromTriplets(tf.begin(), tf.end());

  Eigen::VectorXd w0 = Eigen::VectorXd::NullaryExpr(nf, [&]() { return uni(rng); });
  Eigen::VectorXd y0 = Eigen::VectorXd::NullaryExpr(m, [&]() { return uni(rng); });
  p.b = p.a_psd * x0;
  if (nf > 0) p.b += p.a_free * w0;
  p.c_psd = p.a_psd.transpose() * y0 + z0;
  p.c_free = nf > 0 ? Eigen::VectorXd(p.a_free.transpose() * y0) : Eigen::VectorXd(0);
  return p;
}

void write_problem(std::ostream& os, const SdpProblem& p) {
  os.precision(17);
  os << "sdp 1\n";
  os << "blocks " << p.blocks.size() << "\n";
  for (const auto& b : p.blocks)
    os << (b.type == BlockType::Real ? "R " : "C ") << b.dim << "\n";
  os << "rows " << p.num_rows() << " free " << p.num_free() << "\n";
  for (int i = 0; i < p.a_psd.rows(); ++i)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.a_psd, i); it; ++it)
      os << "A " << it.row() << " " << it.col() << " " << it.value() << "\n";
  for (int i = 0; i < p.a_free.rows(); ++i)
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(p.a_free, i); it; ++it)
      os << "F " << it.row() << " " << it.col() << " " << it.value() << "\n";
  for (int i = 0; i < p.b.size(); ++i)
    if (p.b[i] != 0) os << "b " << i << " " << p.b[i] << "\n";
  for (int i = 0; i < p.c_psd.size(); ++i)
    if (p.c_psd[i] != 0) os << "c " << i << " " << p.c_psd[i] << "\n";
  for (int i = 0; i < p.c_free.size(); ++i)
    if (p.c_free[i] != 0) os << "cf " << i << " " << p.c_free[i] << "\n";
  os << "end\n";
}

SdpProblem read_problem(std::istream& is) {
  SdpProblem p;
  std::string tok;
  int version = 0;
  is >> tok >> version;
  if (tok != "sdp") throw std::runtime_error("read_problem: bad header");
  size_t nblocks = 0;
  is >> tok >> nblocks;
  if (tok != "blocks") throw std::runtime_error("read_problem: expected blocks");
  for (size_t i = 0; i < nblocks; ++i) {
    std::string kind;
    int dim;
    is >> kind >> dim;
    p.blocks.push_back({dim, kind == "R" ? BlockType::Real : BlockType::Complex});
  }
  int m = 0, nf = 0;
  is >> tok >> m;
  if (tok != "rows") throw std::runtime_error("read_problem: expected rows");
  is >> tok >> nf;
  if (tok != "free") throw std::runtime_error("read_problem: expected free");
  const int n = p.svec_total();
  p.b = Eigen::VectorXd::Zero(m);
  p.c_psd = Eigen::VectorXd::Zero(n);
  p.c_free = Eigen::VectorXd::Zero(nf);
  std::vector<Eigen::Triplet<double>> ta, tf;
  while (is >> tok && tok != "end") {
    int i, j;
    double v;
    if (tok == "A") {
      is >> i >> j >> v;
      ta.emplace_back(i, j, v);
    } else if (tok == "F") {
      is >> i >> j >> v;
      tf.emplace_back(i, j, v);
    } else if (tok == "b") {
      is >> i >> v;
      p.b[i] = v;
    } else if (tok == "c") {
      is >> i >> v;
      p.c_psd[i] = v;
    } else if (tok == "cf") {
      is >> i >> v;
      p.c_free[i] = v;
    } else {
      throw std::runtime_error("read_problem: unknown record " + tok);
    }
  }
  p.a_psd.resize(m, n);
  p.a_psd.setFromTriplets(ta.begin(), ta.end());
  p.a_free.resize(m, nf);
  p.a_free.setFromTriplets(tf.begin(), tf.end());
  return p;
}

}  // namespace ltavg
