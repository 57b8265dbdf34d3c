#include <sstream>

#include "doctest.h"
#include "ltavg/sdp.hpp"

using namespace ltavg;

namespace {

// min x s.t. the 1x1 block [x - 2] is PSD: row X - x = -2, minimize x.
SdpProblem shift_problem() {
  SdpProblem p;
  p.blocks = {{1, BlockType::Real}};
  std::vector<Eigen::Triplet<double>> ta = {{0, 0, 1.0}};
  std::vector<Eigen::Triplet<double>> tf = {{0, 0, -1.0}};
  p.a_psd.resize(1, 1);
  p.a_psd.setFromTriplets(ta.begin(), ta.end());
  p.a_free.resize(1, 1);
  p.a_free.setFromTriplets(tf.begin(), tf.end());
  p.b = Eigen::VectorXd::Constant(1, -2.0);
  p.c_psd = Eigen::VectorXd::Zero(1);
  p.c_free = Eigen::VectorXd::Constant(1, 1.0);
  return p;
}

// min tr(diag(1,2) X) s.t. tr X = 1, X PSD; optimum 1 at X = diag(1, 0).
SdpProblem diag_problem() {
  SdpProblem p;
  p.blocks = {{2, BlockType::Real}};
  Eigen::MatrixXd C(2, 2), A(2, 2);
  C << 1, 0, 0, 2;
  A << 1, 0, 0, 1;
  Eigen::VectorXd asv = mat_to_svec(A);
  std::vector<Eigen::Triplet<double>> ta;
  for (int i = 0; i < asv.size(); ++i)
    if (asv[i] != 0) ta.emplace_back(0, i, asv[i]);
  p.a_psd.resize(1, 3);
  p.a_psd.setFromTriplets(ta.begin(), ta.end());
  p.a_free.resize(1, 0);
  p.b = Eigen::VectorXd::Constant(1, 1.0);
  p.c_psd = mat_to_svec(C);
  p.c_free = Eigen::VectorXd(0);
  return p;
}

}  // namespace

TEST_CASE("sdp: free-variable shift problem solves to 2") {
  SdpSolution sol = solve(shift_problem());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(sol.w[0] == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("sdp: hand-checked diagonal problem") {
  SdpSolution sol = solve(diag_problem());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0).epsilon(1e-7));
  Eigen::MatrixXd X = solution_block_real(diag_problem(), sol.x, 0);
  CHECK(X(0, 0) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(X(1, 1) == doctest::Approx(0.0).epsilon(1e-5));
  KktReport rep = verify_kkt(diag_problem(), sol);
  CHECK(rep.pass);
}

TEST_CASE("sdp: primal infeasible 1x1") {
  SdpProblem p;
  p.blocks = {{1, BlockType::Real}};
  std::vector<Eigen::Triplet<double>> ta = {{0, 0, 1.0}};
  p.a_psd.resize(1, 1);
  p.a_psd.setFromTriplets(ta.begin(), ta.end());
  p.a_free.resize(1, 0);
  p.b = Eigen::VectorXd::Constant(1, -1.0);
  p.c_psd = Eigen::VectorXd::Zero(1);
  p.c_free = Eigen::VectorXd(0);
  SdpSolution sol = solve(p);
  CHECK(sol.status == SolveStatus::PrimalInfeasible);
}

TEST_CASE("sdp: dual infeasible (unbounded primal)") {
  SdpProblem p;
  p.blocks = {{2, BlockType::Real}};
  Eigen::MatrixXd A(2, 2), C(2, 2);
  A << 0, 0, 0, 1;
  C << -1, 0, 0, 0;
  Eigen::VectorXd asv = mat_to_svec(A);
  std::vector<Eigen::Triplet<double>> ta;
  for (int i = 0; i < asv.size(); ++i)
    if (asv[i] != 0) ta.emplace_back(0, i, asv[i]);
  p.a_psd.resize(1, 3);
  p.a_psd.setFromTriplets(ta.begin(), ta.end());
  p.a_free.resize(1, 0);
  p.b = Eigen::VectorXd::Constant(1, 1.0);
  p.c_psd = mat_to_svec(C);
  p.c_free = Eigen::VectorXd(0);
  SdpSolution sol = solve(p);
  CHECK(sol.status == SolveStatus::DualInfeasible);
}

TEST_CASE("sdp: random strictly feasible battery with KKT verification") {
  for (unsigned long seed = 1; seed <= 20; ++seed) {
    SdpProblem p = random_feasible_problem(seed, 12, 30);
    SdpSolution sol = solve(p);
    REQUIRE_MESSAGE(sol.status == SolveStatus::Optimal, "seed ", seed);
    KktReport rep = verify_kkt(p, sol);
    CHECK_MESSAGE(rep.pass, "seed ", seed, " pres ", rep.primal_res, " dres ", rep.dual_res,
                  " gap ", rep.rel_gap);
  }
}

TEST_CASE("sdp: determinism and objective scaling") {
  SdpProblem p = random_feasible_problem(99, 10, 20);
  SdpSolution s1 = solve(p), s2 = solve(p);
  CHECK(s1.iterations == s2.iterations);
  CHECK(s1.objective == s2.objective);  // bitwise

  SdpProblem p10 = p;
  p10.c_psd *= 10.0;
  p10.c_free *= 10.0;
  SdpSolution s10 = solve(p10);
  CHECK(s10.status == s1.status);
  CHECK(s10.objective == doctest::Approx(10.0 * s1.objective).epsilon(1e-6));
}

TEST_CASE("sdp: complementarity grows under perturbation") {
  SdpProblem p = diag_problem();
  SdpSolution sol = solve(p);
  REQUIRE(sol.status == SolveStatus::Optimal);
  const double before = sol.x.dot(sol.z);
  Eigen::MatrixXd X = solution_block_real(p, sol.x, 0);
  X.diagonal().array() += 1e-3;
  Eigen::VectorXd xp = mat_to_svec(X);
  const double after = xp.dot(sol.z);
  CHECK(after - before >= 1e-4);
}

TEST_CASE("sdp: feasible but suboptimal point reports a gap") {
  SdpProblem p = diag_problem();
  SdpSolution fake;
  fake.status = SolveStatus::Optimal;
  Eigen::MatrixXd X(2, 2);
  X << 0.5, 0, 0, 0.5;
  fake.x = mat_to_svec(X);
  fake.w = Eigen::VectorXd(0);
  fake.y = Eigen::VectorXd::Zero(1);
  fake.z = p.c_psd;  // C - 0 * A
  KktReport rep = verify_kkt(p, fake);
  CHECK(rep.primal_res <= 1e-12);
  CHECK(rep.dual_res <= 1e-12);
  CHECK(rep.rel_gap > 0.3);
  CHECK_FALSE(rep.pass);
}

TEST_CASE("sdp: text serialization round trip") {
  SdpProblem p = random_feasible_problem(7, 8, 15);
  std::stringstream ss;
  write_problem(ss, p);
  SdpProblem q = read_problem(ss);
  SdpSolution sp = solve(p), sq = solve(q);
  REQUIRE(sp.status == SolveStatus::Optimal);
  REQUIRE(sq.status == SolveStatus::Optimal);
  CHECK(sp.objective == doctest::Approx(sq.objective).epsilon(1e-9));
}

TEST_CASE("sdp: dimension cap enforced") {
  SdpProblem p = diag_problem();
  SolverSettings s;
  s.dim_cap = 1;
  CHECK_THROWS_AS(solve(p, s), std::invalid_argument);
}
