#include "nomabf/sdp.hpp"

#include <sstream>

#include <gtest/gtest.h>

#include "support/checks.hpp"

namespace nomabf {
namespace sdp {
namespace {

GTEST_TEST(SdpTest, AnalyticSuite) {
  for (const auto& s : testing::analytic_sdps()) {
    SCOPED_TRACE(s.name);
    const SdpSolution sol = solve_sdp(s.problem);
    ASSERT_EQ(sol.status, SolverStatus::Optimal);
    EXPECT_NEAR(sol.objective_value, s.optimum, 1e-6);
    // Certificate: the point is feasible and the reported gap is within tolerance.
    EXPECT_GE(min_block_eigenvalue(s.problem, sol.y), -1e-7);
    EXPECT_LE(sol.duality_gap, 1e-7 * (1.0 + std::abs(sol.objective_value)));
  }
}

GTEST_TEST(SdpTest, ProductBoundMinimizer) {
  const auto suite = testing::analytic_sdps();
  const SdpSolution sol = solve_sdp(suite[1].problem);
  ASSERT_EQ(sol.status, SolverStatus::Optimal);
  EXPECT_NEAR(sol.y(0), 1.0, 1e-5);
  EXPECT_NEAR(sol.y(1), 1.0, 1e-5);
}

GTEST_TEST(SdpTest, DetectsInfeasible) {
  // y >= 1 and -y >= 0.
  SdpProblem p(1);
  p.objective << 1;
  p.add_linear_inequality(-1, {{0, 1.0}});
  p.add_linear_inequality(0, {{0, -1.0}});
  EXPECT_EQ(solve_sdp(p).status, SolverStatus::Infeasible);
}

GTEST_TEST(SdpTest, DetectsInfeasibleMatrixBlock) {
  // [[y, 1], [1, -y]] is never PSD.
  SdpProblem p(1);
  p.objective << 1;
  p.blocks.push_back({testing::mat2(0, 1, 1, 0), {{0, testing::mat2(1, 0, 0, -1)}}});
  EXPECT_EQ(solve_sdp(p).status, SolverStatus::Infeasible);
}

GTEST_TEST(SdpTest, DetectsUnbounded) {
  // min y s.t. -y >= 0.
  SdpProblem p(1);
  p.objective << 1;
  p.add_linear_inequality(0, {{0, -1.0}});
  EXPECT_EQ(solve_sdp(p).status, SolverStatus::Unbounded);
}

GTEST_TEST(SdpTest, IterationCapIsReported) {
  const auto suite = testing::analytic_sdps();
  SdpOptions opt;
  opt.max_iter = 2;
  opt.classify_failures = false;
  EXPECT_EQ(solve_sdp(suite[3].problem, opt).status, SolverStatus::MaxIterations);
}

GTEST_TEST(SdpTest, RandomFeasibleProblemsMeetContract) {
  // min tr(C X)-style problems: minimize c^T y over F0 + sum y_i F_i >= 0
  // with F0 > 0, so y = 0 is strictly feasible, and c chosen as the trace
  // of a PSD matrix against F_i, which keeps the problem bounded.
  Rng rng = make_rng({41});
  for (int n = 0; n < 30; ++n) {
    const int m = testing::uniform_int(rng, 1, 5);
    const int k = testing::uniform_int(rng, 2, 5);
    SdpProblem p(m);
    LmiBlock b;
    Eigen::VectorXd spec(k);
    for (int i = 0; i < k; ++i) spec(i) = testing::uniform(rng, 0.5, 2.0);
    b.constant = testing::hermitian_with_spectrum(rng, spec).real();
    b.constant = 0.5 * (b.constant + b.constant.transpose()).eval();
    MatrixXd Z = MatrixXd::Random(k, k);
    Z = Z * Z.transpose() + MatrixXd::Identity(k, k);
    for (int i = 0; i < m; ++i) {
      MatrixXd F = MatrixXd::Random(k, k);
      F = 0.5 * (F + F.transpose()).eval();
      b.terms.emplace_back(i, F);
      p.objective(i) = (Z.array() * F.array()).sum();
    }
    p.blocks.push_back(b);
    const SdpSolution sol = solve_sdp(p);
    ASSERT_EQ(sol.status, SolverStatus::Optimal);
    EXPECT_GE(min_block_eigenvalue(p, sol.y), -1e-7 * (1.0 + b.constant.norm()));
    // Weak duality with X = Z: c^T y >= -<F0, Z>.
    EXPECT_GE(sol.objective_value, -(b.constant.array() * Z.array()).sum() - 1e-6);
    // Objective no worse than the strictly feasible origin.
    EXPECT_LE(sol.objective_value, 1e-7);
  }
}

GTEST_TEST(SdpTest, HermitianEmbeddingSpectrum) {
  CMat Y(2, 2);
  Y << 0, Complex(0, -1), Complex(0, 1), 0;
  const MatrixXd E = embed_hermitian(Y);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(E);
  const Eigen::Vector4d expected(-1, -1, 1, 1);
  EXPECT_LT((es.eigenvalues() - expected).norm(), 1e-14);
  EXPECT_LT((E - E.transpose()).norm(), 1e-15);

  CMat bad(2, 2);
  bad << 0, 1, 2, 0;
  EXPECT_THROW(embed_hermitian(bad), std::invalid_argument);
}

GTEST_TEST(SdpTest, HermitianEigMatchesConstruction) {
  Rng rng = make_rng({42});
  Eigen::VectorXd spec(4);
  spec << -2, 0.5, 1, 3;
  const CMat H = testing::hermitian_with_spectrum(rng, spec);
  const HermitianEig eig = hermitian_eig(H);
  EXPECT_LT((eig.values - spec).norm(), 1e-12);
  EXPECT_LT((H * eig.vectors - eig.vectors * eig.values.cast<Complex>().asDiagonal()).norm(),
            1e-12);
  EXPECT_LT((eig.vectors.adjoint() * eig.vectors - CMat::Identity(4, 4)).norm(), 1e-12);
}

GTEST_TEST(SdpTest, ValidateRejectsBadProblems) {
  SdpProblem p(1);
  p.objective << 1;
  p.blocks.push_back({testing::mat2(1, 0, 0, 1), {{3, testing::mat2(1, 0, 0, 1)}}});
  EXPECT_THROW(p.validate(), std::invalid_argument);
  EXPECT_THROW(solve_sdp(p), std::invalid_argument);

  SdpProblem q(1);
  q.objective << 1;
  q.blocks.push_back({testing::mat2(1, 2, 0, 1), {{0, testing::mat2(1, 0, 0, 1)}}});
  EXPECT_THROW(q.validate(), std::invalid_argument);
}

GTEST_TEST(SdpTest, WriteProblemDump) {
  const auto suite = testing::analytic_sdps();
  std::ostringstream os;
  write_problem(os, suite[1].problem);
  EXPECT_FALSE(os.str().empty());
  EXPECT_NE(os.str().find('2'), std::string::npos);
}

}  // namespace
}  // namespace sdp
}  // namespace nomabf
