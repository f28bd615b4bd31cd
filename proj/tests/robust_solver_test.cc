#include "nomabf/robust_solver.hpp"

#include <gtest/gtest.h>

#include "support/checks.hpp"

namespace nomabf {
namespace {

ChannelSet paper_channels(Rng& rng, double epsilon = 0.01) {
  ChannelSet ch;
  ch.epsilon = epsilon;
  ch.sigma2 = 0.01;
  for (int u = 0; u < 3; ++u) ch.estimates.push_back(sample_channel(rng, 3));
  return canonicalize_order(ch).channels;
}

GTEST_TEST(RobustSolverTest, ConvergenceDelta) {
  BeamformerSet prev = BeamformerSet::zeros(2, 1);
  BeamformerSet next = BeamformerSet::zeros(2, 1);
  next.beams[0] << 3.0, 4.0;
  EXPECT_DOUBLE_EQ(convergence_delta(prev, next), 2.5);
  EXPECT_EQ(convergence_delta(next, next), 0.0);
  EXPECT_THROW(convergence_delta(prev, BeamformerSet::zeros(2, 2)), std::invalid_argument);
}

GTEST_TEST(RobustSolverTest, MatchedFilterInitialization) {
  Rng rng = make_rng({71});
  const ChannelSet ch = paper_channels(rng);
  const QosTargets q = QosTargets::from_db({0.0, 3.0, 6.0});
  const BeamformerSet w = init_beamformers(ch, q);
  for (int u = 0; u < 3; ++u) {
    const double p = 3 * q.gamma[u] * ch.sigma2 / ch.estimates[u].squaredNorm();
    EXPECT_NEAR(w.beams[u].squaredNorm(), p, 1e-14);
    EXPECT_NEAR(std::abs(ch.estimates[u].normalized().dot(w.beams[u])), std::sqrt(p), 1e-14);
  }
}

GTEST_TEST(RobustSolverTest, InitialErrorsLieInBall) {
  Rng rng = make_rng({72});
  const ErrorSet e = init_errors(rng, 0.05, 3, 4);
  ASSERT_EQ(e.users(), 4);
  for (const auto& x : e.errors) EXPECT_LE(x.norm(), 0.05);
}

GTEST_TEST(RobustSolverTest, SingleUserPerfectCsiClosedForm) {
  Rng rng = make_rng({73});
  for (int n = 0; n < 10; ++n) {
    ChannelSet ch;
    ch.sigma2 = 0.01;
    ch.estimates = {sample_channel(rng, 3)};
    const QosTargets q = QosTargets::uniform_db(1, 5.0);
    for (InitialBeams init : {InitialBeams::MatchedFilter, InitialBeams::NonRobust}) {
      SolverConfig cfg;
      cfg.initial_beams = init;
      const RobustSolution s = run(ch, q, cfg);
      ASSERT_EQ(s.status, SolverStatus::Optimal);
      EXPECT_TRUE(s.converged);
      EXPECT_NEAR(s.total_power, q.gamma[0] * ch.sigma2 / ch.estimates[0].squaredNorm(),
                  1e-6 * s.total_power);
    }
  }
}

GTEST_TEST(RobustSolverTest, ZeroRadiusMatchesNonRobust) {
  Rng rng = make_rng({74});
  for (int n = 0; n < 10; ++n) {
    const ChannelSet ch = paper_channels(rng, 0.0);
    const QosTargets q = QosTargets::uniform_db(3, 6.0);
    const RobustSolution s = run(ch, q);
    const SdrResult nr = solve_nonrobust(ch, q);
    ASSERT_EQ(s.status, SolverStatus::Optimal);
    ASSERT_EQ(nr.status, SolverStatus::Optimal);
    EXPECT_NEAR(s.total_power, nr.beam_power, 1e-5 * nr.beam_power);
    for (const auto& e : s.errors.errors) EXPECT_EQ(e.norm(), 0.0);
  }
}

GTEST_TEST(RobustSolverTest, PaperScaleRunsConvergeAndHoldAtDesignErrors) {
  Rng rng = make_rng({75});
  int converged = 0;
  const int runs = 40;
  for (int n = 0; n < runs; ++n) {
    const ChannelSet ch = paper_channels(rng);
    const QosTargets q = QosTargets::uniform_db(3, 0.0);
    SolverConfig cfg;
    cfg.seed = n;
    const RobustSolution s = run(ch, q, cfg);
    ASSERT_EQ(s.status, SolverStatus::Optimal);
    EXPECT_LE(s.iterations, cfg.i_max);
    EXPECT_EQ(static_cast<int>(s.per_iteration_delta.size()), s.iterations);
    for (double d : s.per_iteration_delta) EXPECT_TRUE(std::isfinite(d));
    if (s.converged) {
      ++converged;
      EXPECT_LT(s.per_iteration_delta.back(), cfg.delta_tol);
    }
    for (const auto& e : s.errors.errors) EXPECT_LE(e.norm(), ch.epsilon + 1e-9);
    const auto m = qos_margins(s.beams, ch, s.errors, q);
    for (int u = 0; u < 3; ++u) EXPECT_GE(m[u] / q.gamma[u], -1e-4);
  }
  EXPECT_GE(converged, 0.95 * runs);
}

GTEST_TEST(RobustSolverTest, DesignIsNoCheaperThanNonRobust) {
  Rng rng = make_rng({76});
  for (int n = 0; n < 10; ++n) {
    const ChannelSet ch = paper_channels(rng, 0.05);
    const QosTargets q = QosTargets::uniform_db(3, 3.0);
    const RobustSolution s = run(ch, q);
    const SdrResult nr = solve_nonrobust(ch, q);
    ASSERT_EQ(s.status, SolverStatus::Optimal);
    EXPECT_GE(s.total_power, nr.beam_power * (1 - 1e-3));
  }
}

GTEST_TEST(RobustSolverTest, DeterministicForFixedSeed) {
  Rng rng = make_rng({77});
  const ChannelSet ch = paper_channels(rng);
  const QosTargets q = QosTargets::uniform_db(3, 10.0);
  SolverConfig cfg;
  cfg.seed = 99;
  const RobustSolution a = run(ch, q, cfg);
  const RobustSolution b = run(ch, q, cfg);
  EXPECT_EQ(a.total_power, b.total_power);
  EXPECT_EQ(a.per_iteration_delta, b.per_iteration_delta);
  for (int u = 0; u < 3; ++u) EXPECT_EQ(a.beams.beams[u], b.beams.beams[u]);
}

GTEST_TEST(RobustSolverTest, NonConvergedRunKeepsLastBeams) {
  Rng rng = make_rng({78});
  const ChannelSet ch = paper_channels(rng, 0.05);
  SolverConfig cfg;
  cfg.i_max = 1;
  cfg.delta_tol = 1e-12;
  const RobustSolution s = run(ch, QosTargets::uniform_db(3, 5.0), cfg);
  ASSERT_EQ(s.status, SolverStatus::Optimal);
  EXPECT_FALSE(s.converged);
  EXPECT_EQ(s.iterations, 1);
  EXPECT_GT(s.total_power, 0.0);
}

GTEST_TEST(RobustSolverTest, InfeasibleRelaxationAborts) {
  ChannelSet ch;
  ch.epsilon = 0.5;
  ch.sigma2 = 0.01;
  ch.estimates = {CVec::Constant(1, 1.0), CVec::Constant(1, 1.0)};
  const RobustSolution s = run(ch, QosTargets::uniform_db(2, 10.0));
  EXPECT_EQ(s.status, SolverStatus::Infeasible);
  EXPECT_EQ(s.failed_iteration, 1);
}

GTEST_TEST(RobustSolverTest, ConfigValidation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.i_max = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.delta_tol = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.randomization_trials = -1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  EXPECT_EQ(parse_initial_beams("matched_filter"), InitialBeams::MatchedFilter);
  EXPECT_EQ(to_string(InitialBeams::NonRobust), "nonrobust");
  EXPECT_THROW(parse_initial_beams("zero"), std::invalid_argument);
}

}  // namespace
}  // namespace nomabf
