#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "sgplay/diagnostics.hpp"
#include "sgplay/equilibrium.hpp"
#include "sgplay/generators.hpp"

using namespace sgplay;

namespace {

Trajectory synthetic(std::size_t n, double amplitude, double u_step = 0.0) {
  Trajectory t;
  for (std::size_t k = 0; k < n; ++k) {
    TrajectoryRecord r;
    r.t = static_cast<double>(k);
    r.u = {ValueVector{0.5 + u_step * static_cast<double>(k)}};
    const double d = (k % 2 ? amplitude : -amplitude);
    r.bellman_gap = {d};
    r.gamma = {r.u[0][0] + d};
    r.opt_gap = {0.0};
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST(OptimalityGap, ZeroAtAuxiliaryNashAndConstructedGap) {
  const Game g = coordination(0.5);
  const std::vector<ValueVector> u{ValueVector{0.0}};
  const MixedProfile diag = MixedProfile::pure(g, 0);
  for (double gap : optimality_gap(g, u, diag, 0)) EXPECT_EQ(gap, 0.0);
  // Player 0 plays 0.8/0.2 against pure 0: payoff 0.5 * 0.8 vs best 0.5, gap 0.1.
  MixedProfile x = diag;
  x.at(0, 0)[0] = 0.8;
  x.at(0, 0)[1] = 0.2;
  const auto gaps = optimality_gap(g, u, x, 0);
  EXPECT_NEAR(gaps[0], 0.1, 1e-15);
}

TEST(OptimalityGap, MatchesPureActionEnumeration) {
  std::mt19937_64 rng(8);
  GeneratorSpec spec;
  spec.num_states = 3;
  spec.num_actions = {3, 2, 2};
  const Game g = random_game(spec);
  for (int trial = 0; trial < 20; ++trial) {
    const MixedProfile x = oracle::random_profile(g, rng);
    const std::vector<ValueVector> u{ValueVector{0.2, 0.5, -0.1}};
    for (int s = 0; s < 3; ++s) {
      const auto gaps = optimality_gap(g, u, x, s);
      for (int i = 0; i < 3; ++i) {
        double best = -1e300;
        for (int a = 0; a < g.num_actions(i); ++a) {
          MixedProfile y = x;
          auto yi = y.at(s, i);
          std::fill(yi.begin(), yi.end(), 0.0);
          yi[a] = 1.0;
          best = std::max(best, oracle::shapley(g, i, s, u[0], y));
        }
        EXPECT_NEAR(gaps[i], std::max(0.0, best - oracle::shapley(g, i, s, u[0], x)), 1e-12);
      }
    }
  }
}

TEST(DualityGap, SaddlePointAndPureEntry) {
  const Game g = matching_pennies(0.5);
  const ValueVector u{0.0};
  EXPECT_NEAR(duality_gap(g, u, MixedProfile::uniform(g), 0), 0.0, 1e-15);
  // Both pure on action 0: row max over a0 vs column min over a1 of (1-delta) r.
  const MixedProfile x = MixedProfile::pure(g, 0);
  EXPECT_NEAR(duality_gap(g, u, x, 0), 0.5 * 1.0 - 0.5 * (-1.0), 1e-15);
  const std::vector<ValueVector> uu{u, ValueVector{0.0}};
  for (double d : optimality_gap(g, uu, x, 0)) EXPECT_GE(duality_gap(g, u, x, 0) + 1e-15, d);
  EXPECT_THROW(duality_gap(coordination(0.5), u, x, 0), std::invalid_argument);
}

TEST(DualityGap, DominatesEachPlayersGapOnRandomProfiles) {
  std::mt19937_64 rng(13);
  GeneratorSpec spec;
  spec.kind = GameClassKind::kZeroSum;
  spec.num_states = 2;
  spec.num_actions = {3, 3};
  const Game g = random_game(spec);
  for (int trial = 0; trial < 30; ++trial) {
    const MixedProfile x = oracle::random_profile(g, rng);
    const ValueVector u{0.3, -0.2};
    const std::vector<ValueVector> uu{u, ValueVector{-0.3, 0.2}};
    for (int s = 0; s < 2; ++s) {
      const double w = duality_gap(g, u, x, s);
      const auto gaps = optimality_gap(g, uu, x, s);
      EXPECT_GE(w + 1e-12, gaps[0]);
      EXPECT_GE(w + 1e-12, gaps[1]);
      EXPECT_NEAR(w, gaps[0] + gaps[1], 1e-12);
    }
  }
}

TEST(EnergyAndPsi, ShiftedEstimates) {
  const Game g = paper_instance();
  const MixedProfile x = MixedProfile::uniform(g);
  const auto v = stationary_value(g, 0, x);
  EXPECT_NEAR(energy_w(g, v, x), 0.0, 1e-12);
  EXPECT_NEAR(overestimation(g, v, x), 0.0, 1e-12);
  // Shifting u by -0.1 shifts Gamma by -0.1 delta.
  ValueVector u = v;
  for (double& val : u) val -= 0.1;
  EXPECT_NEAR(energy_w(g, u, x), 0.1 * (1.0 - g.delta()), 1e-12);
}

TEST(PriorDeviation, MaxOverPlayersAndStates) {
  const std::vector<ValueVector> u{ValueVector{0.0, 1.0}, ValueVector{0.5, 1.7}};
  EXPECT_NEAR(prior_deviation(u, std::vector<double>{0.0, 0.5}), 0.2, 1e-15);
}

TEST(DetectConvergence, ConstantTrajectoryConvergesAtZero) {
  const auto v = detect_convergence(synthetic(150, 0.0), 100, 1e-3);
  EXPECT_TRUE(v.converged);
  EXPECT_EQ(v.first_index, 0u);
}

TEST(DetectConvergence, OscillationAboveToleranceDoesNot) {
  EXPECT_FALSE(detect_convergence(synthetic(300, 2e-3), 100, 1e-3).converged);
  // Drifting u also breaks the criterion.
  EXPECT_FALSE(detect_convergence(synthetic(300, 0.0, 1e-4), 100, 1e-3).converged);
}

TEST(DetectConvergence, FindsFirstStableIndex) {
  auto t = synthetic(200, 0.0);
  for (std::size_t k = 0; k < 40; ++k) t.records[k].bellman_gap = {0.5};
  const auto v = detect_convergence(t, 100, 1e-3);
  EXPECT_TRUE(v.converged);
  EXPECT_EQ(v.first_index, 40u);
  for (std::size_t k = 0; k < 150; ++k) t.records[k].bellman_gap = {0.5};
  EXPECT_FALSE(detect_convergence(t, 100, 1e-3).converged);
}

TEST(DetectConvergence, RejectsBadWindow) {
  EXPECT_THROW(detect_convergence(synthetic(10, 0.0), 1, 1e-3), std::invalid_argument);
  EXPECT_THROW(detect_convergence(synthetic(10, 0.0), 11, 1e-3), std::invalid_argument);
}
