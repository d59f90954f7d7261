#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

TEST(DiscreteGronwall, ConclusionHoldsOnRandomSequences) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const auto seq = oracle::gronwall_sequence(rng, 200);
    for (int n = 0; n < 200; ++n) {
      const double bound = oracle::gronwall_bound(seq, n);
      EXPECT_LE(seq.y[n], bound + 1e-12 * (1.0 + bound)) << "trial " << trial << " n " << n;
    }
  }
}

TEST(DiscreteGronwall, SequencesSatisfyHypothesis) {
  std::mt19937_64 rng(7);
  const auto seq = oracle::gronwall_sequence(rng, 500);
  for (std::size_t n = 0; n + 1 < seq.y.size(); ++n) {
    EXPECT_LE(seq.y[n + 1] - seq.y[n], seq.g[n + 1] * seq.y[n] + seq.b[n + 1] + 1e-12);
    EXPECT_GT(1.0 + seq.g[n + 1], 0.0);
    EXPECT_LT(1.0 + seq.g[n + 1], 1.0);
  }
}

TEST(DiscreteGronwall, BoundIsTightForEqualityCase) {
  // y_{n+1} = (1 + g) y_n with b = 0 reaches the bound exactly.
  oracle::GronwallSequence seq{{4.0}, {0.0}, {0.0}};
  for (int n = 0; n < 20; ++n) {
    seq.g.push_back(-0.5);
    seq.b.push_back(0.0);
    seq.y.push_back(0.5 * seq.y.back());
  }
  for (int n = 0; n <= 20; ++n) EXPECT_DOUBLE_EQ(seq.y[n], oracle::gronwall_bound(seq, n));
}
