#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hypre/sdm.hpp"
#include "oracle.hpp"

using namespace hypre;

TEST(Accumulator, FreshIsEmptyWithAllOnesView) {
  AccumulatorVector acc(128, 4);
  EXPECT_TRUE(acc.empty());
  EXPECT_EQ(acc.binary_view(), Hypervector::ones(128));
  EXPECT_EQ(acc.min_value(), -8);
  EXPECT_EQ(acc.max_value(), 7);
  EXPECT_EQ(acc.storage_bits(), 512u);
  EXPECT_THROW(AccumulatorVector(128, 0), ConfigError);
  EXPECT_THROW(AccumulatorVector(128, 9), ConfigError);
  EXPECT_THROW(AccumulatorVector(100, 4), ConfigError);
}

// Every two-bit counter state against every step direction, with and
// without the mask bit.
TEST(Accumulator, TwoBitClampExhaustive) {
  for (int start = -2; start <= 1; ++start) {
    for (int dir = 0; dir < 2; ++dir) {
      for (int bit = 0; bit < 2; ++bit) {
        for (int masked = 0; masked < 2; ++masked) {
          AccumulatorVector acc(64, 2);
          const Hypervector up = Hypervector::ones(64);
          const Hypervector down = Hypervector::zeros(64);
          // Walk to the start state from zero.
          for (int s = 0; s < start; ++s) acc.step_toward(up);
          for (int s = 0; s > start; --s) acc.step_toward(down);
          ASSERT_EQ(acc.counter(0), start);
          Hypervector mask(64);
          if (!masked) mask.set_bit(0, true);
          const Hypervector& q = bit ? up : down;
          if (dir) {
            acc.step_toward(q, &mask);
          } else {
            acc.step_away(q, &mask);
          }
          const int delta = (bit == dir) ? 1 : -1;
          const int want = masked ? start : std::clamp(start + delta, -2, 1);
          EXPECT_EQ(acc.counter(0), want) << start << dir << bit << masked;
          EXPECT_EQ(acc.counter(1), start);
          EXPECT_EQ(acc.binary_view().bit(0), want >= 0);
        }
      }
    }
  }
}

TEST(Accumulator, MatchesCounterOracleUnderRandomSteps) {
  for (unsigned bits : {1u, 2u, 3u, 4u, 8u}) {
    SeededRng rng(bits);
    AccumulatorVector acc(192, bits);
    oracle::Counters ref(192, bits);
    for (int step = 0; step < 400; ++step) {
      const auto q = random_hv(rng, 192);
      const bool toward = rng.bit();
      const bool use_mask = rng.bit();
      const auto mask = random_mask(192, 0.3, rng);
      const auto qb = oracle::unpack(q);
      const auto mb = oracle::unpack(mask);
      if (toward) {
        acc.step_toward(q, use_mask ? &mask : nullptr);
      } else {
        acc.step_away(q, use_mask ? &mask : nullptr);
      }
      ref.step(qb, toward, use_mask ? &mb : nullptr);
      ASSERT_EQ(oracle::unpack(acc.binary_view()), ref.view()) << bits << " step " << step;
      bool all_zero = true;
      for (std::size_t i = 0; i < 192; ++i) {
        ASSERT_EQ(acc.counter(i), ref.c[i]);
        all_zero &= ref.c[i] == 0;
      }
      ASSERT_EQ(acc.empty(), all_zero);
    }
    EXPECT_EQ(acc.trained_count(), 400u);
  }
}

TEST(Accumulator, SnapshotRoundTrip) {
  SeededRng rng(2);
  AccumulatorVector acc(256, 4);
  for (int i = 0; i < 20; ++i) acc.step_toward(random_hv(rng, 256));
  std::stringstream ss;
  acc.write_snapshot(ss);
  EXPECT_EQ(ss.str().size(), 4u + 1u + 8u + 256u);
  const auto back = AccumulatorVector::read_snapshot(ss);
  EXPECT_EQ(back, acc);
  EXPECT_EQ(back.binary_view(), acc.binary_view());
  EXPECT_EQ(back.empty(), acc.empty());
}

TEST(Accumulator, SnapshotErrors) {
  std::stringstream truncated("\x40\x00\x00");
  EXPECT_THROW(AccumulatorVector::read_snapshot(truncated), UsageError);
  AccumulatorVector acc(64, 2);
  std::stringstream ss;
  acc.write_snapshot(ss);
  std::string s = ss.str();
  s[13] = 5;  // first counter, out of range for two bits
  std::stringstream bad(s);
  EXPECT_THROW(AccumulatorVector::read_snapshot(bad), UsageError);
}

TEST(RandomMask, ExactCount) {
  SeededRng rng(1);
  for (double f : {0.0, 0.02, 0.125, 0.5, 1.0}) {
    EXPECT_EQ(random_mask(1024, f, rng).popcount(), static_cast<std::size_t>(std::llround(f * 1024)));
  }
  EXPECT_THROW(random_mask(64, 1.5, rng), UsageError);
}

TEST(Training, AddThenFullSubtractErases) {
  SeededRng rng(3);
  AccumulatorVector acc(1024, 4);
  const auto q = random_hv(rng, 1024);
  train_add(acc, q, 0.0, rng);
  EXPECT_FALSE(acc.empty());
  train_sub(acc, q, SubtractMode::full(), rng);
  EXPECT_TRUE(acc.empty());
  for (auto c : acc.counters()) EXPECT_EQ(c, 0);
}

TEST(Training, AddTwiceSubtractOnceStillMatches) {
  SeededRng rng(4);
  AccumulatorVector acc(1024, 4);
  const auto q = random_hv(rng, 1024);
  train_add(acc, q, 0.0, rng);
  train_add(acc, q, 0.0, rng);
  train_sub(acc, q, SubtractMode::full(), rng);
  EXPECT_EQ(query(acc, nullptr, q, {}).verdict, Verdict::kMatchTaken);
}

TEST(Training, PartialSubtractWeakensWithoutErasing) {
  SeededRng rng(5);
  AccumulatorVector acc(1024, 4);
  const auto q = random_hv(rng, 1024);
  train_add(acc, q, 0.0, rng);
  train_sub(acc, q, SubtractMode::partial(0.5), rng);
  const auto m = hamming(acc.binary_view(), q).matching_bits;
  // Half the counters drop back to zero, whose view bit is 1.
  EXPECT_GT(m, match_threshold(1024, 4.0));
  EXPECT_LT(m, 1024u);
  EXPECT_FALSE(acc.empty());
}

TEST(Training, NoisyAddMatchesMostBits) {
  SeededRng rng(6);
  AccumulatorVector acc(4096, 4);
  const auto q = random_hv(rng, 4096);
  train_add(acc, q, 0.05, rng);
  const double frac = static_cast<double>(hamming(acc.binary_view(), q).matching_bits) / 4096.0;
  EXPECT_NEAR(frac, 0.975, 0.01);
  EXPECT_THROW(train_add(acc, q, 1.0, rng), UsageError);
  EXPECT_THROW(train_add(acc, Hypervector(64), 0.0, rng), UsageError);
}

TEST(Training, OneShotMatchAtHighThreshold) {
  SeededRng rng(7);
  for (int i = 0; i < 100; ++i) {
    AccumulatorVector acc(1024, 4);
    const auto q = random_hv(rng, 1024);
    train_add(acc, q, 0.0, rng);
    ASSERT_EQ(query(acc, nullptr, q, {}).verdict, Verdict::kMatchTaken);
  }
}

TEST(Query, EmptyAccumulatorsAreIndependent) {
  SeededRng rng(8);
  AccumulatorVector t(256, 4), nt(256, 4);
  const auto q = random_hv(rng, 256);
  EXPECT_EQ(query(t, nullptr, q, {}).verdict, Verdict::kIndependent);
  EXPECT_EQ(query(t, &nt, q, {}).verdict, Verdict::kIndependent);
  EXPECT_EQ(query(t, &nt, Hypervector::ones(256), {}).verdict, Verdict::kIndependent);
}

TEST(Query, OneVectorAntiCorrelationReadsNotTaken) {
  SeededRng rng(9);
  AccumulatorVector t(1024, 4);
  const auto q = random_hv(rng, 1024);
  train_add(t, complement(q), 0.0, rng);
  const auto r = query(t, nullptr, q, {});
  EXPECT_EQ(r.verdict, Verdict::kMatchNotTaken);
  EXPECT_FALSE(r.leans_taken);
}

TEST(Query, TwoVectorBetterSideWins) {
  SeededRng rng(10);
  AccumulatorVector t(1024, 4), nt(1024, 4);
  const auto a = random_hv(rng, 1024);
  const auto b = random_hv(rng, 1024);
  train_add(t, a, 0.0, rng);
  train_add(nt, b, 0.0, rng);
  EXPECT_EQ(query(t, &nt, a, {}).verdict, Verdict::kMatchTaken);
  const auto r = query(t, &nt, b, {});
  EXPECT_EQ(r.verdict, Verdict::kMatchNotTaken);
  EXPECT_EQ(r.deciding_stats().matching_bits, 1024u);
}

TEST(Classify, BandsAndTies) {
  using S = SimilarityStats;
  const std::size_t n = 1024;
  // hi = 576, lo = 544
  auto one = [&](std::size_t m) { return classify(S::from_matching(n, m), std::nullopt, false, true, {}); };
  EXPECT_EQ(one(576).verdict, Verdict::kMatchTaken);
  EXPECT_EQ(one(575).verdict, Verdict::kMarginal);
  EXPECT_EQ(one(544).verdict, Verdict::kMarginal);
  EXPECT_EQ(one(543).verdict, Verdict::kIndependent);
  EXPECT_EQ(one(512).verdict, Verdict::kIndependent);
  EXPECT_EQ(one(481).verdict, Verdict::kIndependent);
  EXPECT_EQ(one(480).verdict, Verdict::kMarginal);
  EXPECT_FALSE(one(480).leans_taken);
  EXPECT_EQ(one(448).verdict, Verdict::kMatchNotTaken);

  auto two = [&](std::size_t mt, std::size_t mn) {
    return classify(S::from_matching(n, mt), S::from_matching(n, mn), false, false, {});
  };
  EXPECT_EQ(two(600, 600).verdict, Verdict::kMatchTaken);
  EXPECT_EQ(two(580, 700).verdict, Verdict::kMatchNotTaken);
  EXPECT_EQ(two(550, 560).verdict, Verdict::kMarginal);
  EXPECT_FALSE(two(550, 560).leans_taken);
  EXPECT_EQ(two(400, 400).verdict, Verdict::kIndependent);
  EXPECT_THROW(classify(S::from_matching(n, 0), std::nullopt, false, true, {1.0, 2.0}), UsageError);
}

TEST(Query, RandomQueriesRarelyMatch) {
  SeededRng rng(11);
  AccumulatorVector acc(4096, 4);
  for (int i = 0; i < 10; ++i) train_add(acc, random_hv(rng, 4096), 0.0, rng);
  int confident = 0;
  for (int i = 0; i < 2000; ++i) confident += query(acc, nullptr, random_hv(rng, 4096), {}).confident();
  EXPECT_LE(confident, 2);
}
