#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "hypre/hypervector.hpp"
#include "oracle.hpp"

using namespace hypre;

TEST(SeededRng, SameSeedSameStream) {
  SeededRng a(42), b(42), c(43);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differs |= x != c.next();
  }
  EXPECT_TRUE(differs);
}

TEST(SeededRng, BelowStaysInRange) {
  SeededRng rng(1);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 7000; ++i) ++hist[rng.below(7)];
  for (int h : hist) EXPECT_NEAR(h, 1000, 150);
  EXPECT_THROW(rng.below(0), UsageError);
}

TEST(Hypervector, RejectsBadDimensions) {
  EXPECT_THROW(Hypervector(0), ConfigError);
  EXPECT_THROW(Hypervector(63), ConfigError);
  EXPECT_THROW(Hypervector(100), ConfigError);
  EXPECT_NO_THROW(Hypervector(64));
  EXPECT_NO_THROW(Hypervector(10048));
}

TEST(Hypervector, BitStringRoundTrip) {
  SeededRng rng(3);
  const auto v = random_hv(rng, 128);
  EXPECT_EQ(Hypervector::from_bits(v.to_bits()), v);
  EXPECT_THROW(Hypervector::from_bits(std::string(64, '2')), UsageError);
}

TEST(Hypervector, RandomVectorsAreBalanced) {
  SeededRng rng(5);
  const auto v = random_hv(rng, 4096);
  EXPECT_NEAR(static_cast<double>(v.popcount()), 2048.0, 4 * 32.0);
}

TEST(Hypervector, DimensionMismatchThrows) {
  EXPECT_THROW(bind(Hypervector(64), Hypervector(128)), UsageError);
  EXPECT_THROW(hamming(Hypervector(64), Hypervector(128)), UsageError);
  SeededRng rng(1);
  std::vector<Hypervector> vs{Hypervector(64), Hypervector(128), Hypervector(64)};
  EXPECT_THROW(bundle(vs, rng), UsageError);
  EXPECT_THROW(bundle(std::span<const Hypervector>{}, rng), UsageError);
}

TEST(Hypervector, HammingOfHalfOnesAgainstZeros) {
  std::string bits(64, '0');
  for (int i = 0; i < 32; ++i) bits[i] = '1';
  const auto s = hamming(Hypervector::from_bits(bits), Hypervector::zeros(64));
  EXPECT_EQ(s.matching_bits, 32u);
  EXPECT_EQ(s.hamming_distance(), 32u);
  EXPECT_DOUBLE_EQ(s.z_score, 0.0);
  EXPECT_EQ(hamming(Hypervector::ones(64), Hypervector::ones(64)).matching_bits, 64u);
}

TEST(Hypervector, RotateByOneMovesIndexZeroToEnd) {
  std::string bits(64, '0');
  bits[0] = '1';
  bits[5] = '1';
  const auto r = rotate(Hypervector::from_bits(bits), 1);
  EXPECT_TRUE(r.bit(63));
  EXPECT_TRUE(r.bit(4));
  EXPECT_EQ(r.popcount(), 2u);
  EXPECT_EQ(rotate(r, -1), Hypervector::from_bits(bits));
}

TEST(Hypervector, RotateMatchesOracleAcrossWordBoundaries) {
  SeededRng rng(11);
  const auto v = random_hv(rng, 256);
  const auto bits = oracle::unpack(v);
  for (long long k : {0LL, 1LL, 63LL, 64LL, 65LL, 130LL, 255LL, 256LL, 1000LL, -1LL, -77LL}) {
    EXPECT_EQ(oracle::unpack(rotate(v, k)), oracle::rotate_bits(bits, k)) << k;
  }
}

TEST(Hypervector, BundleOfTwoBreaksTiesWithRng) {
  const auto a = Hypervector::zeros(64);
  const auto b = Hypervector::ones(64);
  std::vector<Hypervector> vs{a, b};
  SeededRng r1(9), r2(9);
  const auto x = bundle(vs, r1);
  EXPECT_EQ(x, bundle(vs, r2));
  EXPECT_GT(x.popcount(), 0u);
  EXPECT_LT(x.popcount(), 64u);
}

TEST(MatchThreshold, KnownValues) {
  EXPECT_EQ(match_threshold(1024, 4.0), 576u);
  EXPECT_EQ(match_threshold(1024, 2.0), 544u);
  EXPECT_EQ(match_threshold(1024, 0.0), 512u);
  EXPECT_EQ(match_threshold(4096, 4.0), 2176u);
  // 32 + 1.5 * 4 = 38
  EXPECT_EQ(match_threshold(64, 1.5), 38u);
  // 32 + 4 * 1.1 = 36.4
  EXPECT_EQ(match_threshold(64, 1.1), 37u);
  EXPECT_EQ(match_threshold(64, 100.0), 64u);
  EXPECT_THROW(match_threshold(64, -1.0), UsageError);
}

TEST(BinomialTail, ExactAgainstPascalForSmallN) {
  for (std::size_t n = 0; n <= 16; ++n) {
    for (long long k = 0; k <= static_cast<long long>(n); ++k) {
      const std::uint64_t want = oracle::count_below(n, k);
      EXPECT_EQ(static_cast<std::uint64_t>(binomial_count_below(n, k)), want) << n << "," << k;
      EXPECT_EQ(binomial_tail(n, k), std::ldexp(static_cast<double>(want), -static_cast<int>(n)));
      EXPECT_EQ(binomial_upper_tail(n, k),
                std::ldexp(static_cast<double>((std::uint64_t{1} << n) - want), -static_cast<int>(n)));
    }
  }
}

TEST(BinomialTail, EdgeCases) {
  EXPECT_EQ(binomial_tail(10, -3), 0.0);
  EXPECT_EQ(binomial_tail(10, 0), 0.0);
  EXPECT_EQ(binomial_upper_tail(10, 0), 1.0);
  EXPECT_THROW(binomial_tail(10, 11), UsageError);
  EXPECT_DOUBLE_EQ(binomial_tail(1, 1), 0.5);
  EXPECT_EQ(static_cast<std::uint64_t>(binomial_count_below(64, 64) >> 1), ~std::uint64_t{0} >> 1);
}

TEST(BinomialTail, LargeNTailsAreTiny) {
  EXPECT_LE(binomial_tail(10000, 4700), 1e-6);
  // 451 of 1000 bits: about one in a thousand.
  EXPECT_NEAR(binomial_tail(1000, 451), 1e-3, 5e-4);
  EXPECT_NEAR(binomial_tail(10000, 5000), 0.5, 0.01);
}
