#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "hypre/factory.hpp"
#include "hypre/hd_predictors.hpp"
#include "hypre/synthetic.hpp"
#include "oracle.hpp"

using namespace hypre;

TEST(Property, BindIsAnInvolutionAndPreservesDistance) {
  SeededRng rng(21);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_hv(rng, 1024), b = random_hv(rng, 1024), k = random_hv(rng, 1024);
    ASSERT_EQ(bind(bind(a, b), b), a);
    ASSERT_EQ(bind(a, b), bind(b, a));
    ASSERT_EQ(hamming(bind(a, k), bind(b, k)).matching_bits, hamming(a, b).matching_bits);
  }
}

TEST(Property, RotateComposesAndDistributes) {
  SeededRng rng(22);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_hv(rng, 512), b = random_hv(rng, 512);
    const long long j = static_cast<long long>(rng.below(2048)) - 1024;
    const long long k = static_cast<long long>(rng.below(2048)) - 1024;
    ASSERT_EQ(rotate(rotate(a, j), k), rotate(a, j + k));
    ASSERT_EQ(rotate(bind(a, b), k), bind(rotate(a, k), rotate(b, k)));
    ASSERT_EQ(hamming(rotate(a, k), rotate(b, k)).matching_bits, hamming(a, b).matching_bits);
    ASSERT_EQ(rotate(a, 512 + k), rotate(a, k));
  }
}

TEST(Property, BundleMatchesOracleAndIsCloseToInputs) {
  SeededRng rng(23);
  for (int i = 0; i < 50; ++i) {
    std::vector<Hypervector> vs;
    std::vector<oracle::Bits> bits;
    const std::size_t n = 1 + 2 * rng.below(6);
    for (std::size_t k = 0; k < n; ++k) {
      vs.push_back(random_hv(rng, 256));
      bits.push_back(oracle::unpack(vs.back()));
    }
    const auto b = bundle(vs, rng);
    ASSERT_EQ(oracle::unpack(b), oracle::majority(bits));
    if (n > 1) {
      for (const auto& v : vs) ASSERT_GT(hamming(b, v).matching_bits, 128u);
    }
  }
}

TEST(Property, RandomPairsStayNearHalf) {
  SeededRng rng(24);
  const std::size_t n = 1024;
  const std::size_t hi = match_threshold(n, 4.0);
  int outside = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto m = hamming(random_hv(rng, n), random_hv(rng, n)).matching_bits;
    outside += (m >= hi || m <= n - hi) ? 1 : 0;
  }
  EXPECT_LT(outside, 10);
}

TEST(Property, ClassifyIsSymmetricInOneVectorMode) {
  for (std::size_t m = 0; m <= 1024; ++m) {
    const auto a = classify(SimilarityStats::from_matching(1024, m), std::nullopt, false, true, {});
    const auto b = classify(SimilarityStats::from_matching(1024, 1024 - m), std::nullopt, false, true, {});
    ASSERT_EQ(a.verdict == Verdict::kIndependent, b.verdict == Verdict::kIndependent) << m;
    ASSERT_EQ(a.confident(), b.confident()) << m;
    if (a.verdict != Verdict::kIndependent && m != 512) ASSERT_NE(a.leans_taken, b.leans_taken) << m;
  }
}

TEST(Property, SnapshotRoundTripAfterRandomTraining) {
  SeededRng rng(25);
  for (unsigned bits = 1; bits <= 8; ++bits) {
    AccumulatorVector acc(320, bits);
    for (int i = 0; i < 50; ++i) {
      const auto q = random_hv(rng, 320);
      if (rng.bit()) {
        train_add(acc, q, 0.1, rng);
      } else {
        train_sub(acc, q, SubtractMode::partial(0.3), rng);
      }
    }
    std::stringstream ss;
    acc.write_snapshot(ss);
    ASSERT_EQ(AccumulatorVector::read_snapshot(ss), acc);
  }
}

TEST(Property, PredictorsAreDeterministicPerSeed) {
  const auto events = gen_synthetic(generator_preset("paper-stress"), 1, 6000);
  for (const auto& kind : predictor_kinds()) {
    auto a = make_predictor(kind, nullptr, 5);
    auto b = make_predictor(kind, nullptr, 5);
    for (const auto& e : events) {
      const auto pa = a->predict(e.pc);
      const auto pb = b->predict(e.pc);
      ASSERT_EQ(pa.taken, pb.taken) << kind;
      ASSERT_EQ(pa.source, pb.source) << kind;
      a->update(e.pc, e.taken);
      b->update(e.pc, e.taken);
    }
  }
}

// Checks every HYPRE update against the training rule, using the verdicts
// the predictor exposes and the trained counts of each side.
TEST(Property, HypreTrainsOnlyWithinLearningScope) {
  HypreConfig c;
  c.history_lengths = {8, 32, 128};
  c.dims = {512, 512, 1024};
  HyprePredictor p(c, 9);
  const auto events = gen_synthetic(generator_preset("paper-stress"), 1, 20000);
  std::size_t trained = 0;
  for (const auto& e : events) {
    const Prediction pred = p.predict(e.pc);
    const auto results = p.last_results();
    std::vector<std::uint64_t> t0, n0;
    std::optional<std::size_t> longest;
    for (std::size_t i = 0; i < p.table_count(); ++i) {
      t0.push_back(p.taken_vector(i).trained_count());
      n0.push_back(p.not_taken_vector(i)->trained_count());
      if (results[i] && results[i]->verdict != Verdict::kIndependent) longest = i;
    }
    p.update(e.pc, e.taken);
    const bool miss = pred.taken != e.taken;
    for (std::size_t i = 0; i < p.table_count(); ++i) {
      std::uint64_t dt = 0, dn = 0;
      if (results[i]) {
        const auto& r = *results[i];
        bool train = false;
        if (r.verdict == Verdict::kIndependent) {
          train = miss && (!longest || i > *longest);
        } else {
          train = !(r.confident() && r.leans_taken == e.taken);
        }
        if (train) {
          (e.taken ? dt : dn) += 1;
          if (r.verdict != Verdict::kIndependent && r.leans_taken != e.taken) (r.leans_taken ? dt : dn) += 1;
          ++trained;
        }
      }
      ASSERT_EQ(p.taken_vector(i).trained_count() - t0[i], dt) << i;
      ASSERT_EQ(p.not_taken_vector(i)->trained_count() - n0[i], dn) << i;
    }
  }
  EXPECT_GT(trained, 0u);
}

TEST(Property, HypreProviderIsLongestConfidentTable) {
  HyprePredictor p(hypre_ideal_config(), 4);
  const auto events = gen_synthetic(generator_preset("paper-stress"), 1, 8000);
  for (const auto& e : events) {
    const Prediction pred = p.predict(e.pc);
    const auto& results = p.last_results();
    std::optional<std::size_t> confident, any;
    for (std::size_t i = 0; i < results.size(); ++i) {
      if (!results[i] || results[i]->verdict == Verdict::kIndependent) continue;
      any = i;
      if (results[i]->confident()) confident = i;
    }
    const auto provider = confident ? confident : any;
    if (provider) {
      ASSERT_EQ(pred.source, Source::table(p.config().history_lengths[*provider]));
      ASSERT_EQ(pred.taken, results[*provider]->leans_taken);
    } else {
      ASSERT_NE(pred.source.kind, SourceKind::kTable);
    }
    p.update(e.pc, e.taken);
  }
}

// An attacker branch whose pc aliases a victim in a bimodal table still
// lands on an unrelated hypervector key.
TEST(Property, AliasedPcsGetIndependentKeys) {
  PcMapper m(1, 4096);
  SeededRng rng(26);
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t pc = rng.next() & 0xFFFFFFFF;
    const auto s = hamming(m.map(pc), m.map(pc + 8192));
    ASSERT_LT(std::abs(s.z_score), 5.0);
  }
}
