#pragma once

// Class-vector storage. Each AccumulatorVector holds one signed saturating
// counter per dimension; its binary view (counter >= 0 -> 1) is the stored
// Taken or Not-Taken hypervector that queries are compared against.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hypre/hypervector.hpp"

namespace hypre {

class AccumulatorVector {
 public:
  AccumulatorVector(std::size_t dim, unsigned saturation_bits);

  std::size_t dim() const { return dim_; }
  unsigned saturation_bits() const { return saturation_bits_; }
  int min_value() const { return -(1 << (saturation_bits_ - 1)); }
  int max_value() const { return (1 << (saturation_bits_ - 1)) - 1; }
  std::uint64_t trained_count() const { return trained_count_; }
  std::size_t storage_bits() const { return dim_ * saturation_bits_; }

  int counter(std::size_t i) const;
  std::vector<std::int8_t> counters() const;
  const Hypervector& binary_view() const { return view_; }
  // True while every counter is zero (never trained, or trained and erased).
  bool empty() const { return nonzero_ == 0; }

  // Steps every counter by +1 where step has a 1 and -1 where it has a 0,
  // restricted to dimensions set in mask when one is given. Clamped.
  void step_toward(const Hypervector& step, const Hypervector* mask = nullptr);
  void step_away(const Hypervector& step, const Hypervector* mask = nullptr);

  // Little-endian snapshot: u32 dim, u8 saturation_bits, u64 trained_count,
  // then dim signed bytes of counters.
  void write_snapshot(std::ostream& out) const;
  static AccumulatorVector read_snapshot(std::istream& in);

  friend bool operator==(const AccumulatorVector& a, const AccumulatorVector& b) {
    return a.saturation_bits_ == b.saturation_bits_ && a.dim_ == b.dim_ &&
           a.planes_ == b.planes_ && a.trained_count_ == b.trained_count_;
  }

 private:
  void apply(const Hypervector& up, const Hypervector* mask, bool toward);
  void set_counter(std::size_t i, int value);
  void refresh_derived();

  // Counters are stored bit-sliced: for word w, planes_[w * bits + k] holds
  // bit k of the two's-complement counters of dimensions 64w .. 64w+63.
  std::size_t dim_;
  unsigned saturation_bits_;
  std::vector<std::uint64_t> planes_;
  Hypervector view_;
  std::size_t nonzero_ = 0;
  std::uint64_t trained_count_ = 0;
};

AccumulatorVector new_accumulator(std::size_t dim, unsigned saturation_bits);

// Exactly round(fraction * dim) distinct dimensions, chosen uniformly.
Hypervector random_mask(std::size_t dim, double fraction, SeededRng& rng);

// Adds q. A noise_fraction of dimensions take a random bit instead of q's,
// so a one-off insertion never registers with full certainty.
void train_add(AccumulatorVector& acc, const Hypervector& q, double noise_fraction, SeededRng& rng);

struct SubtractMode {
  enum class Kind { kFull, kPartialRandomize } kind = Kind::kFull;
  double fraction = 0.5;

  static SubtractMode full() { return {}; }
  static SubtractMode partial(double f) { return {Kind::kPartialRandomize, f}; }
};

// Inverse of train_add. Partial mode only steps a random fraction of the
// dimensions, so a frequently stored pattern is weakened but not erased.
void train_sub(AccumulatorVector& acc, const Hypervector& q, SubtractMode mode, SeededRng& rng);

enum class Verdict { kMatchTaken, kMatchNotTaken, kMarginal, kIndependent };

const char* to_string(Verdict v);

struct Thresholds {
  double z_hi = 4.0;
  double z_lo = 2.0;
};

struct MatchResult {
  Verdict verdict = Verdict::kIndependent;
  // Direction of the better side; meaningful unless independent.
  bool leans_taken = true;
  SimilarityStats taken;
  std::optional<SimilarityStats> not_taken;

  bool confident() const {
    return verdict == Verdict::kMatchTaken || verdict == Verdict::kMatchNotTaken;
  }
  // The stats of the side that produced the verdict.
  const SimilarityStats& deciding_stats() const {
    return (!leans_taken && not_taken) ? *not_taken : taken;
  }
};

// Two-vector mode when acc_nt is given: the better side among those at or
// above the high threshold wins (ties go to taken); marginal if the better
// side only clears the low threshold. One-vector mode reads anti-correlation
// with the Taken vector as a Not-Taken match, symmetric about n/2.
// An empty accumulator contributes nothing; both empty -> independent.
MatchResult query(const AccumulatorVector& acc_t, const AccumulatorVector* acc_nt,
                  const Hypervector& q, Thresholds thresholds);

// Recomputes the verdict from stats alone.
MatchResult classify(const SimilarityStats& taken, const std::optional<SimilarityStats>& not_taken,
                     bool taken_empty, bool not_taken_empty, Thresholds thresholds);

}  // namespace hypre
