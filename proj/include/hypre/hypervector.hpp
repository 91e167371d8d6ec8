#pragma once

// Binary hypervector algebra over {0, 1}: random generation, XOR binding,
// majority bundling, circular rotation, and Hamming similarity. Vectors are
// packed into 64-bit words, so every dimension must be a positive multiple
// of 64.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypre {

// Raised for invalid configuration values (bad dimension, bad sizes).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when operands are combined in a way the algebra does not allow
// (dimension mismatch, empty bundle, out-of-range arguments).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr std::size_t kWordBits = 64;

void validate_dim(std::size_t dim);

// Deterministic random stream. The engine is std::mt19937_64, whose output
// sequence is fixed by the standard; every derived quantity is computed here
// from raw 64-bit draws so results do not depend on library distributions.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next() { return engine_(); }
  bool bit() { return (next() >> 63) != 0; }
  // Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t bound);
  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

class Hypervector {
 public:
  Hypervector() = default;
  // All-zero vector of the given dimension.
  explicit Hypervector(std::size_t dim);

  static Hypervector zeros(std::size_t dim) { return Hypervector(dim); }
  static Hypervector ones(std::size_t dim);
  // Builds a vector from a bit string such as "0100...1101"; index 0 first.
  static Hypervector from_bits(const std::string& bits);

  std::size_t dim() const { return dim_; }
  std::size_t word_count() const { return words_.size(); }
  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  bool bit(std::size_t i) const { return (words_[i / kWordBits] >> (i % kWordBits)) & 1U; }
  void set_bit(std::size_t i, bool value);
  std::size_t popcount() const;
  std::string to_bits() const;

  Hypervector& operator^=(const Hypervector& other);
  friend bool operator==(const Hypervector&, const Hypervector&) = default;

 private:
  std::size_t dim_ = 0;
  std::vector<std::uint64_t> words_;
};

struct SimilarityStats {
  std::size_t dim = 0;
  std::size_t matching_bits = 0;
  double z_score = 0.0;

  static SimilarityStats from_matching(std::size_t dim, std::size_t matching_bits);
  std::size_t hamming_distance() const { return dim - matching_bits; }
};

Hypervector random_hv(SeededRng& rng, std::size_t dim);

// Elementwise XOR.
Hypervector bind(const Hypervector& a, const Hypervector& b);
Hypervector complement(const Hypervector& a);

// Circular shift: element i of the result is element (i + k) mod dim of the
// input, so index 0 moves to the end. Negative k rotates the other way.
Hypervector rotate(const Hypervector& a, long long k);

// Per-dimension majority vote. Ties (even counts only) take a bit from rng.
Hypervector bundle(std::span<const Hypervector> vs, SeededRng& rng);

SimilarityStats hamming(const Hypervector& a, const Hypervector& b);

// Smallest matching-bit count at or above n/2 + z * sqrt(n)/2.
std::size_t match_threshold(std::size_t dim, double z);

// P(X < k) for X ~ Binomial(n, 1/2). Exact for n <= kExactTailLimit,
// continuity-corrected normal approximation above it. k < 0 yields 0.
inline constexpr std::size_t kExactTailLimit = 64;
double binomial_tail(std::size_t n, long long k);
double binomial_upper_tail(std::size_t n, long long k);
__extension__ using uint128 = unsigned __int128;

// Number of the 2^n outcomes with X < k, exact for n <= 64.
uint128 binomial_count_below(std::size_t n, long long k);

}  // namespace hypre
