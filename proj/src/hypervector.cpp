#include "hypre/hypervector.hpp"

#include <bit>
#include <cmath>

namespace hypre {

void validate_dim(std::size_t dim) {
  if (dim < kWordBits || dim % kWordBits != 0) {
    throw ConfigError("hypervector dimension must be a positive multiple of 64, got " +
                      std::to_string(dim));
  }
}

namespace {

void require_same_dim(const Hypervector& a, const Hypervector& b) {
  if (a.dim() != b.dim()) {
    throw UsageError("hypervector dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                     std::to_string(b.dim()));
  }
}

}  // namespace

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw UsageError("SeededRng::below requires a positive bound");
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t draw = next();
    if (draw >= limit) return draw % bound;
  }
}

Hypervector::Hypervector(std::size_t dim) : dim_(dim) {
  validate_dim(dim);
  words_.assign(dim / kWordBits, 0);
}

Hypervector Hypervector::ones(std::size_t dim) {
  Hypervector v(dim);
  for (auto& w : v.words_) w = ~std::uint64_t{0};
  return v;
}

Hypervector Hypervector::from_bits(const std::string& bits) {
  Hypervector v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw UsageError("bit string may contain only 0 and 1");
    v.set_bit(i, bits[i] == '1');
  }
  return v;
}

void Hypervector::set_bit(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (value) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

std::size_t Hypervector::popcount() const {
  std::size_t count = 0;
  for (const auto w : words_) count += static_cast<std::size_t>(std::popcount(w));
  return count;
}

std::string Hypervector::to_bits() const {
  std::string out(dim_, '0');
  for (std::size_t i = 0; i < dim_; ++i) {
    if (bit(i)) out[i] = '1';
  }
  return out;
}

Hypervector& Hypervector::operator^=(const Hypervector& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] ^= other.words_[i];
  return *this;
}

SimilarityStats SimilarityStats::from_matching(std::size_t dim, std::size_t matching_bits) {
  SimilarityStats s;
  s.dim = dim;
  s.matching_bits = matching_bits;
  const double n = static_cast<double>(dim);
  s.z_score = (static_cast<double>(matching_bits) - n / 2.0) / (std::sqrt(n) / 2.0);
  return s;
}

Hypervector random_hv(SeededRng& rng, std::size_t dim) {
  Hypervector v(dim);
  for (auto& w : v.words()) w = rng.next();
  return v;
}

Hypervector bind(const Hypervector& a, const Hypervector& b) {
  Hypervector out = a;
  out ^= b;
  return out;
}

Hypervector complement(const Hypervector& a) {
  Hypervector out = a;
  for (auto& w : out.words()) w = ~w;
  return out;
}

Hypervector rotate(const Hypervector& a, long long k) {
  const auto n = static_cast<long long>(a.dim());
  const auto shift = static_cast<std::size_t>(((k % n) + n) % n);
  if (shift == 0) return a;
  const std::size_t count = a.word_count();
  const std::size_t word_shift = shift / kWordBits;
  const unsigned bit_shift = shift % kWordBits;
  const auto src = a.words();
  Hypervector out(a.dim());
  auto dst = out.words();
  for (std::size_t j = 0; j < count; ++j) {
    const std::uint64_t lo = src[(j + word_shift) % count];
    if (bit_shift == 0) {
      dst[j] = lo;
    } else {
      const std::uint64_t hi = src[(j + word_shift + 1) % count];
      dst[j] = (lo >> bit_shift) | (hi << (kWordBits - bit_shift));
    }
  }
  return out;
}

Hypervector bundle(std::span<const Hypervector> vs, SeededRng& rng) {
  if (vs.empty()) throw UsageError("bundle of an empty list");
  const std::size_t dim = vs.front().dim();
  for (const auto& v : vs) require_same_dim(vs.front(), v);
  if (vs.size() == 1) return vs.front();

  Hypervector out(dim);
  std::vector<std::uint32_t> ones(kWordBits);
  const std::size_t total = vs.size();
  for (std::size_t w = 0; w < out.word_count(); ++w) {
    std::fill(ones.begin(), ones.end(), 0);
    for (const auto& v : vs) {
      std::uint64_t word = v.words()[w];
      while (word != 0) {
        ++ones[static_cast<std::size_t>(std::countr_zero(word))];
        word &= word - 1;
      }
    }
    // One draw per word supplies the tie bits, so the stream consumed does
    // not depend on how many ties occur.
    const std::uint64_t tie_bits = (total % 2 == 0) ? rng.next() : 0;
    std::uint64_t result = 0;
    for (std::size_t b = 0; b < kWordBits; ++b) {
      const std::size_t o = ones[b];
      bool bit = false;
      if (2 * o > total) {
        bit = true;
      } else if (2 * o == total) {
        bit = ((tie_bits >> b) & 1U) != 0;
      }
      if (bit) result |= std::uint64_t{1} << b;
    }
    out.words()[w] = result;
  }
  return out;
}

SimilarityStats hamming(const Hypervector& a, const Hypervector& b) {
  require_same_dim(a, b);
  std::size_t differing = 0;
  const auto wa = a.words();
  const auto wb = b.words();
  for (std::size_t i = 0; i < wa.size(); ++i) {
    differing += static_cast<std::size_t>(std::popcount(wa[i] ^ wb[i]));
  }
  return SimilarityStats::from_matching(a.dim(), a.dim() - differing);
}

std::size_t match_threshold(std::size_t dim, double z) {
  if (z < 0.0) throw UsageError("match_threshold requires z >= 0");
  const double n = static_cast<double>(dim);
  const double raw = n / 2.0 + z * std::sqrt(n) / 2.0;
  // Guard against 576.0000000001-style rounding pushing ceil up by one.
  const auto t = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return t > dim ? dim : t;
}

uint128 binomial_count_below(std::size_t n, long long k) {
  if (n > kExactTailLimit) throw UsageError("exact binomial counts are limited to n <= 64");
  if (k > static_cast<long long>(n)) {
    throw UsageError("binomial_tail: k out of range (k <= n required)");
  }
  if (k <= 0) return 0;
  uint128 total = 0;
  uint128 coeff = 1;  // C(n, 0)
  for (long long i = 0; i < k; ++i) {
    total += coeff;
    // C(n, i+1) = C(n, i) * (n - i) / (i + 1); exact in 128-bit for n <= 64.
    coeff = coeff * static_cast<uint128>(n - static_cast<std::size_t>(i)) /
            static_cast<uint128>(i + 1);
  }
  return total;
}

double binomial_tail(std::size_t n, long long k) {
  if (k <= 0) return 0.0;
  if (k > static_cast<long long>(n)) {
    throw UsageError("binomial_tail: k out of range (k <= n required)");
  }
  if (n <= kExactTailLimit) {
    const long double count = static_cast<long double>(binomial_count_below(n, k));
    return static_cast<double>(std::ldexp(count, -static_cast<int>(n)));
  }
  const double mean = static_cast<double>(n) / 2.0;
  const double sigma = std::sqrt(static_cast<double>(n)) / 2.0;
  const double z = (static_cast<double>(k) - 0.5 - mean) / sigma;
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double binomial_upper_tail(std::size_t n, long long k) {
  if (k <= 0) return 1.0;
  if (k > static_cast<long long>(n)) {
    throw UsageError("binomial_upper_tail: k out of range (k <= n required)");
  }
  if (n <= kExactTailLimit) {
    const uint128 all = static_cast<uint128>(1) << n;
    const long double count = static_cast<long double>(all - binomial_count_below(n, k));
    return static_cast<double>(std::ldexp(count, -static_cast<int>(n)));
  }
  return 1.0 - binomial_tail(n, k);
}

}  // namespace hypre
