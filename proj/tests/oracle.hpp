#pragma once

// Unpacked reference implementations used as test oracles. They work on one
// bool per dimension and share no code with the library.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hypre/hypervector.hpp"

namespace oracle {

using Bits = std::vector<bool>;

inline Bits unpack(const hypre::Hypervector& v) {
  Bits out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = v.bit(i);
  return out;
}

inline hypre::Hypervector pack(const Bits& b) {
  hypre::Hypervector v(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) v.set_bit(i, b[i]);
  return v;
}

inline Bits xor_bits(const Bits& a, const Bits& b) {
  Bits out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] != b[i];
  return out;
}

// Element i of the result is element (i + k) mod n of the input.
inline Bits rotate_bits(const Bits& a, long long k) {
  const auto n = static_cast<long long>(a.size());
  Bits out(a.size());
  for (long long i = 0; i < n; ++i) out[i] = a[static_cast<std::size_t>((((i + k) % n) + n) % n)];
  return out;
}

inline std::size_t matching(const Bits& a, const Bits& b) {
  std::size_t m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m += a[i] == b[i] ? 1 : 0;
  return m;
}

// Majority over an odd number of vectors.
inline Bits majority(const std::vector<Bits>& vs) {
  Bits out(vs.front().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    std::size_t ones = 0;
    for (const auto& v : vs) ones += v[i] ? 1 : 0;
    out[i] = 2 * ones > vs.size();
  }
  return out;
}

// Pascal's triangle: count of n-bit strings with fewer than k ones.
inline std::uint64_t count_below(std::size_t n, long long k) {
  std::vector<std::vector<std::uint64_t>> c(n + 1, std::vector<std::uint64_t>(n + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) {
    c[i][0] = 1;
    for (std::size_t j = 1; j <= i; ++j) c[i][j] = c[i - 1][j - 1] + (j <= i - 1 ? c[i - 1][j] : 0);
  }
  std::uint64_t total = 0;
  for (long long j = 0; j < k && j <= static_cast<long long>(n); ++j) total += c[n][static_cast<std::size_t>(j)];
  return total;
}

// Signed saturating counters, one int per dimension.
struct Counters {
  std::vector<int> c;
  int lo, hi;
  Counters(std::size_t dim, unsigned bits) : c(dim, 0), lo(-(1 << (bits - 1))), hi((1 << (bits - 1)) - 1) {}

  void step(const Bits& q, bool toward, const Bits* mask = nullptr) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (mask && !(*mask)[i]) continue;
      const int d = (q[i] == toward) ? 1 : -1;
      c[i] = std::min(hi, std::max(lo, c[i] + d));
    }
  }
  Bits view() const {
    Bits out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i] >= 0;
    return out;
  }
};

}  // namespace oracle
