#pragma once

// Branch-to-hypervector mapping and rotate/XOR sequence encoding.
//
// A sequence p_0 .. p_{L-1} (oldest first) encodes to
//   XOR_i rotate(HV(p_i), L - 1 - i)
// so the newest element is unrotated. HistoryEncoderState keeps one such
// chain per configured window length and slides every window in O(1)
// vector operations per branch.

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "hypre/hypervector.hpp"

namespace hypre {

enum class MapperMode { kHashed, kDictionary };

// 64-bit finalizer with full avalanche (the splitmix64 output function).
std::uint64_t mix64(std::uint64_t x);

// Maps 64-bit keys to pseudo-random hypervectors. Hashed mode expands
// (seed, domain, key, word index) in counter mode and is stateless;
// dictionary mode draws a fresh random vector on first sight and caches it.
class PcMapper {
 public:
  PcMapper(std::uint64_t global_seed, std::size_t dim, MapperMode mode = MapperMode::kHashed);

  std::uint64_t seed() const { return seed_; }
  std::size_t dim() const { return dim_; }
  MapperMode mode() const { return mode_; }
  std::size_t dictionary_size() const { return dictionary_.size(); }

  // Hashed mode never mutates; dictionary mode may insert.
  Hypervector map(std::uint64_t key);
  // out ^= rotate(map(key), rotation) without materialising the temporary.
  void xor_rotated_into(std::uint64_t key, long long rotation, Hypervector& out);

 private:
  std::uint64_t word(std::uint64_t key, std::size_t index) const;

  std::uint64_t seed_;
  std::size_t dim_;
  MapperMode mode_;
  SeededRng dictionary_rng_;
  std::unordered_map<std::uint64_t, Hypervector> dictionary_;
};

Hypervector pc_to_hv(PcMapper& mapper, std::uint64_t pc);

// Errors when the sequence is empty or longer than the mapper's dimension.
Hypervector encode_sequence(PcMapper& mapper, std::span<const std::uint64_t> pcs);

struct LocalHistoryKey {
  std::uint64_t pc = 0;
  std::uint32_t history_bits = 0;
  unsigned history_width = 0;

  // PC bits high, history bits low. PC bits that would overflow 64 bits
  // are dropped.
  std::uint64_t concatenated() const;
};

// Keys are domain-separated from plain PCs, so (pc, history) never maps to
// the same vector as a bare address with the same integer value.
Hypervector encode_pc_local(PcMapper& mapper, const LocalHistoryKey& key);

struct WindowSpec {
  std::size_t length = 0;
  std::size_t dim = 0;
};

class HistoryEncoderState {
 public:
  // Windows must be non-empty, strictly ascending by length, and each
  // length must not exceed its dimension. One hashed mapper per distinct
  // dimension is derived from seed.
  HistoryEncoderState(std::uint64_t seed, std::vector<WindowSpec> windows);

  std::size_t window_count() const { return windows_.size(); }
  const WindowSpec& window(std::size_t i) const { return windows_[i]; }
  bool ready(std::size_t i) const { return occupancy_ >= windows_[i].length; }
  // Encoding of the most recent window(i).length elements; meaningful once
  // ready(i).
  const Hypervector& sequence(std::size_t i) const { return chains_[i]; }
  std::size_t occupancy() const { return occupancy_; }
  std::size_t capacity() const { return ring_.size(); }

  void advance(std::uint64_t element);

  // Most recent n elements, oldest first (n <= min(occupancy, capacity)).
  std::vector<std::uint64_t> recent(std::size_t n) const;
  PcMapper& mapper_for(std::size_t dim);

 private:
  std::vector<WindowSpec> windows_;
  std::vector<Hypervector> chains_;
  std::vector<std::size_t> mapper_index_;
  std::vector<PcMapper> mappers_;
  std::vector<std::uint64_t> ring_;
  std::size_t head_ = 0;  // slot for the next element
  std::size_t occupancy_ = 0;
};

}  // namespace hypre
