#include "hypre/encoding.hpp"

#include <algorithm>
#include <string>

namespace hypre {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kKeyTweak = 0xC2B2AE3D27D4EB4FULL;
constexpr std::uint64_t kLocalDomain = 0xD6E8FEB86659FD93ULL;

}  // namespace

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

PcMapper::PcMapper(std::uint64_t global_seed, std::size_t dim, MapperMode mode)
    : seed_(global_seed), dim_(dim), mode_(mode), dictionary_rng_(mix64(global_seed ^ kGolden)) {
  validate_dim(dim);
}

std::uint64_t PcMapper::word(std::uint64_t key, std::size_t index) const {
  const std::uint64_t base = mix64(seed_ ^ mix64(key + kKeyTweak));
  return mix64(base + (static_cast<std::uint64_t>(index) + 1) * kGolden);
}

Hypervector PcMapper::map(std::uint64_t key) {
  if (mode_ == MapperMode::kDictionary) {
    auto it = dictionary_.find(key);
    if (it == dictionary_.end()) {
      it = dictionary_.emplace(key, random_hv(dictionary_rng_, dim_)).first;
    }
    return it->second;
  }
  Hypervector v(dim_);
  auto words = v.words();
  for (std::size_t i = 0; i < words.size(); ++i) words[i] = word(key, i);
  return v;
}

void PcMapper::xor_rotated_into(std::uint64_t key, long long rotation, Hypervector& out) {
  if (out.dim() != dim_) throw UsageError("xor_rotated_into: dimension mismatch");
  if (mode_ == MapperMode::kDictionary) {
    out ^= rotate(map(key), rotation);
    return;
  }
  const auto n = static_cast<long long>(dim_);
  const auto shift = static_cast<std::size_t>(((rotation % n) + n) % n);
  const std::size_t count = dim_ / kWordBits;
  const std::size_t word_shift = shift / kWordBits;
  const unsigned bit_shift = shift % kWordBits;
  auto dst = out.words();
  // Walk source words in order so each is hashed once.
  const std::uint64_t base = mix64(seed_ ^ mix64(key + kKeyTweak));
  auto src = [&](std::size_t i) { return mix64(base + (static_cast<std::uint64_t>(i) + 1) * kGolden); };
  std::uint64_t lo = src(word_shift % count);
  for (std::size_t j = 0; j < count; ++j) {
    if (bit_shift == 0) {
      dst[j] ^= lo;
      if (j + 1 < count) lo = src((j + 1 + word_shift) % count);
    } else {
      const std::uint64_t hi = src((j + word_shift + 1) % count);
      dst[j] ^= (lo >> bit_shift) | (hi << (kWordBits - bit_shift));
      lo = hi;
    }
  }
}

Hypervector pc_to_hv(PcMapper& mapper, std::uint64_t pc) { return mapper.map(pc); }

Hypervector encode_sequence(PcMapper& mapper, std::span<const std::uint64_t> pcs) {
  if (pcs.empty()) throw UsageError("encode_sequence of an empty sequence");
  if (pcs.size() > mapper.dim()) {
    throw ConfigError("sequence length " + std::to_string(pcs.size()) +
                      " exceeds hypervector dimension " + std::to_string(mapper.dim()));
  }
  Hypervector out(mapper.dim());
  const std::size_t len = pcs.size();
  for (std::size_t i = 0; i < len; ++i) {
    out ^= rotate(mapper.map(pcs[i]), static_cast<long long>(len - 1 - i));
  }
  return out;
}

std::uint64_t LocalHistoryKey::concatenated() const {
  const std::uint64_t mask =
      history_width >= 32 ? 0xFFFFFFFFULL : ((std::uint64_t{1} << history_width) - 1);
  const std::uint64_t hist = static_cast<std::uint64_t>(history_bits) & mask;
  const std::uint64_t pc_part = history_width >= 64 ? 0 : (pc << history_width);
  return pc_part | hist;
}

Hypervector encode_pc_local(PcMapper& mapper, const LocalHistoryKey& key) {
  return mapper.map(mix64(key.concatenated() ^ kLocalDomain) ^ kLocalDomain);
}

HistoryEncoderState::HistoryEncoderState(std::uint64_t seed, std::vector<WindowSpec> windows)
    : windows_(std::move(windows)) {
  if (windows_.empty()) throw ConfigError("history encoder needs at least one window");
  std::size_t previous = 0;
  for (const auto& w : windows_) {
    validate_dim(w.dim);
    if (w.length == 0 || w.length <= previous) {
      throw ConfigError("history lengths must be positive and strictly ascending");
    }
    if (w.length > w.dim) {
      throw ConfigError("history length " + std::to_string(w.length) +
                        " exceeds its vector length " + std::to_string(w.dim));
    }
    previous = w.length;
  }
  for (const auto& w : windows_) {
    auto it = std::find_if(mappers_.begin(), mappers_.end(),
                           [&](const PcMapper& m) { return m.dim() == w.dim; });
    if (it == mappers_.end()) {
      mappers_.emplace_back(seed, w.dim);
      it = mappers_.end() - 1;
    }
    mapper_index_.push_back(static_cast<std::size_t>(it - mappers_.begin()));
    chains_.emplace_back(w.dim);
  }
  ring_.assign(windows_.back().length, 0);
}

PcMapper& HistoryEncoderState::mapper_for(std::size_t dim) {
  for (auto& m : mappers_) {
    if (m.dim() == dim) return m;
  }
  throw UsageError("no mapper for dimension " + std::to_string(dim));
}

void HistoryEncoderState::advance(std::uint64_t element) {
  const std::size_t cap = ring_.size();
  for (std::size_t i = 0; i < windows_.size(); ++i) {
    const std::size_t len = windows_[i].length;
    PcMapper& mapper = mappers_[mapper_index_[i]];
    Hypervector& chain = chains_[i];
    if (occupancy_ >= len) {
      // Cancel the element leaving this window; it currently sits at
      // rotation len - 1.
      const std::uint64_t oldest = ring_[(head_ + cap - len) % cap];
      mapper.xor_rotated_into(oldest, static_cast<long long>(len - 1), chain);
    }
    chain = rotate(chain, 1);
    mapper.xor_rotated_into(element, 0, chain);
  }
  ring_[head_] = element;
  head_ = (head_ + 1) % cap;
  ++occupancy_;
}

std::vector<std::uint64_t> HistoryEncoderState::recent(std::size_t n) const {
  const std::size_t cap = ring_.size();
  if (n > cap || n > occupancy_) throw UsageError("recent: not enough history");
  std::vector<std::uint64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = ring_[(head_ + cap - n + i) % cap];
  return out;
}

}  // namespace hypre
