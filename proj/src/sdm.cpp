#include "hypre/sdm.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

namespace hypre {

AccumulatorVector::AccumulatorVector(std::size_t dim, unsigned saturation_bits)
    : dim_(dim), saturation_bits_(saturation_bits), view_(Hypervector::ones(dim)) {
  if (saturation_bits < 1 || saturation_bits > 8) {
    throw ConfigError("saturation bits must be in [1, 8], got " + std::to_string(saturation_bits));
  }
  planes_.assign(view_.words().size() * saturation_bits_, 0);
}

AccumulatorVector new_accumulator(std::size_t dim, unsigned saturation_bits) {
  return AccumulatorVector(dim, saturation_bits);
}

int AccumulatorVector::counter(std::size_t i) const {
  if (i >= dim_) throw UsageError("accumulator index out of range");
  const std::uint64_t* p = &planes_[(i / kWordBits) * saturation_bits_];
  const unsigned b = i % kWordBits;
  int value = 0;
  for (unsigned k = 0; k < saturation_bits_; ++k) value |= static_cast<int>((p[k] >> b) & 1U) << k;
  if (value >> (saturation_bits_ - 1)) value -= 1 << saturation_bits_;
  return value;
}

std::vector<std::int8_t> AccumulatorVector::counters() const {
  std::vector<std::int8_t> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = static_cast<std::int8_t>(counter(i));
  return out;
}

void AccumulatorVector::set_counter(std::size_t i, int value) {
  std::uint64_t* p = &planes_[(i / kWordBits) * saturation_bits_];
  const std::uint64_t bit = std::uint64_t{1} << (i % kWordBits);
  const auto u = static_cast<unsigned>(value);
  for (unsigned k = 0; k < saturation_bits_; ++k) {
    if ((u >> k) & 1U) {
      p[k] |= bit;
    } else {
      p[k] &= ~bit;
    }
  }
}

void AccumulatorVector::refresh_derived() {
  auto view = view_.words();
  nonzero_ = 0;
  for (std::size_t w = 0; w < view.size(); ++w) {
    const std::uint64_t* p = &planes_[w * saturation_bits_];
    std::uint64_t any = 0;
    for (unsigned k = 0; k < saturation_bits_; ++k) any |= p[k];
    nonzero_ += static_cast<std::size_t>(std::popcount(any));
    view[w] = ~p[saturation_bits_ - 1];
  }
}

void AccumulatorVector::step_toward(const Hypervector& step, const Hypervector* mask) {
  apply(step, mask, true);
}

void AccumulatorVector::step_away(const Hypervector& step, const Hypervector* mask) {
  apply(step, mask, false);
}

void AccumulatorVector::apply(const Hypervector& step, const Hypervector* mask, bool toward) {
  if (step.dim() != dim_ || (mask != nullptr && mask->dim() != dim_)) {
    throw UsageError("accumulator training: dimension mismatch");
  }
  const unsigned top = saturation_bits_ - 1;
  const auto step_words = step.words();
  auto view = view_.words();
  for (std::size_t w = 0; w < step_words.size(); ++w) {
    const std::uint64_t active = mask != nullptr ? mask->words()[w] : ~std::uint64_t{0};
    if (active == 0) continue;
    std::uint64_t* p = &planes_[w * saturation_bits_];
    std::uint64_t low_all = ~std::uint64_t{0};
    std::uint64_t low_any = 0;
    std::uint64_t any_before = p[top];
    for (unsigned k = 0; k < top; ++k) {
      low_all &= p[k];
      low_any |= p[k];
      any_before |= p[k];
    }
    const std::uint64_t at_max = ~p[top] & low_all;
    const std::uint64_t at_min = p[top] & ~low_any;
    const std::uint64_t ones = toward ? step_words[w] : ~step_words[w];
    std::uint64_t carry = ones & active & ~at_max;
    std::uint64_t borrow = ~ones & active & ~at_min;
    std::uint64_t any_after = 0;
    for (unsigned k = 0; k <= top; ++k) {
      const std::uint64_t c = p[k] & carry;
      const std::uint64_t b = ~p[k] & borrow;
      p[k] ^= carry | borrow;
      carry = c;
      borrow = b;
      any_after |= p[k];
    }
    nonzero_ += static_cast<std::size_t>(std::popcount(any_after));
    nonzero_ -= static_cast<std::size_t>(std::popcount(any_before));
    view[w] = ~p[top];
  }
  ++trained_count_;
}

namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.put(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFFU));
  }
}

template <typename T>
T get_le(std::istream& in) {
  std::uint64_t value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    const int c = in.get();
    if (c == std::char_traits<char>::eof()) throw UsageError("accumulator snapshot truncated");
    value |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return static_cast<T>(value);
}

}  // namespace

void AccumulatorVector::write_snapshot(std::ostream& out) const {
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dim()));
  put_le<std::uint8_t>(out, static_cast<std::uint8_t>(saturation_bits_));
  put_le<std::uint64_t>(out, trained_count_);
  for (std::size_t i = 0; i < dim_; ++i) out.put(static_cast<char>(counter(i)));
}

AccumulatorVector AccumulatorVector::read_snapshot(std::istream& in) {
  const auto dim = get_le<std::uint32_t>(in);
  const auto bits = get_le<std::uint8_t>(in);
  const auto trained = get_le<std::uint64_t>(in);
  validate_dim(dim);
  AccumulatorVector acc(dim, bits);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto c = static_cast<std::int8_t>(get_le<std::uint8_t>(in));
    if (c < acc.min_value() || c > acc.max_value()) {
      throw UsageError("accumulator snapshot counter out of range");
    }
    acc.set_counter(i, c);
  }
  acc.refresh_derived();
  acc.trained_count_ = trained;
  return acc;
}

Hypervector random_mask(std::size_t dim, double fraction, SeededRng& rng) {
  if (fraction < 0.0 || fraction > 1.0) throw UsageError("mask fraction must be in [0, 1]");
  Hypervector mask(dim);
  const auto target = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(dim)));
  // Floyd's sampling: exactly `target` distinct indices.
  for (std::size_t j = dim - target; j < dim; ++j) {
    const auto t = static_cast<std::size_t>(rng.below(j + 1));
    if (mask.bit(t)) {
      mask.set_bit(j, true);
    } else {
      mask.set_bit(t, true);
    }
  }
  return mask;
}

void train_add(AccumulatorVector& acc, const Hypervector& q, double noise_fraction, SeededRng& rng) {
  if (q.dim() != acc.dim()) throw UsageError("train_add: dimension mismatch");
  if (noise_fraction < 0.0 || noise_fraction >= 1.0) {
    throw UsageError("train_add: noise_fraction must be in [0, 1)");
  }
  if (noise_fraction == 0.0) {
    acc.step_toward(q);
    return;
  }
  const Hypervector mask = random_mask(q.dim(), noise_fraction, rng);
  const Hypervector noise = random_hv(rng, q.dim());
  Hypervector noisy = q;
  auto out = noisy.words();
  for (std::size_t w = 0; w < out.size(); ++w) {
    out[w] = (out[w] & ~mask.words()[w]) | (noise.words()[w] & mask.words()[w]);
  }
  acc.step_toward(noisy);
}

void train_sub(AccumulatorVector& acc, const Hypervector& q, SubtractMode mode, SeededRng& rng) {
  if (q.dim() != acc.dim()) throw UsageError("train_sub: dimension mismatch");
  if (mode.kind == SubtractMode::Kind::kFull) {
    acc.step_away(q);
    return;
  }
  const Hypervector mask = random_mask(q.dim(), mode.fraction, rng);
  acc.step_away(q, &mask);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::kMatchTaken:
      return "match_taken";
    case Verdict::kMatchNotTaken:
      return "match_not_taken";
    case Verdict::kMarginal:
      return "marginal";
    case Verdict::kIndependent:
      return "independent";
  }
  return "?";
}

MatchResult classify(const SimilarityStats& taken, const std::optional<SimilarityStats>& not_taken,
                     bool taken_empty, bool not_taken_empty, Thresholds thresholds) {
  if (thresholds.z_lo < 0.0 || thresholds.z_hi < thresholds.z_lo) {
    throw UsageError("thresholds require z_hi >= z_lo >= 0");
  }
  MatchResult r;
  r.taken = taken;
  r.not_taken = not_taken;
  const std::size_t n = taken.dim;
  const std::size_t hi = match_threshold(n, thresholds.z_hi);
  const std::size_t lo = match_threshold(n, thresholds.z_lo);

  if (!not_taken) {
    if (taken_empty) return r;
    const std::size_t m = taken.matching_bits;
    if (m >= hi) {
      r.verdict = Verdict::kMatchTaken;
      r.leans_taken = true;
    } else if (m <= n - hi) {
      r.verdict = Verdict::kMatchNotTaken;
      r.leans_taken = false;
    } else if (m >= lo) {
      r.verdict = Verdict::kMarginal;
      r.leans_taken = true;
    } else if (m <= n - lo) {
      r.verdict = Verdict::kMarginal;
      r.leans_taken = false;
    }
    return r;
  }

  const std::size_t mt = taken_empty ? 0 : taken.matching_bits;
  const std::size_t mn = not_taken_empty ? 0 : not_taken->matching_bits;
  const bool taken_better = mt >= mn;
  const std::size_t best = taken_better ? mt : mn;
  if (best >= hi) {
    r.verdict = taken_better ? Verdict::kMatchTaken : Verdict::kMatchNotTaken;
    r.leans_taken = taken_better;
  } else if (best >= lo) {
    r.verdict = Verdict::kMarginal;
    r.leans_taken = taken_better;
  }
  return r;
}

MatchResult query(const AccumulatorVector& acc_t, const AccumulatorVector* acc_nt,
                  const Hypervector& q, Thresholds thresholds) {
  const SimilarityStats st = hamming(acc_t.binary_view(), q);
  std::optional<SimilarityStats> sn;
  bool nt_empty = true;
  if (acc_nt != nullptr) {
    sn = hamming(acc_nt->binary_view(), q);
    nt_empty = acc_nt->empty();
  }
  return classify(st, sn, acc_t.empty(), nt_empty, thresholds);
}

}  // namespace hypre
