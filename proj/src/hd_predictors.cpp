#include "hypre/hd_predictors.hpp"

#include <bit>
#include <string>

namespace hypre {

namespace {

constexpr std::uint64_t kBaseSeedTweak = 0x5851F42D4C957F2DULL;
constexpr std::uint64_t kPcSeedTweak = 0x14057B7EF767814FULL;
constexpr std::uint64_t kTrainSeedTweak = 0x2545F4914F6CDD1DULL;

}  // namespace

void validate(const HdBaseConfig& config) {
  validate_dim(config.dim);
  if (config.local_history_bits < 1 || config.local_history_bits > 31) {
    throw ConfigError("local history bits must be in [1, 31]");
  }
  if (config.table_entries == 0 || !std::has_single_bit(config.table_entries)) {
    throw ConfigError("local history table entries must be a power of two");
  }
  if (config.saturation_bits < 1 || config.saturation_bits > 8) {
    throw ConfigError("saturation bits must be in [1, 8]");
  }
  if (config.thresholds.z_lo < 0 || config.thresholds.z_hi < config.thresholds.z_lo) {
    throw ConfigError("thresholds require z_hi >= z_lo >= 0");
  }
  if (!(config.update_fraction > 0 && config.update_fraction <= 1)) {
    throw ConfigError("update fraction must be in (0, 1]");
  }
}

// --- HD base ---------------------------------------------------------------

HdBasePredictor::HdBasePredictor(HdBaseConfig config, std::uint64_t seed)
    : config_((validate(config), config)),
      mapper_(mix64(seed ^ kBaseSeedTweak), config.dim, config.mapper_mode),
      taken_(config.dim, config.saturation_bits),
      history_(config.table_entries, 0),
      rng_(mix64(seed ^ kTrainSeedTweak)) {}

Prediction HdBasePredictor::predict(std::uint64_t pc) {
  guard_.on_predict(pc);
  const std::uint32_t hist = history_[index(pc)];
  query_ = encode_pc_local(mapper_, {pc, hist, config_.local_history_bits});
  last_ = query(taken_, nullptr, query_, config_.thresholds);

  Prediction p;
  p.stats = last_.taken;
  if (last_.verdict == Verdict::kIndependent) {
    // Nothing usable stored for this key: majority of the local history.
    p.taken = 2U * static_cast<unsigned>(std::popcount(hist)) >= config_.local_history_bits;
    p.source = Source::fallback();
    p.confidence = Confidence::kMarginal;
  } else {
    p.taken = last_.leans_taken;
    p.source = Source::base();
    p.confidence = last_.confident() ? Confidence::kHigh : Confidence::kMarginal;
  }
  predicted_taken_ = p.taken;
  return p;
}

void HdBasePredictor::update(std::uint64_t pc, bool taken) {
  guard_.on_update(pc);
  if (predicted_taken_ != taken) {
    std::optional<Hypervector> mask;
    if (config_.update_fraction < 1.0) {
      mask = random_mask(config_.dim, config_.update_fraction, rng_);
    }
    const Hypervector* m = mask ? &*mask : nullptr;
    if (taken) {
      taken_.step_toward(query_, m);
    } else {
      taken_.step_away(query_, m);
    }
    ++writes_;
  }
  auto& h = history_[index(pc)];
  const std::uint32_t mask = (1U << config_.local_history_bits) - 1;
  h = ((h << 1) | (taken ? 1U : 0U)) & mask;
}

StorageBreakdown HdBasePredictor::storage() const {
  StorageBreakdown s;
  s.add("local history table", static_cast<std::uint64_t>(config_.table_entries) *
                                   config_.local_history_bits);
  s.add("base taken vector", taken_.storage_bits());
  return s;
}

// --- HYPRE -----------------------------------------------------------------

void validate(const HypreConfig& config) {
  if (config.history_lengths.empty() && !config.dims.empty()) {
    throw ConfigError("dims given without history lengths");
  }
  if (config.history_lengths.size() != config.dims.size()) {
    throw ConfigError("one vector length is required per history length");
  }
  std::size_t previous = 0;
  for (std::size_t i = 0; i < config.history_lengths.size(); ++i) {
    const std::size_t len = config.history_lengths[i];
    validate_dim(config.dims[i]);
    if (len == 0 || len <= previous) {
      throw ConfigError("history lengths must be positive and strictly ascending");
    }
    if (len > config.dims[i]) {
      throw ConfigError("history length " + std::to_string(len) + " exceeds vector length " +
                        std::to_string(config.dims[i]));
    }
    previous = len;
  }
  if (config.saturation_bits < 1 || config.saturation_bits > 8) {
    throw ConfigError("saturation bits must be in [1, 8]");
  }
  if (config.thresholds.z_lo < 0 || config.thresholds.z_hi < config.thresholds.z_lo) {
    throw ConfigError("thresholds require z_hi >= z_lo >= 0");
  }
  if (config.noise_fraction < 0 || config.noise_fraction >= 1) {
    throw ConfigError("noise fraction must be in [0, 1)");
  }
  if (config.subtract.fraction < 0 || config.subtract.fraction > 1) {
    throw ConfigError("partial subtract fraction must be in [0, 1]");
  }
  validate(config.base);
}

namespace {

std::vector<WindowSpec> windows_of(const HypreConfig& config) {
  validate(config);
  std::vector<WindowSpec> w;
  for (std::size_t i = 0; i < config.history_lengths.size(); ++i) {
    w.push_back({config.history_lengths[i], config.dims[i]});
  }
  if (w.empty()) w.push_back({1, 64});  // base-only configuration
  return w;
}

}  // namespace

HyprePredictor::HyprePredictor(HypreConfig config, std::uint64_t seed)
    : config_(std::move(config)),
      encoder_(seed, windows_of(config_)),
      base_(config_.base, seed),
      rng_(mix64(seed ^ kTrainSeedTweak ^ kPcSeedTweak)) {
  for (std::size_t i = 0; i < config_.history_lengths.size(); ++i) {
    const std::size_t dim = config_.dims[i];
    Table t{config_.history_lengths[i],
            dim,
            AccumulatorVector(dim, config_.saturation_bits),
            std::nullopt,
            PcMapper(mix64(seed ^ kPcSeedTweak), dim),
            {}};
    if (config_.use_nt_vectors) t.not_taken.emplace(dim, config_.saturation_bits);
    t.stats.length = t.length;
    tables_.push_back(std::move(t));
  }
  queries_.resize(tables_.size());
  results_.resize(tables_.size());
}

const AccumulatorVector* HyprePredictor::not_taken_vector(std::size_t table) const {
  const auto& nt = tables_[table].not_taken;
  return nt ? &*nt : nullptr;
}

std::uint64_t HyprePredictor::history_element(std::uint64_t pc, bool taken) const {
  if (config_.history_mode == HistoryMode::kOutcome) return taken ? 1U : 0U;
  return (pc << 1) | (taken ? 1U : 0U);
}

Prediction HyprePredictor::predict(std::uint64_t pc) {
  guard_.on_predict(pc);
  provider_.reset();
  longest_match_.reset();
  std::optional<std::size_t> best_confident;
  std::optional<std::size_t> best_any;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    Table& t = tables_[i];
    if (!encoder_.ready(i)) {
      results_[i].reset();
      continue;
    }
    // The query extends the history window by the branch being predicted.
    Hypervector& q = queries_[i];
    q = rotate(encoder_.sequence(i), 1);
    t.pc_mapper.xor_rotated_into(pc, 0, q);
    results_[i] = query(t.taken, t.not_taken ? &*t.not_taken : nullptr, q, config_.thresholds);
    const MatchResult& r = *results_[i];
    ++t.stats.lookups;
    if (r.verdict == Verdict::kIndependent) continue;
    best_any = i;
    if (r.confident()) {
      best_confident = i;
      ++t.stats.confident;
    } else {
      ++t.stats.marginal;
    }
  }

  longest_match_ = best_any;
  if (config_.selection == SelectionPolicy::kConfidentFirst && best_confident) {
    provider_ = best_confident;
  } else {
    provider_ = best_any;
  }

  const Prediction base_prediction = base_.predict(pc);
  if (!provider_) {
    last_prediction_ = base_prediction;
    return last_prediction_;
  }
  const MatchResult& r = *results_[*provider_];
  Prediction p;
  p.taken = r.leans_taken;
  p.source = Source::table(tables_[*provider_].length);
  p.confidence = r.confident() ? Confidence::kHigh : Confidence::kMarginal;
  p.stats = r.deciding_stats();
  last_prediction_ = p;
  return p;
}

void HyprePredictor::train_table(Table& t, const Hypervector& q, const MatchResult& r, bool taken) {
  if (!t.not_taken) {
    // One Taken vector: not-taken patterns are stored as anti-correlation.
    if (taken) {
      train_add(t.taken, q, config_.noise_fraction, rng_);
    } else if (r.verdict != Verdict::kIndependent && r.leans_taken) {
      train_sub(t.taken, q, config_.subtract, rng_);
    } else {
      train_sub(t.taken, q, SubtractMode::full(), rng_);
    }
    ++writes_;
    return;
  }
  if (r.verdict != Verdict::kIndependent && r.leans_taken != taken) {
    train_sub(r.leans_taken ? t.taken : *t.not_taken, q, config_.subtract, rng_);
    ++writes_;
  }
  train_add(taken ? t.taken : *t.not_taken, q, config_.noise_fraction, rng_);
  ++writes_;
}

void HyprePredictor::update(std::uint64_t pc, bool taken) {
  guard_.on_update(pc);
  const bool mispredicted = last_prediction_.taken != taken;
  for (std::size_t i = 0; i < tables_.size(); ++i) {
    if (!results_[i]) continue;
    const MatchResult& r = *results_[i];
    Table& t = tables_[i];
    const bool independent = r.verdict == Verdict::kIndependent;
    if (!independent && r.leans_taken != taken) ++t.stats.wrong;
    if (provider_ && *provider_ == i) {
      ++t.stats.provided;
      if (r.leans_taken != taken) ++t.stats.provided_wrong;
    }
    bool train = false;
    if (independent) {
      // New patterns are only allocated on a misprediction, and only in
      // tables longer than every table that recognised the context.
      train = mispredicted && (!longest_match_ || i > *longest_match_);
    } else {
      train = !(r.confident() && r.leans_taken == taken);
    }
    if (train) train_table(t, queries_[i], r, taken);
  }
  base_.update(pc, taken);
  encoder_.advance(history_element(pc, taken));
}

StorageBreakdown HyprePredictor::storage() const {
  StorageBreakdown s;
  const std::uint64_t sides = config_.use_nt_vectors ? 2 : 1;
  std::uint64_t vectors = 0;
  std::uint64_t queries = 0;
  for (const auto dim : config_.dims) {
    vectors += static_cast<std::uint64_t>(dim) * config_.saturation_bits * sides;
    queries += dim;
  }
  if (!config_.history_lengths.empty()) {
    s.add(config_.use_nt_vectors ? "T/NT accumulators" : "T accumulators", vectors);
    s.add("query vectors", queries);
    s.add("history ring", static_cast<std::uint64_t>(config_.history_ring_entries) *
                              config_.history_entry_bits);
  }
  for (const auto& item : base_.storage().items) s.add(item.name, item.bits);
  return s;
}

std::vector<TableStats> HyprePredictor::table_stats() const {
  std::vector<TableStats> out;
  for (const auto& t : tables_) out.push_back(t.stats);
  return out;
}

}  // namespace hypre
