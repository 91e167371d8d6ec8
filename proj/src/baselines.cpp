#include "hypre/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace hypre {

namespace {

void require_power_of_two(std::size_t v, const char* what) {
  if (v == 0 || !std::has_single_bit(v)) {
    throw ConfigError(std::string(what) + " must be a power of two");
  }
}

}  // namespace

// --- bimodal ---------------------------------------------------------------

BimodalPredictor::BimodalPredictor(BimodalConfig config) : config_(config) {
  require_power_of_two(config_.prediction_entries, "bimodal prediction entries");
  require_power_of_two(config_.hysteresis_entries, "bimodal hysteresis entries");
  if (config_.hysteresis_entries > config_.prediction_entries) {
    throw ConfigError("bimodal hysteresis table larger than prediction table");
  }
  // Weakly taken.
  prediction_.assign(config_.prediction_entries, 1);
  hysteresis_.assign(config_.hysteresis_entries, 0);
}

std::size_t BimodalPredictor::hyst_index(std::uint64_t pc) const {
  const auto share = static_cast<unsigned>(
      std::countr_zero(config_.prediction_entries / config_.hysteresis_entries));
  return pred_index(pc) >> share;
}

int BimodalPredictor::counter(std::uint64_t pc) const {
  return (prediction_[pred_index(pc)] << 1) | hysteresis_[hyst_index(pc)];
}

Prediction BimodalPredictor::predict(std::uint64_t pc) {
  guard_.on_predict(pc);
  Prediction p;
  p.taken = prediction_[pred_index(pc)] != 0;
  p.source = Source::base();
  return p;
}

void BimodalPredictor::update(std::uint64_t pc, bool taken) {
  guard_.on_update(pc);
  int ctr = counter(pc);
  ctr = taken ? std::min(3, ctr + 1) : std::max(0, ctr - 1);
  prediction_[pred_index(pc)] = static_cast<std::uint8_t>(ctr >> 1);
  hysteresis_[hyst_index(pc)] = static_cast<std::uint8_t>(ctr & 1);
}

StorageBreakdown BimodalPredictor::storage() const {
  StorageBreakdown s;
  s.add("prediction bits", config_.prediction_entries);
  s.add("hysteresis bits", config_.hysteresis_entries);
  return s;
}

// --- gshare ----------------------------------------------------------------

GsharePredictor::GsharePredictor(GshareConfig config) : config_(config) {
  require_power_of_two(config_.entries, "gshare entries");
  if (config_.history_bits == 0 || config_.history_bits > 63) {
    throw ConfigError("gshare history bits must be in [1, 63]");
  }
  counters_.assign(config_.entries, 2);
}

std::size_t GsharePredictor::index(std::uint64_t pc) const {
  const std::uint64_t hist = history_ & ((std::uint64_t{1} << config_.history_bits) - 1);
  return (pc ^ hist) & (config_.entries - 1);
}

Prediction GsharePredictor::predict(std::uint64_t pc) {
  guard_.on_predict(pc);
  Prediction p;
  p.taken = counters_[index(pc)] >= 2;
  p.source = Source::base();
  return p;
}

void GsharePredictor::update(std::uint64_t pc, bool taken) {
  guard_.on_update(pc);
  auto& c = counters_[index(pc)];
  if (taken) {
    if (c < 3) ++c;
  } else {
    if (c > 0) --c;
  }
  history_ = (history_ << 1) | (taken ? 1U : 0U);
}

StorageBreakdown GsharePredictor::storage() const {
  StorageBreakdown s;
  s.add("counter bits", 2 * config_.entries);
  s.add("global history bits", config_.history_bits);
  return s;
}

// --- perceptron ------------------------------------------------------------

PerceptronPredictor::PerceptronPredictor(PerceptronConfig config)
    : config_(config),
      threshold_(static_cast<int>(std::floor(1.93 * config.history_length + 14))) {
  require_power_of_two(config_.entries, "perceptron entries");
  if (config_.history_length == 0) throw ConfigError("perceptron history length must be positive");
  weights_.assign(config_.entries * (config_.history_length + 1), 0);
  history_.assign(config_.history_length, false);
}

int PerceptronPredictor::output(std::uint64_t pc) const {
  const std::size_t row = (pc & (config_.entries - 1)) * (config_.history_length + 1);
  int y = weights_[row];
  for (std::size_t i = 0; i < config_.history_length; ++i) {
    const int w = weights_[row + 1 + i];
    y += history_[i] ? w : -w;
  }
  return y;
}

Prediction PerceptronPredictor::predict(std::uint64_t pc) {
  guard_.on_predict(pc);
  Prediction p;
  const int y = output(pc);
  p.taken = y >= 0;
  p.source = Source::base();
  p.confidence = std::abs(y) > threshold_ ? Confidence::kHigh : Confidence::kMarginal;
  return p;
}

void PerceptronPredictor::update(std::uint64_t pc, bool taken) {
  guard_.on_update(pc);
  const int y = output(pc);
  if ((y >= 0) != taken || std::abs(y) <= threshold_) {
    const std::size_t row = (pc & (config_.entries - 1)) * (config_.history_length + 1);
    auto bump = [](std::int8_t& w, bool up) {
      if (up && w < 127) ++w;
      if (!up && w > -128) --w;
    };
    bump(weights_[row], taken);
    for (std::size_t i = 0; i < config_.history_length; ++i) {
      bump(weights_[row + 1 + i], history_[i] == taken);
    }
  }
  history_.pop_back();
  history_.insert(history_.begin(), taken);
}

StorageBreakdown PerceptronPredictor::storage() const {
  StorageBreakdown s;
  s.add("weight bits", 8ULL * config_.entries * (config_.history_length + 1));
  s.add("global history bits", config_.history_length);
  return s;
}

// --- static ----------------------------------------------------------------

Prediction StaticPredictor::predict(std::uint64_t pc) {
  guard_.on_predict(pc);
  Prediction p;
  p.taken = taken_;
  p.source = Source::base();
  return p;
}

void StaticPredictor::update(std::uint64_t pc, bool) { guard_.on_update(pc); }

}  // namespace hypre
