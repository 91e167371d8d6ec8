#pragma once

// Reference predictors used for comparison: a bimodal table with shared
// hysteresis, gshare, a global-history perceptron, and static predictors.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hypre/predictor.hpp"

namespace hypre {

struct BimodalConfig {
  std::size_t prediction_entries = 8192;
  // Each hysteresis bit is shared by prediction_entries / hysteresis_entries
  // prediction bits (4:1 by default).
  std::size_t hysteresis_entries = 2048;
};

class BimodalPredictor final : public Predictor {
 public:
  explicit BimodalPredictor(BimodalConfig config = {});

  Prediction predict(std::uint64_t pc) override;
  void update(std::uint64_t pc, bool taken) override;
  std::string name() const override { return "bimodal"; }
  StorageBreakdown storage() const override;

  // 2-bit counter value (prediction bit high, hysteresis low) for pc.
  int counter(std::uint64_t pc) const;

 private:
  std::size_t pred_index(std::uint64_t pc) const { return pc & (config_.prediction_entries - 1); }
  std::size_t hyst_index(std::uint64_t pc) const;

  BimodalConfig config_;
  std::vector<std::uint8_t> prediction_;
  std::vector<std::uint8_t> hysteresis_;
  CallSequenceGuard guard_;
};

struct GshareConfig {
  std::size_t entries = 16384;
  unsigned history_bits = 14;
};

class GsharePredictor final : public Predictor {
 public:
  explicit GsharePredictor(GshareConfig config = {});

  Prediction predict(std::uint64_t pc) override;
  void update(std::uint64_t pc, bool taken) override;
  std::string name() const override { return "gshare"; }
  StorageBreakdown storage() const override;

 private:
  std::size_t index(std::uint64_t pc) const;

  GshareConfig config_;
  std::vector<std::uint8_t> counters_;
  std::uint64_t history_ = 0;
  CallSequenceGuard guard_;
};

struct PerceptronConfig {
  std::size_t entries = 512;
  unsigned history_length = 32;
};

class PerceptronPredictor final : public Predictor {
 public:
  explicit PerceptronPredictor(PerceptronConfig config = {});

  Prediction predict(std::uint64_t pc) override;
  void update(std::uint64_t pc, bool taken) override;
  std::string name() const override { return "perceptron"; }
  StorageBreakdown storage() const override;

  int threshold() const { return threshold_; }

 private:
  int output(std::uint64_t pc) const;

  PerceptronConfig config_;
  int threshold_;
  std::vector<std::int8_t> weights_;  // entries x (history_length + 1), bias first
  std::vector<bool> history_;         // most recent outcome first
  CallSequenceGuard guard_;
};

class StaticPredictor final : public Predictor {
 public:
  explicit StaticPredictor(bool taken) : taken_(taken) {}

  Prediction predict(std::uint64_t pc) override;
  void update(std::uint64_t pc, bool taken) override;
  std::string name() const override { return taken_ ? "always-taken" : "always-not-taken"; }
  StorageBreakdown storage() const override { return {}; }

 private:
  bool taken_;
  CallSequenceGuard guard_;
};

}  // namespace hypre
