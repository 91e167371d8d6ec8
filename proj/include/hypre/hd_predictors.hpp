#pragma once

// Hyperdimensional predictors: the HD base predictor (per-PC local history
// bound to the PC and matched against one Taken accumulator) and HYPRE, a
// set of geometric-length history tables with Taken/Not-Taken accumulators
// that falls back to the HD base predictor.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "hypre/encoding.hpp"
#include "hypre/predictor.hpp"
#include "hypre/sdm.hpp"

namespace hypre {

struct HdBaseConfig {
  std::size_t dim = 1024;
  unsigned local_history_bits = 4;
  std::size_t table_entries = 2048;
  // Two bits per dimension keeps the default at 2048 x 4 + 1024 x 2 =
  // 10,240 bits.
  unsigned saturation_bits = 2;
  Thresholds thresholds;
  // The vector is trained only when the base prediction was wrong, and each
  // training step moves this random fraction of the dimensions.
  double update_fraction = 0.125;
  MapperMode mapper_mode = MapperMode::kHashed;
};

void validate(const HdBaseConfig& config);

class HdBasePredictor final : public Predictor {
 public:
  HdBasePredictor(HdBaseConfig config, std::uint64_t seed);

  Prediction predict(std::uint64_t pc) override;
  void update(std::uint64_t pc, bool taken) override;
  std::string name() const override { return "hd-base"; }
  StorageBreakdown storage() const override;

  const HdBaseConfig& config() const { return config_; }
  const AccumulatorVector& accumulator() const { return taken_; }
  std::uint32_t local_history(std::uint64_t pc) const { return history_[index(pc)]; }
  std::uint64_t accumulator_writes() const { return writes_; }

 private:
  std::size_t index(std::uint64_t pc) const { return pc & (config_.table_entries - 1); }

  HdBaseConfig config_;
  PcMapper mapper_;
  AccumulatorVector taken_;
  std::vector<std::uint32_t> history_;
  SeededRng rng_;
  std::uint64_t writes_ = 0;
  CallSequenceGuard guard_;

  // State carried from predict() to update().
  Hypervector query_;
  MatchResult last_;
  bool predicted_taken_ = true;
};

enum class HistoryMode {
  kPath,     // each element is (branch pc, resolved direction)
  kOutcome,  // each element is one outcome bit
};

enum class SelectionPolicy {
  // The longest table with any non-independent verdict provides.
  kLongestMatch,
  // Confident tables first (longest wins), marginal ones only if none is.
  kConfidentFirst,
};

struct HypreConfig {
  std::vector<std::size_t> history_lengths{8, 32, 128, 256, 512, 1024, 2048, 4096};
  std::vector<std::size_t> dims{4096, 4096, 4096, 4096, 4096, 4096, 4096, 4096};
  unsigned saturation_bits = 4;
  Thresholds thresholds;
  double noise_fraction = 0.0;
  SubtractMode subtract = SubtractMode::full();
  bool use_nt_vectors = true;
  HistoryMode history_mode = HistoryMode::kPath;
  SelectionPolicy selection = SelectionPolicy::kConfidentFirst;
  HdBaseConfig base;
  // Storage accounting for the history ring. The table budget lists 4094
  // entries even though the longest window is 4096.
  std::size_t history_ring_entries = 4094;
  unsigned history_entry_bits = 40;
};

void validate(const HypreConfig& config);

class HyprePredictor final : public Predictor {
 public:
  HyprePredictor(HypreConfig config, std::uint64_t seed);

  Prediction predict(std::uint64_t pc) override;
  void update(std::uint64_t pc, bool taken) override;
  std::string name() const override { return "hypre"; }
  StorageBreakdown storage() const override;
  std::vector<TableStats> table_stats() const override;

  const HypreConfig& config() const { return config_; }
  std::size_t table_count() const { return tables_.size(); }
  const AccumulatorVector& taken_vector(std::size_t table) const { return tables_[table].taken; }
  const AccumulatorVector* not_taken_vector(std::size_t table) const;
  // Verdicts of the last predict(); nullopt for tables whose window was not
  // ready.
  const std::vector<std::optional<MatchResult>>& last_results() const { return results_; }
  // Number of accumulator training operations across all history tables.
  std::uint64_t accumulator_writes() const { return writes_; }
  const HdBasePredictor& base() const { return base_; }
  const HistoryEncoderState& encoder() const { return encoder_; }

 private:
  struct Table {
    std::size_t length;
    std::size_t dim;
    AccumulatorVector taken;
    std::optional<AccumulatorVector> not_taken;
    PcMapper pc_mapper;
    TableStats stats;
  };

  std::uint64_t history_element(std::uint64_t pc, bool taken) const;
  void train_table(Table& table, const Hypervector& q, const MatchResult& r, bool taken);

  HypreConfig config_;
  std::vector<Table> tables_;
  HistoryEncoderState encoder_;
  HdBasePredictor base_;
  SeededRng rng_;
  std::uint64_t writes_ = 0;
  CallSequenceGuard guard_;

  // State carried from predict() to update().
  std::vector<Hypervector> queries_;
  std::vector<std::optional<MatchResult>> results_;
  std::optional<std::size_t> provider_;
  std::optional<std::size_t> longest_match_;
  Prediction last_prediction_;
};

}  // namespace hypre
