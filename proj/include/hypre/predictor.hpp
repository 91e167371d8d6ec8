#pragma once

// The predict/update contract shared by every predictor, plus the result
// and storage-accounting types that go with it.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypre/hypervector.hpp"

namespace hypre {

enum class SourceKind { kTable, kBase, kBaseFallback };

struct Source {
  SourceKind kind = SourceKind::kBase;
  std::size_t length = 0;  // history length when kind == kTable

  static Source table(std::size_t l) { return {SourceKind::kTable, l}; }
  static Source base() { return {SourceKind::kBase, 0}; }
  static Source fallback() { return {SourceKind::kBaseFallback, 0}; }
  // "table:128", "base", "fallback"
  std::string label() const;
  friend bool operator==(const Source&, const Source&) = default;
};

enum class Confidence { kHigh, kMarginal };

struct Prediction {
  bool taken = true;
  Source source;
  Confidence confidence = Confidence::kHigh;
  std::optional<SimilarityStats> stats;
};

struct StorageItem {
  std::string name;
  std::uint64_t bits = 0;
};

struct StorageBreakdown {
  std::vector<StorageItem> items;

  void add(std::string name, std::uint64_t bits) { items.push_back({std::move(name), bits}); }
  std::uint64_t total() const;
};

// Per history-table counters kept by table-based predictors.
struct TableStats {
  std::size_t length = 0;
  std::uint64_t lookups = 0;       // queries while the window was ready
  std::uint64_t confident = 0;     // verdict matched above the high threshold
  std::uint64_t marginal = 0;
  std::uint64_t wrong = 0;         // non-independent verdict with the wrong direction
  std::uint64_t provided = 0;      // times this table supplied the prediction
  std::uint64_t provided_wrong = 0;
};

class Predictor {
 public:
  virtual ~Predictor() = default;

  // Must be followed by exactly one update() for the same pc.
  virtual Prediction predict(std::uint64_t pc) = 0;
  virtual void update(std::uint64_t pc, bool taken) = 0;

  virtual std::string name() const = 0;
  virtual StorageBreakdown storage() const = 0;
  virtual std::vector<TableStats> table_stats() const { return {}; }
};

// Tracks the predict -> update pairing; a second update or an update for a
// different pc throws std::logic_error.
class CallSequenceGuard {
 public:
  void on_predict(std::uint64_t pc);
  void on_update(std::uint64_t pc);

 private:
  bool pending_ = false;
  std::uint64_t pc_ = 0;
};

}  // namespace hypre
