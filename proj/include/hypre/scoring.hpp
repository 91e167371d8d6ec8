#pragma once

// Drives a predictor over an event stream and summarises the result.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hypre/predictor.hpp"
#include "hypre/trace.hpp"

namespace hypre {

struct RunReport {
  std::string predictor;
  std::uint64_t total_branches = 0;  // scored, i.e. after warmup
  std::uint64_t mispredictions = 0;
  double accuracy = 0.0;
  std::uint64_t instructions = 0;    // sum of insn_delta over scored branches
  double mpki = 0.0;
  std::uint64_t warmup_excluded = 0;
  std::map<std::string, std::uint64_t> per_source;
  std::vector<TableStats> per_table;  // scored branches only
};

// One line of the per-branch log.
struct BranchRecord {
  std::uint64_t seq = 0;
  std::uint64_t pc = 0;
  bool predicted = false;
  bool actual = false;
  Source source;
  std::optional<std::size_t> matching_bits;
};

// Receives every branch (warmup included), in order.
class BranchLog {
 public:
  virtual ~BranchLog() = default;
  virtual void record(const BranchRecord& r) = 0;
};

// CSV: seq,pc,predicted,actual,source,matching_bits,table_length
class CsvBranchLog final : public BranchLog {
 public:
  explicit CsvBranchLog(std::ostream& out);
  void record(const BranchRecord& r) override;

 private:
  std::ostream& out_;
};

// Keeps the correctness of each scored branch for overlap comparisons.
class CorrectnessLog final : public BranchLog {
 public:
  explicit CorrectnessLog(std::uint64_t warmup) : warmup_(warmup) {}
  void record(const BranchRecord& r) override;
  const std::vector<bool>& correct() const { return correct_; }
  const std::vector<BranchRecord>& records() const { return records_; }

 private:
  std::uint64_t warmup_;
  std::vector<bool> correct_;
  std::vector<BranchRecord> records_;
};

// Fans one record out to several logs.
class TeeBranchLog final : public BranchLog {
 public:
  void add(BranchLog* log) { logs_.push_back(log); }
  void record(const BranchRecord& r) override {
    for (auto* l : logs_) l->record(r);
  }

 private:
  std::vector<BranchLog*> logs_;
};

// Warmup branches are predicted and trained but not scored. Throws
// UsageError on an empty stream or when warmup covers the whole stream.
RunReport score(Predictor& predictor, EventSource& events, std::uint64_t warmup,
                BranchLog* log = nullptr);

// Ten percent of the stream, capped at 100k branches.
std::uint64_t default_warmup(std::uint64_t length);

struct Overlap {
  std::uint64_t total = 0;
  std::uint64_t both_correct = 0;
  std::uint64_t both_wrong = 0;
  std::uint64_t only_a = 0;
  std::uint64_t only_b = 0;

  // Shares of total.
  double identical_fraction() const;
  double both_wrong_fraction() const;
  double only_a_fraction() const;
  double only_b_fraction() const;
  // Among branches where exactly one side is right, the share A got.
  double only_a_share_of_disagreements() const;
};

// Both logs must cover the same scored branches.
Overlap compare(const std::vector<bool>& correct_a, const std::vector<bool>& correct_b);
Overlap compare(const RunReport& a, const CorrectnessLog& log_a, const RunReport& b,
                const CorrectnessLog& log_b);

}  // namespace hypre
