#include "hypre/scoring.hpp"

#include <algorithm>
#include <ostream>

#include "hypre/hypervector.hpp"

namespace hypre {

CsvBranchLog::CsvBranchLog(std::ostream& out) : out_(out) {
  out_ << "seq,pc,predicted,actual,source,matching_bits,table_length\n";
}

void CsvBranchLog::record(const BranchRecord& r) {
  out_ << r.seq << ",0x" << std::hex << r.pc << std::dec << ',' << (r.predicted ? 'T' : 'N') << ','
       << (r.actual ? 'T' : 'N') << ',' << r.source.label() << ',';
  if (r.matching_bits) out_ << *r.matching_bits;
  out_ << ',';
  if (r.source.kind == SourceKind::kTable) out_ << r.source.length;
  out_ << '\n';
}

void CorrectnessLog::record(const BranchRecord& r) {
  if (r.seq < warmup_) return;
  correct_.push_back(r.predicted == r.actual);
  records_.push_back(r);
}

std::uint64_t default_warmup(std::uint64_t length) {
  return std::min<std::uint64_t>(length / 10, 100000);
}

namespace {

void subtract_stats(std::vector<TableStats>& now, const std::vector<TableStats>& before) {
  for (std::size_t i = 0; i < now.size() && i < before.size(); ++i) {
    now[i].lookups -= before[i].lookups;
    now[i].confident -= before[i].confident;
    now[i].marginal -= before[i].marginal;
    now[i].wrong -= before[i].wrong;
    now[i].provided -= before[i].provided;
    now[i].provided_wrong -= before[i].provided_wrong;
  }
}

}  // namespace

RunReport score(Predictor& predictor, EventSource& events, std::uint64_t warmup, BranchLog* log) {
  RunReport report;
  report.predictor = predictor.name();
  std::vector<TableStats> at_warmup = predictor.table_stats();
  std::uint64_t seq = 0;
  while (auto e = events.next()) {
    if (seq == warmup) at_warmup = predictor.table_stats();
    const Prediction p = predictor.predict(e->pc);
    predictor.update(e->pc, e->taken);
    if (log != nullptr) {
      BranchRecord r;
      r.seq = seq;
      r.pc = e->pc;
      r.predicted = p.taken;
      r.actual = e->taken;
      r.source = p.source;
      if (p.stats) r.matching_bits = p.stats->matching_bits;
      log->record(r);
    }
    if (seq >= warmup) {
      ++report.total_branches;
      report.instructions += e->insn_delta;
      if (p.taken != e->taken) ++report.mispredictions;
      ++report.per_source[p.source.label()];
    }
    ++seq;
  }
  if (seq == 0) throw UsageError("cannot score an empty event stream");
  if (warmup >= seq) {
    throw UsageError("warmup (" + std::to_string(warmup) + ") must be shorter than the stream (" +
                     std::to_string(seq) + " branches)");
  }
  report.warmup_excluded = warmup;
  report.accuracy = 1.0 - static_cast<double>(report.mispredictions) /
                              static_cast<double>(report.total_branches);
  report.mpki = 1000.0 * static_cast<double>(report.mispredictions) /
                static_cast<double>(report.instructions);
  report.per_table = predictor.table_stats();
  subtract_stats(report.per_table, at_warmup);
  return report;
}

namespace {

double share(std::uint64_t part, std::uint64_t whole) {
  return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

}  // namespace

double Overlap::identical_fraction() const { return share(both_correct + both_wrong, total); }
double Overlap::both_wrong_fraction() const { return share(both_wrong, total); }
double Overlap::only_a_fraction() const { return share(only_a, total); }
double Overlap::only_b_fraction() const { return share(only_b, total); }
double Overlap::only_a_share_of_disagreements() const { return share(only_a, only_a + only_b); }

Overlap compare(const std::vector<bool>& correct_a, const std::vector<bool>& correct_b) {
  if (correct_a.size() != correct_b.size()) {
    throw UsageError("compare: runs scored different branch counts (" +
                     std::to_string(correct_a.size()) + " vs " + std::to_string(correct_b.size()) +
                     ")");
  }
  Overlap o;
  o.total = correct_a.size();
  for (std::size_t i = 0; i < correct_a.size(); ++i) {
    const bool a = correct_a[i];
    const bool b = correct_b[i];
    if (a && b) {
      ++o.both_correct;
    } else if (!a && !b) {
      ++o.both_wrong;
    } else if (a) {
      ++o.only_a;
    } else {
      ++o.only_b;
    }
  }
  return o;
}

Overlap compare(const RunReport& a, const CorrectnessLog& log_a, const RunReport& b,
                const CorrectnessLog& log_b) {
  if (a.total_branches != b.total_branches || a.warmup_excluded != b.warmup_excluded) {
    throw UsageError("compare: reports cover different streams");
  }
  const auto& ra = log_a.records();
  const auto& rb = log_b.records();
  for (std::size_t i = 0; i < ra.size() && i < rb.size(); ++i) {
    if (ra[i].pc != rb[i].pc || ra[i].actual != rb[i].actual) {
      throw UsageError("compare: event streams differ at branch " + std::to_string(ra[i].seq));
    }
  }
  return compare(log_a.correct(), log_b.correct());
}

}  // namespace hypre
