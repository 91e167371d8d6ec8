#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <sstream>

#include "hypre/synthetic.hpp"
#include "hypre/trace.hpp"

using namespace hypre;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("hypre_test_" + name)).string();
}

std::string outcomes(const std::vector<TraceEvent>& ev) {
  std::string s;
  for (const auto& e : ev) s += e.taken ? 'T' : 'N';
  return s;
}

}  // namespace

TEST(TextTrace, ParsesExampleLine) {
  bool has = false;
  const auto e = parse_text_line("400123 T 3", 1, has);
  EXPECT_TRUE(has);
  EXPECT_EQ(e, (TraceEvent{0x400123, true, 3}));
  const auto d = parse_text_line("0x10 N", 1, has);
  EXPECT_EQ(d, (TraceEvent{0x10, false, 1}));
}

TEST(TextTrace, CommentsAndBlankLines) {
  bool has = true;
  parse_text_line("   # nothing here", 4, has);
  EXPECT_FALSE(has);
  parse_text_line("", 5, has);
  EXPECT_FALSE(has);
  const auto e = parse_text_line("  abc N 2  # trailing\r", 6, has);
  EXPECT_TRUE(has);
  EXPECT_EQ(e, (TraceEvent{0xabc, false, 2}));
}

TEST(TextTrace, ErrorsCarryLineNumbers) {
  std::istringstream in("400000 T\n# ok\n400004 X\n");
  TextTraceReader r(in);
  EXPECT_TRUE(r.next().has_value());
  try {
    r.next();
    FAIL() << "expected TraceError";
  } catch (const TraceError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  bool has = false;
  EXPECT_THROW(parse_text_line("zz T", 1, has), TraceError);
  EXPECT_THROW(parse_text_line("10 T 0", 1, has), TraceError);
  EXPECT_THROW(parse_text_line("10 T 1 2", 1, has), TraceError);
  EXPECT_THROW(parse_text_line("10", 1, has), TraceError);
  EXPECT_THROW(parse_text_line("10 T 99999999999", 1, has), TraceError);
}

TEST(TextTrace, FormatRoundTrip) {
  for (const TraceEvent e : {TraceEvent{0x400123, true, 3}, TraceEvent{0, false, 1},
                             TraceEvent{~std::uint64_t{0}, true, 0xFFFFFFFF}}) {
    bool has = false;
    EXPECT_EQ(parse_text_line(format_text_line(e), 1, has), e);
  }
  EXPECT_EQ(format_text_line({0x400123, true, 1}), "400123 T");
}

TEST(TraceFiles, RoundTripBothFormats) {
  const auto events = gen_synthetic(generator_preset("paper-stress"), 1, 5000);
  for (auto fmt : {TraceFormat::kText, TraceFormat::kBinary}) {
    const auto path = temp_path(fmt == TraceFormat::kText ? "rt.txt" : "rt.bin");
    write_trace(path, events, fmt);
    FileTraceSource src(path);
    EXPECT_EQ(src.format(), fmt);
    EXPECT_EQ(read_trace(path), events);
    std::filesystem::remove(path);
  }
}

TEST(TraceFiles, BinaryErrors) {
  std::istringstream bad_magic("NOPE\x01");
  EXPECT_THROW(BinaryTraceReader{bad_magic}, TraceError);
  std::istringstream bad_version(std::string("HYPT\x02", 5));
  EXPECT_THROW(BinaryTraceReader{bad_version}, TraceError);
  std::istringstream truncated(std::string("HYPT\x01\x00\x00", 7));
  BinaryTraceReader r(truncated);
  EXPECT_THROW(r.next(), TraceError);
  std::string rec("HYPT\x01", 5);
  rec += std::string(8, '\0') + '\x02' + std::string("\x01\0\0\0", 4);
  std::istringstream bad_outcome(rec);
  BinaryTraceReader r2(bad_outcome);
  EXPECT_THROW(r2.next(), TraceError);
  EXPECT_THROW(FileTraceSource("/nonexistent/trace.txt"), TraceError);
}

TEST(Synthetic, PeriodicLoopPattern) {
  GeneratorSpec g;
  g.period = 4;
  EXPECT_EQ(periodic_pattern(g), "TTTN");
  EXPECT_EQ(outcomes(gen_synthetic(g, 1, 9)), "TTTNTTTNT");
  g.pattern = "TNN";
  EXPECT_EQ(outcomes(gen_synthetic(g, 1, 7)), "TNNTNNT");
}

TEST(Synthetic, NestedLoop) {
  GeneratorSpec g;
  g.kind = GeneratorKind::kNestedLoop;
  g.pc = 0x100;
  g.inner = 3;
  g.outer = 2;
  const auto ev = gen_synthetic(g, 1, 8);
  EXPECT_EQ(outcomes(ev), "TTNTTTNN");
  EXPECT_EQ(ev[3].pc, 0x140u);
  EXPECT_EQ(ev[7].pc, 0x140u);
}

TEST(Synthetic, AlternatorAndBiased) {
  GeneratorSpec a;
  a.kind = GeneratorKind::kAlternator;
  EXPECT_EQ(outcomes(gen_synthetic(a, 1, 6)), "TNTNTN");
  GeneratorSpec b;
  b.kind = GeneratorKind::kBiased;
  b.taken_probability = 0.8;
  const auto ev = gen_synthetic(b, 3, 20000);
  const std::string s = outcomes(ev);
  const auto taken = std::count(s.begin(), s.end(), 'T');
  EXPECT_NEAR(static_cast<double>(taken) / 20000.0, 0.8, 0.02);
}

TEST(Synthetic, CorrelatedFollowerCopiesOrInverts) {
  for (bool invert : {false, true}) {
    GeneratorSpec g;
    g.kind = GeneratorKind::kCorrelated;
    g.invert = invert;
    const auto ev = gen_synthetic(g, 5, 1000);
    for (std::size_t i = 0; i + 1 < ev.size(); i += 2) {
      EXPECT_EQ(ev[i + 1].pc, ev[i].pc + 0x40);
      EXPECT_EQ(ev[i + 1].taken, ev[i].taken != invert);
    }
  }
}

TEST(Synthetic, WeightedMixIsSeededAndRoundRobinIsNot) {
  GeneratorSpec mix;
  mix.kind = GeneratorKind::kMix;
  GeneratorSpec a;
  a.kind = GeneratorKind::kBiased;
  a.pc = 0x10;
  GeneratorSpec b = a;
  b.pc = 0x20;
  b.weight = 3.0;
  mix.children = {a, b};
  EXPECT_EQ(gen_synthetic(mix, 7, 2000), gen_synthetic(mix, 7, 2000));
  EXPECT_NE(gen_synthetic(mix, 7, 2000), gen_synthetic(mix, 8, 2000));
  const auto ev = gen_synthetic(mix, 7, 20000);
  const auto bs = std::count_if(ev.begin(), ev.end(), [](const TraceEvent& e) { return e.pc == 0x20; });
  EXPECT_NEAR(static_cast<double>(bs) / 20000.0, 0.75, 0.02);

  GeneratorSpec rr;
  rr.kind = GeneratorKind::kMix;
  rr.schedule = MixSchedule::kRoundRobin;
  GeneratorSpec p;
  p.pc = 0x100;
  p.period = 2;
  p.burst = 2;
  GeneratorSpec q = p;
  q.pc = 0x200;
  q.pattern = "N";
  q.burst = 1;
  rr.children = {p, q};
  const auto r = gen_synthetic(rr, 1, 6);
  EXPECT_EQ(outcomes(r), "TNNTNN");
  EXPECT_EQ(r[2].pc, 0x200u);
}

TEST(Synthetic, Validation) {
  GeneratorSpec g;
  EXPECT_THROW(g.validate(), ConfigError);
  g.pattern = "TX";
  EXPECT_THROW(g.validate(), ConfigError);
  GeneratorSpec mix;
  mix.kind = GeneratorKind::kMix;
  EXPECT_THROW(mix.validate(), ConfigError);
  GeneratorSpec b;
  b.kind = GeneratorKind::kBiased;
  b.taken_probability = 1.5;
  EXPECT_THROW(b.validate(), ConfigError);
  EXPECT_THROW(generator_preset("nope"), ConfigError);
  EXPECT_THROW(generator_kind_from_string("tage"), ConfigError);
  EXPECT_EQ(generator_kind_from_string("nested"), GeneratorKind::kNestedLoop);
}

TEST(Synthetic, PaperStressIsSeedIndependentWithDistinctSlots) {
  const auto spec = generator_preset("paper-stress");
  const auto a = gen_synthetic(spec, 1, 50000);
  EXPECT_EQ(a, gen_synthetic(spec, 99, 50000));
  std::set<std::uint64_t> pcs, slots;
  for (const auto& e : a) pcs.insert(e.pc);
  for (auto pc : pcs) slots.insert(pc & 2047);
  EXPECT_EQ(pcs.size(), slots.size());
  EXPECT_GT(pcs.size(), 10u);
}
