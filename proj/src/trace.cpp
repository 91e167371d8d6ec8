#include "hypre/trace.hpp"

#include <array>
#include <charconv>
#include <cstring>
#include <istream>
#include <ostream>

namespace hypre {

namespace {

constexpr std::array<char, 4> kMagic{'H', 'Y', 'P', 'T'};
constexpr std::uint8_t kBinaryVersion = 1;

[[noreturn]] void fail_line(std::size_t line_number, const std::string& what) {
  throw TraceError("trace line " + std::to_string(line_number) + ": " + what);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::optional<TraceEvent> VectorSource::next() {
  if (pos_ >= events_.size()) return std::nullopt;
  return events_[pos_++];
}

TraceEvent parse_text_line(const std::string& line, std::size_t line_number, bool& has_event) {
  std::string_view body(line);
  if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
  body = trim(body);
  has_event = !body.empty();
  TraceEvent e;
  if (!has_event) return e;

  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto start = body.find_first_not_of(" \t", pos);
    if (start == std::string_view::npos) break;
    auto end = body.find_first_of(" \t", start);
    if (end == std::string_view::npos) end = body.size();
    fields.push_back(body.substr(start, end - start));
    pos = end;
  }
  if (fields.size() < 2 || fields.size() > 3) {
    fail_line(line_number, "expected '<pc-hex> <T|N> [insn_delta]'");
  }

  std::string_view pc_text = fields[0];
  if (pc_text.size() > 2 && pc_text[0] == '0' && (pc_text[1] == 'x' || pc_text[1] == 'X')) {
    pc_text.remove_prefix(2);
  }
  const auto [pc_end, pc_err] =
      std::from_chars(pc_text.data(), pc_text.data() + pc_text.size(), e.pc, 16);
  if (pc_err != std::errc{} || pc_end != pc_text.data() + pc_text.size()) {
    fail_line(line_number, "invalid pc '" + std::string(fields[0]) + "'");
  }

  if (fields[1] == "T") {
    e.taken = true;
  } else if (fields[1] == "N") {
    e.taken = false;
  } else {
    fail_line(line_number, "invalid outcome '" + std::string(fields[1]) + "' (expected T or N)");
  }

  if (fields.size() == 3) {
    std::uint64_t delta = 0;
    const auto [d_end, d_err] =
        std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), delta, 10);
    if (d_err != std::errc{} || d_end != fields[2].data() + fields[2].size() || delta < 1 ||
        delta > 0xFFFFFFFFULL) {
      fail_line(line_number, "invalid insn_delta '" + std::string(fields[2]) + "'");
    }
    e.insn_delta = static_cast<std::uint32_t>(delta);
  }
  return e;
}

std::string format_text_line(const TraceEvent& e) {
  std::array<char, 20> buf{};
  const auto [end, err] = std::to_chars(buf.data(), buf.data() + buf.size(), e.pc, 16);
  std::string line(buf.data(), end);
  line += e.taken ? " T" : " N";
  if (e.insn_delta != 1) {
    line += ' ';
    line += std::to_string(e.insn_delta);
  }
  return line;
}

std::optional<TraceEvent> TextTraceReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    bool has_event = false;
    TraceEvent e = parse_text_line(line, line_number_, has_event);
    if (has_event) return e;
  }
  if (in_.bad()) throw TraceError("I/O error while reading trace");
  return std::nullopt;
}

BinaryTraceReader::BinaryTraceReader(std::istream& in) : in_(in) {
  std::array<char, 5> header{};
  in_.read(header.data(), header.size());
  if (in_.gcount() != static_cast<std::streamsize>(header.size()) ||
      std::memcmp(header.data(), kMagic.data(), kMagic.size()) != 0) {
    throw TraceError("binary trace: missing HYPT header");
  }
  if (static_cast<std::uint8_t>(header[4]) != kBinaryVersion) {
    throw TraceError("binary trace: unsupported version " +
                     std::to_string(static_cast<unsigned>(static_cast<std::uint8_t>(header[4]))));
  }
}

std::optional<TraceEvent> BinaryTraceReader::next() {
  std::array<unsigned char, 13> rec{};
  in_.read(reinterpret_cast<char*>(rec.data()), rec.size());
  const auto got = in_.gcount();
  if (got == 0) return std::nullopt;
  if (got != static_cast<std::streamsize>(rec.size())) {
    throw TraceError("binary trace: truncated record " + std::to_string(record_ + 1));
  }
  ++record_;
  TraceEvent e;
  for (int i = 0; i < 8; ++i) e.pc |= static_cast<std::uint64_t>(rec[i]) << (8 * i);
  if (rec[8] > 1) {
    throw TraceError("binary trace: record " + std::to_string(record_) + " has invalid outcome");
  }
  e.taken = rec[8] == 1;
  std::uint32_t delta = 0;
  for (int i = 0; i < 4; ++i) delta |= static_cast<std::uint32_t>(rec[9 + i]) << (8 * i);
  if (delta == 0) {
    throw TraceError("binary trace: record " + std::to_string(record_) + " has insn_delta 0");
  }
  e.insn_delta = delta;
  return e;
}

TraceWriter::TraceWriter(std::ostream& out, TraceFormat format) : out_(out), format_(format) {
  if (format_ == TraceFormat::kBinary) {
    out_.write(kMagic.data(), kMagic.size());
    out_.put(static_cast<char>(kBinaryVersion));
  }
}

void TraceWriter::write(const TraceEvent& e) {
  if (e.insn_delta == 0) throw TraceError("insn_delta must be at least 1");
  if (format_ == TraceFormat::kText) {
    out_ << format_text_line(e) << '\n';
    return;
  }
  std::array<unsigned char, 13> rec{};
  for (int i = 0; i < 8; ++i) rec[i] = static_cast<unsigned char>((e.pc >> (8 * i)) & 0xFFU);
  rec[8] = e.taken ? 1 : 0;
  for (int i = 0; i < 4; ++i) rec[9 + i] = static_cast<unsigned char>((e.insn_delta >> (8 * i)) & 0xFFU);
  out_.write(reinterpret_cast<const char*>(rec.data()), rec.size());
}

FileTraceSource::FileTraceSource(const std::string& path) : file_(path, std::ios::binary) {
  if (!file_) throw TraceError("cannot open trace '" + path + "'");
  std::array<char, 4> probe{};
  file_.read(probe.data(), probe.size());
  const bool binary = file_.gcount() == 4 && probe == kMagic;
  file_.clear();
  file_.seekg(0);
  if (binary) {
    format_ = TraceFormat::kBinary;
    reader_ = std::make_unique<BinaryTraceReader>(file_);
  } else {
    format_ = TraceFormat::kText;
    reader_ = std::make_unique<TextTraceReader>(file_);
  }
}

std::vector<TraceEvent> read_trace(const std::string& path) {
  FileTraceSource source(path);
  std::vector<TraceEvent> events;
  while (auto e = source.next()) events.push_back(*e);
  return events;
}

std::uint64_t write_trace(const std::string& path, EventSource& source, TraceFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw TraceError("cannot open '" + path + "' for writing");
  TraceWriter writer(out, format);
  std::uint64_t count = 0;
  while (auto e = source.next()) {
    writer.write(*e);
    ++count;
  }
  out.flush();
  if (!out) throw TraceError("write to '" + path + "' failed");
  return count;
}

void write_trace(const std::string& path, const std::vector<TraceEvent>& events,
                 TraceFormat format) {
  VectorSource source(events);
  write_trace(path, source, format);
}

}  // namespace hypre
