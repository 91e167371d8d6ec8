#pragma once

// Branch trace events and the two on-disk formats.
//
// Text: one event per line, "<pc-hex> <T|N> [insn_delta]", '#' starts a
// comment, blank lines are ignored.
// Binary: "HYPT", version byte (1), then records of pc (u64 LE),
// outcome (u8, 0 or 1), insn_delta (u32 LE).

#include <cstdint>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hypre {

struct TraceEvent {
  std::uint64_t pc = 0;
  bool taken = false;
  std::uint32_t insn_delta = 1;

  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Pull-based stream of events; the seam for additional trace formats.
class EventSource {
 public:
  virtual ~EventSource() = default;
  virtual std::optional<TraceEvent> next() = 0;
};

class VectorSource final : public EventSource {
 public:
  explicit VectorSource(const std::vector<TraceEvent>& events) : events_(events) {}
  std::optional<TraceEvent> next() override;

 private:
  const std::vector<TraceEvent>& events_;
  std::size_t pos_ = 0;
};

enum class TraceFormat { kText, kBinary };

TraceEvent parse_text_line(const std::string& line, std::size_t line_number, bool& has_event);
std::string format_text_line(const TraceEvent& e);

class TextTraceReader final : public EventSource {
 public:
  explicit TextTraceReader(std::istream& in) : in_(in) {}
  std::optional<TraceEvent> next() override;

 private:
  std::istream& in_;
  std::size_t line_number_ = 0;
};

class BinaryTraceReader final : public EventSource {
 public:
  // Reads and checks the header immediately.
  explicit BinaryTraceReader(std::istream& in);
  std::optional<TraceEvent> next() override;

 private:
  std::istream& in_;
  std::uint64_t record_ = 0;
};

class TraceWriter {
 public:
  TraceWriter(std::ostream& out, TraceFormat format);
  void write(const TraceEvent& e);

 private:
  std::ostream& out_;
  TraceFormat format_;
};

// Opens a trace file for streaming; the format is detected from the magic.
class FileTraceSource final : public EventSource {
 public:
  explicit FileTraceSource(const std::string& path);
  std::optional<TraceEvent> next() override { return reader_->next(); }
  TraceFormat format() const { return format_; }

 private:
  std::ifstream file_;
  TraceFormat format_;
  std::unique_ptr<EventSource> reader_;
};

std::vector<TraceEvent> read_trace(const std::string& path);
void write_trace(const std::string& path, const std::vector<TraceEvent>& events,
                 TraceFormat format = TraceFormat::kText);
// Streams `source` to `path`; returns the number of events written.
std::uint64_t write_trace(const std::string& path, EventSource& source, TraceFormat format);

}  // namespace hypre
