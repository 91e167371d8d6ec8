#pragma once

// Deterministic synthetic branch streams built from a small set of pattern
// generators and weighted mixes of them.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hypre/hypervector.hpp"
#include "hypre/trace.hpp"

namespace hypre {

enum class GeneratorKind {
  kPeriodic,    // fixed T/N pattern repeated at one pc
  kNestedLoop,  // inner loop branch plus outer loop branch
  kCorrelated,  // follower branch copies (or inverts) a leader's outcome
  kBiased,      // independent outcomes, taken with a fixed probability
  kAlternator,  // T, N, T, N, ...
  kMix,         // interleaves child generators
};

enum class MixSchedule {
  kWeighted,    // each visit picks a child at random, proportional to weight
  kRoundRobin,  // children visited in order
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kPeriodic;
  std::uint64_t pc = 0x400000;

  // kPeriodic: explicit pattern such as "TTN"; when empty, `period` gives a
  // loop pattern of period - 1 taken outcomes followed by one not-taken.
  std::string pattern;
  std::size_t period = 0;

  // kNestedLoop: inner trip count and outer trip count. The outer branch
  // sits at pc + 0x40.
  std::size_t inner = 4;
  std::size_t outer = 4;

  // kBiased, and the leader of kCorrelated.
  double taken_probability = 0.5;
  // kCorrelated: the follower (pc + 0x40) outcome is the leader's, or its
  // negation when invert is set.
  bool invert = false;

  // kMix
  std::vector<GeneratorSpec> children;
  MixSchedule schedule = MixSchedule::kWeighted;
  // As a mix child: selection weight and events emitted per visit.
  double weight = 1.0;
  std::size_t burst = 1;

  // Throws ConfigError on invalid parameters.
  void validate() const;
};

const char* to_string(GeneratorKind kind);
GeneratorKind generator_kind_from_string(const std::string& name);

// Expands a periodic spec into its T/N pattern.
std::string periodic_pattern(const GeneratorSpec& spec);

// Names of the built-in suites accepted by generator_preset().
std::vector<std::string> generator_preset_names();
GeneratorSpec generator_preset(const std::string& name);

class SyntheticSource final : public EventSource {
 public:
  SyntheticSource(const GeneratorSpec& spec, std::uint64_t seed, std::uint64_t length);
  ~SyntheticSource() override;
  std::optional<TraceEvent> next() override;

  class Node;

 private:
  std::unique_ptr<Node> root_;
  SeededRng rng_;
  std::uint64_t remaining_;
};

std::vector<TraceEvent> gen_synthetic(const GeneratorSpec& spec, std::uint64_t seed,
                                      std::uint64_t length);

}  // namespace hypre
