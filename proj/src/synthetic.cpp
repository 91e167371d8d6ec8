#include "hypre/synthetic.hpp"

#include <stdexcept>

#include "hypre/encoding.hpp"
#include "hypre/hypervector.hpp"

namespace hypre {

namespace {

constexpr std::uint64_t kFollowerOffset = 0x40;

}  // namespace

const char* to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kPeriodic:
      return "periodic";
    case GeneratorKind::kNestedLoop:
      return "nested";
    case GeneratorKind::kCorrelated:
      return "correlated";
    case GeneratorKind::kBiased:
      return "biased";
    case GeneratorKind::kAlternator:
      return "alternator";
    case GeneratorKind::kMix:
      return "mix";
  }
  return "?";
}

GeneratorKind generator_kind_from_string(const std::string& name) {
  for (auto k : {GeneratorKind::kPeriodic, GeneratorKind::kNestedLoop, GeneratorKind::kCorrelated,
                 GeneratorKind::kBiased, GeneratorKind::kAlternator, GeneratorKind::kMix}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown generator kind '" + name + "'");
}

void GeneratorSpec::validate() const {
  switch (kind) {
    case GeneratorKind::kPeriodic:
      if (pattern.empty()) {
        if (period < 1) throw ConfigError("periodic generator needs a pattern or a period >= 1");
      } else if (pattern.find_first_not_of("TN") != std::string::npos) {
        throw ConfigError("periodic pattern may contain only T and N");
      }
      break;
    case GeneratorKind::kNestedLoop:
      if (inner < 1 || outer < 1) throw ConfigError("nested loop trip counts must be >= 1");
      break;
    case GeneratorKind::kCorrelated:
    case GeneratorKind::kBiased:
      if (!(taken_probability >= 0.0 && taken_probability <= 1.0)) {
        throw ConfigError("taken probability must be in [0, 1]");
      }
      break;
    case GeneratorKind::kAlternator:
      break;
    case GeneratorKind::kMix: {
      if (children.empty()) throw ConfigError("mix generator needs at least one child");
      double total = 0;
      for (const auto& c : children) {
        c.validate();
        if (!(c.weight >= 0.0)) throw ConfigError("mix weights must be non-negative");
        if (c.burst < 1) throw ConfigError("mix burst must be >= 1");
        total += c.weight;
      }
      if (!(total > 0.0)) throw ConfigError("mix weights must not all be zero");
      break;
    }
  }
}

std::string periodic_pattern(const GeneratorSpec& spec) {
  if (!spec.pattern.empty()) return spec.pattern;
  std::string p(spec.period - 1, 'T');
  p += 'N';
  return p;
}

class SyntheticSource::Node {
 public:
  virtual ~Node() = default;
  virtual TraceEvent next(SeededRng& rng) = 0;
};

namespace {

TraceEvent event(std::uint64_t pc, bool taken) { return TraceEvent{pc, taken, 1}; }

class PeriodicNode final : public SyntheticSource::Node {
 public:
  PeriodicNode(std::uint64_t pc, std::string pattern) : pc_(pc), pattern_(std::move(pattern)) {}
  TraceEvent next(SeededRng&) override {
    const bool taken = pattern_[pos_] == 'T';
    pos_ = (pos_ + 1) % pattern_.size();
    return event(pc_, taken);
  }

 private:
  std::uint64_t pc_;
  std::string pattern_;
  std::size_t pos_ = 0;
};

class NestedLoopNode final : public SyntheticSource::Node {
 public:
  NestedLoopNode(std::uint64_t pc, std::size_t inner, std::size_t outer)
      : pc_(pc), inner_(inner), outer_(outer) {}
  TraceEvent next(SeededRng&) override {
    if (i_ < inner_) {
      const bool taken = i_ + 1 < inner_;
      ++i_;
      return event(pc_, taken);
    }
    const bool taken = o_ + 1 < outer_;
    i_ = 0;
    o_ = taken ? o_ + 1 : 0;
    return event(pc_ + kFollowerOffset, taken);
  }

 private:
  std::uint64_t pc_;
  std::size_t inner_;
  std::size_t outer_;
  std::size_t i_ = 0;
  std::size_t o_ = 0;
};

class CorrelatedNode final : public SyntheticSource::Node {
 public:
  CorrelatedNode(std::uint64_t pc, double q, bool invert) : pc_(pc), q_(q), invert_(invert) {}
  TraceEvent next(SeededRng& rng) override {
    if (!leader_emitted_) {
      leader_ = rng.uniform() < q_;
      leader_emitted_ = true;
      return event(pc_, leader_);
    }
    leader_emitted_ = false;
    return event(pc_ + kFollowerOffset, leader_ != invert_);
  }

 private:
  std::uint64_t pc_;
  double q_;
  bool invert_;
  bool leader_ = false;
  bool leader_emitted_ = false;
};

class BiasedNode final : public SyntheticSource::Node {
 public:
  BiasedNode(std::uint64_t pc, double q) : pc_(pc), q_(q) {}
  TraceEvent next(SeededRng& rng) override { return event(pc_, rng.uniform() < q_); }

 private:
  std::uint64_t pc_;
  double q_;
};

class MixNode final : public SyntheticSource::Node {
 public:
  MixNode(std::vector<std::unique_ptr<SyntheticSource::Node>> children, std::vector<double> weights,
          std::vector<std::size_t> bursts, MixSchedule schedule)
      : children_(std::move(children)),
        weights_(std::move(weights)),
        bursts_(std::move(bursts)),
        schedule_(schedule) {
    for (const double w : weights_) total_ += w;
  }

  TraceEvent next(SeededRng& rng) override {
    if (left_ == 0) {
      if (schedule_ == MixSchedule::kRoundRobin) {
        current_ = started_ ? (current_ + 1) % children_.size() : 0;
      } else {
        double pick = rng.uniform() * total_;
        current_ = children_.size() - 1;
        for (std::size_t i = 0; i < weights_.size(); ++i) {
          if (pick < weights_[i]) {
            current_ = i;
            break;
          }
          pick -= weights_[i];
        }
      }
      started_ = true;
      left_ = bursts_[current_];
    }
    --left_;
    return children_[current_]->next(rng);
  }

 private:
  std::vector<std::unique_ptr<SyntheticSource::Node>> children_;
  std::vector<double> weights_;
  std::vector<std::size_t> bursts_;
  MixSchedule schedule_;
  double total_ = 0;
  std::size_t current_ = 0;
  std::size_t left_ = 0;
  bool started_ = false;
};

std::unique_ptr<SyntheticSource::Node> build(const GeneratorSpec& spec) {
  switch (spec.kind) {
    case GeneratorKind::kPeriodic:
      return std::make_unique<PeriodicNode>(spec.pc, periodic_pattern(spec));
    case GeneratorKind::kAlternator:
      return std::make_unique<PeriodicNode>(spec.pc, "TN");
    case GeneratorKind::kNestedLoop:
      return std::make_unique<NestedLoopNode>(spec.pc, spec.inner, spec.outer);
    case GeneratorKind::kCorrelated:
      return std::make_unique<CorrelatedNode>(spec.pc, spec.taken_probability, spec.invert);
    case GeneratorKind::kBiased:
      return std::make_unique<BiasedNode>(spec.pc, spec.taken_probability);
    case GeneratorKind::kMix: {
      std::vector<std::unique_ptr<SyntheticSource::Node>> children;
      std::vector<double> weights;
      std::vector<std::size_t> bursts;
      for (const auto& c : spec.children) {
        children.push_back(build(c));
        weights.push_back(c.weight);
        bursts.push_back(c.burst);
      }
      return std::make_unique<MixNode>(std::move(children), std::move(weights), std::move(bursts),
                                       spec.schedule);
    }
  }
  throw ConfigError("unknown generator kind");
}

}  // namespace

SyntheticSource::SyntheticSource(const GeneratorSpec& spec, std::uint64_t seed,
                                 std::uint64_t length)
    : rng_(seed), remaining_(length) {
  spec.validate();
  root_ = build(spec);
}

SyntheticSource::~SyntheticSource() = default;

std::optional<TraceEvent> SyntheticSource::next() {
  if (remaining_ == 0) return std::nullopt;
  --remaining_;
  return root_->next(rng_);
}

namespace {

// Odd multiples of 4 apart, so suite branches never share a local history
// or bimodal slot.
constexpr std::uint64_t kPcStep = 0x104;

GeneratorSpec loop_child(std::uint64_t pc, std::size_t period, std::size_t burst) {
  GeneratorSpec g;
  g.kind = GeneratorKind::kPeriodic;
  g.pc = pc;
  g.period = period;
  g.burst = burst;
  return g;
}

// A loop that runs one full trip every `every` visits; the other visits go
// to always-taken filler branches of the same length.
GeneratorSpec sparse_loop(std::uint64_t& pc, std::size_t period, std::size_t every) {
  GeneratorSpec mix;
  mix.kind = GeneratorKind::kMix;
  mix.schedule = MixSchedule::kRoundRobin;
  mix.burst = period;
  mix.children.push_back(loop_child(pc += kPcStep, period, period));
  for (std::size_t i = 1; i < every; ++i) {
    GeneratorSpec filler = loop_child(pc += kPcStep, 0, period);
    filler.pattern = "T";
    mix.children.push_back(filler);
  }
  return mix;
}

// Round-robin so every period lines up with the global history windows.
// Short loops and alternators are the bimodal-hostile part; the sparse
// loops need more than 4 bits of local history; the long loops straddle
// the global history lengths.
GeneratorSpec paper_stress() {
  GeneratorSpec mix;
  mix.kind = GeneratorKind::kMix;
  mix.schedule = MixSchedule::kRoundRobin;
  std::uint64_t pc = 0x401000;

  for (const std::size_t period : {3, 3, 4, 4, 5, 5}) {
    mix.children.push_back(loop_child(pc += kPcStep, period, period));
  }
  for (int i = 0; i < 2; ++i) {
    GeneratorSpec alt;
    alt.kind = GeneratorKind::kAlternator;
    alt.pc = pc += kPcStep;
    alt.burst = 2;
    mix.children.push_back(alt);
  }
  mix.children.push_back(sparse_loop(pc, 7, 4));
  mix.children.push_back(sparse_loop(pc, 9, 4));
  for (const std::size_t period : {40, 150, 400, 900, 1500, 3000}) {
    mix.children.push_back(loop_child(pc += kPcStep, period, 2));
  }
  return mix;
}

}  // namespace

std::vector<std::string> generator_preset_names() { return {"paper-stress"}; }

GeneratorSpec generator_preset(const std::string& name) {
  if (name == "paper-stress") return paper_stress();
  throw ConfigError("unknown generator preset '" + name + "'");
}

std::vector<TraceEvent> gen_synthetic(const GeneratorSpec& spec, std::uint64_t seed,
                                      std::uint64_t length) {
  SyntheticSource source(spec, seed, length);
  std::vector<TraceEvent> events;
  events.reserve(length);
  while (auto e = source.next()) events.push_back(*e);
  return events;
}

}  // namespace hypre
