#pragma once

// Experiment descriptions (predictor + trace + seed + warmup), their JSON
// form, single runs, and parallel parameter sweeps.

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hypre/factory.hpp"
#include "hypre/scoring.hpp"
#include "hypre/synthetic.hpp"

namespace hypre {

Json to_json(const GeneratorSpec& spec);
// Accepts {"preset": name} in place of a full spec.
GeneratorSpec generator_spec_from_json(const Json& j);

struct TraceSpec {
  std::string path;                      // trace file, or
  std::optional<GeneratorSpec> generator;  // synthetic stream of `length` events
  std::uint64_t length = 0;
};

struct ExperimentSpec {
  std::string predictor = "hypre-ideal";
  Json config = Json::object();  // overrides merged into the preset
  TraceSpec trace;
  std::uint64_t seed = 1;
  std::optional<std::uint64_t> warmup;  // default_warmup(length) when unset

  void validate() const;
};

ExperimentSpec experiment_from_json(const Json& j);
Json to_json(const TraceSpec& t);
Json to_json(const ExperimentSpec& e);

// Synthetic streams use the experiment seed.
std::unique_ptr<EventSource> open_events(const TraceSpec& trace, std::uint64_t seed);
// Streams the trace once for file traces.
std::uint64_t trace_length(const TraceSpec& trace);

struct ExperimentResult {
  ExperimentSpec spec;
  Json resolved_config;
  std::uint64_t warmup = 0;
  std::uint64_t storage_bits = 0;
  RunReport report;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, BranchLog* log = nullptr);

// Deterministic report body: no timestamps or host details.
Json report_json(const ExperimentResult& r);
Json to_json(const RunReport& r);
Json to_json(const Overlap& o);

struct SweepAxis {
  // "predictor", "seed", "warmup", "trace.length", or a dotted path into
  // the predictor config such as "base.dim".
  std::string key;
  std::vector<Json> values;
};

struct SweepSpec {
  ExperimentSpec base;
  std::vector<SweepAxis> axes;
};

// {"base": <experiment>, "grid": {"base.dim": [128, 1024]}}
SweepSpec sweep_from_json(const Json& j);

struct SweepRow {
  std::vector<Json> point;  // one value per axis
  std::optional<RunReport> report;
  std::string error;
};

// Cartesian product, axes varying slowest-first. Failures are recorded per
// row and do not stop the sweep.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs);
void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows);

}  // namespace hypre
