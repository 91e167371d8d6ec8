#include "hypre/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <ostream>
#include <thread>

namespace hypre {

namespace {

std::uint64_t read_u64(const Json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  if (v.is_number_float()) {
    // Allows 1e6 style lengths.
    const double d = v.get<double>();
    if (d >= 0 && d < 1.8e19 && d == static_cast<double>(static_cast<std::uint64_t>(d))) {
      return static_cast<std::uint64_t>(d);
    }
  }
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    try {
      std::size_t used = 0;
      const auto x = std::stoull(s, &used, 0);
      if (used == s.size()) return x;
    } catch (const std::exception&) {
    }
  }
  throw ConfigError(where + ": expected a non-negative integer");
}

void check_keys(const Json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; })) {
      throw ConfigError(where + ": unknown key '" + item.key() + "'");
    }
  }
}

std::string hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
  return buf;
}

const char* schedule_name(MixSchedule s) {
  return s == MixSchedule::kWeighted ? "weighted" : "round-robin";
}

}  // namespace

Json to_json(const GeneratorSpec& spec) {
  Json j{{"kind", to_string(spec.kind)}, {"pc", hex(spec.pc)}};
  switch (spec.kind) {
    case GeneratorKind::kPeriodic:
      if (spec.pattern.empty()) {
        j["period"] = spec.period;
      } else {
        j["pattern"] = spec.pattern;
      }
      break;
    case GeneratorKind::kNestedLoop:
      j["inner"] = spec.inner;
      j["outer"] = spec.outer;
      break;
    case GeneratorKind::kCorrelated:
      j["taken_probability"] = spec.taken_probability;
      j["invert"] = spec.invert;
      break;
    case GeneratorKind::kBiased:
      j["taken_probability"] = spec.taken_probability;
      break;
    case GeneratorKind::kAlternator:
      break;
    case GeneratorKind::kMix: {
      j.erase("pc");
      j["schedule"] = schedule_name(spec.schedule);
      Json children = Json::array();
      for (const auto& c : spec.children) {
        Json cj = to_json(c);
        cj["weight"] = c.weight;
        cj["burst"] = c.burst;
        children.push_back(std::move(cj));
      }
      j["children"] = std::move(children);
      break;
    }
  }
  return j;
}

GeneratorSpec generator_spec_from_json(const Json& j) {
  check_keys(j, "generator",
             {"preset", "kind", "pc", "pattern", "period", "inner", "outer", "taken_probability",
              "invert", "children", "schedule", "weight", "burst"});
  GeneratorSpec spec;
  if (const auto it = j.find("preset"); it != j.end()) {
    if (j.size() != 1) throw ConfigError("generator: 'preset' cannot be combined with other keys");
    if (!it->is_string()) throw ConfigError("generator.preset: expected a string");
    return generator_preset(it->get<std::string>());
  }
  try {
    if (j.contains("kind")) spec.kind = generator_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("pc")) spec.pc = read_u64(j.at("pc"), "generator.pc");
    if (j.contains("pattern")) spec.pattern = j.at("pattern").get<std::string>();
    if (j.contains("period")) spec.period = read_u64(j.at("period"), "generator.period");
    if (j.contains("inner")) spec.inner = read_u64(j.at("inner"), "generator.inner");
    if (j.contains("outer")) spec.outer = read_u64(j.at("outer"), "generator.outer");
    if (j.contains("taken_probability")) {
      spec.taken_probability = j.at("taken_probability").get<double>();
    }
    if (j.contains("invert")) spec.invert = j.at("invert").get<bool>();
    if (j.contains("weight")) spec.weight = j.at("weight").get<double>();
    if (j.contains("burst")) spec.burst = read_u64(j.at("burst"), "generator.burst");
    if (j.contains("schedule")) {
      const auto s = j.at("schedule").get<std::string>();
      if (s == "weighted") {
        spec.schedule = MixSchedule::kWeighted;
      } else if (s == "round-robin") {
        spec.schedule = MixSchedule::kRoundRobin;
      } else {
        throw ConfigError("generator.schedule: expected weighted or round-robin");
      }
    }
    if (j.contains("children")) {
      if (!j.at("children").is_array()) throw ConfigError("generator.children: expected an array");
      for (const auto& c : j.at("children")) spec.children.push_back(generator_spec_from_json(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("generator: wrong type (") + e.what() + ")");
  }
  spec.validate();
  return spec;
}

void ExperimentSpec::validate() const {
  canonical_kind(predictor);
  if (trace.path.empty() == !trace.generator.has_value()) {
    throw ConfigError("trace: give exactly one of a file path or a generator");
  }
  if (trace.generator) {
    trace.generator->validate();
    if (trace.length == 0) throw ConfigError("trace.length must be positive for synthetic traces");
  }
  resolve_config(predictor, config);
}

Json to_json(const TraceSpec& t) {
  if (t.generator) return Json{{"generator", to_json(*t.generator)}, {"length", t.length}};
  return Json{{"path", t.path}};
}

Json to_json(const ExperimentSpec& e) {
  Json j{{"predictor", canonical_kind(e.predictor)},
         {"config", e.config},
         {"trace", to_json(e.trace)},
         {"seed", e.seed}};
  if (e.warmup) j["warmup"] = *e.warmup;
  return j;
}

ExperimentSpec experiment_from_json(const Json& j) {
  check_keys(j, "experiment", {"predictor", "config", "trace", "seed", "warmup"});
  ExperimentSpec e;
  if (j.contains("predictor")) {
    if (!j.at("predictor").is_string()) throw ConfigError("predictor: expected a string");
    e.predictor = canonical_kind(j.at("predictor").get<std::string>());
  }
  if (j.contains("config")) e.config = j.at("config");
  if (j.contains("seed")) e.seed = read_u64(j.at("seed"), "seed");
  if (j.contains("warmup")) e.warmup = read_u64(j.at("warmup"), "warmup");
  if (j.contains("trace")) {
    const Json& t = j.at("trace");
    check_keys(t, "trace", {"path", "generator", "length"});
    if (t.contains("path")) {
      if (!t.at("path").is_string()) throw ConfigError("trace.path: expected a string");
      e.trace.path = t.at("path").get<std::string>();
    }
    if (t.contains("generator")) e.trace.generator = generator_spec_from_json(t.at("generator"));
    if (t.contains("length")) e.trace.length = read_u64(t.at("length"), "trace.length");
  }
  return e;
}

std::unique_ptr<EventSource> open_events(const TraceSpec& trace, std::uint64_t seed) {
  if (trace.generator) return std::make_unique<SyntheticSource>(*trace.generator, seed, trace.length);
  return std::make_unique<FileTraceSource>(trace.path);
}

std::uint64_t trace_length(const TraceSpec& trace) {
  if (trace.generator) return trace.length;
  FileTraceSource source(trace.path);
  std::uint64_t n = 0;
  while (source.next()) ++n;
  return n;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, BranchLog* log) {
  spec.validate();
  ExperimentResult r;
  r.spec = spec;
  r.spec.predictor = canonical_kind(spec.predictor);
  r.resolved_config = resolve_config(r.spec.predictor, spec.config);
  r.warmup = spec.warmup ? *spec.warmup : default_warmup(trace_length(spec.trace));
  auto predictor = make_predictor(r.spec.predictor, spec.config, spec.seed);
  r.storage_bits = predictor->storage().total();
  auto events = open_events(spec.trace, spec.seed);
  r.report = score(*predictor, *events, r.warmup, log);
  r.report.predictor = r.spec.predictor;
  return r;
}

Json to_json(const RunReport& r) {
  Json per_source = Json::object();
  for (const auto& [k, v] : r.per_source) per_source[k] = v;
  Json per_table = Json::array();
  for (const auto& t : r.per_table) {
    per_table.push_back(Json{{"length", t.length},
                             {"lookups", t.lookups},
                             {"confident", t.confident},
                             {"marginal", t.marginal},
                             {"wrong", t.wrong},
                             {"provided", t.provided},
                             {"provided_wrong", t.provided_wrong}});
  }
  return Json{{"total_branches", r.total_branches},
              {"mispredictions", r.mispredictions},
              {"accuracy", r.accuracy},
              {"instructions", r.instructions},
              {"mpki", r.mpki},
              {"warmup_excluded", r.warmup_excluded},
              {"per_source", std::move(per_source)},
              {"per_table", std::move(per_table)}};
}

Json report_json(const ExperimentResult& r) {
  Json j{{"predictor", r.spec.predictor}};
  const Json body = to_json(r.report);
  for (const auto& item : body.items()) j[item.key()] = item.value();
  j["storage_bits"] = r.storage_bits;
  Json exp = to_json(r.spec);
  exp["warmup"] = r.warmup;
  exp["config"] = r.resolved_config;
  j["experiment"] = std::move(exp);
  return j;
}

Json to_json(const Overlap& o) {
  return Json{{"total", o.total},
              {"both_correct", o.both_correct},
              {"both_wrong", o.both_wrong},
              {"only_a_correct", o.only_a},
              {"only_b_correct", o.only_b},
              {"identical_pct", 100.0 * o.identical_fraction()},
              {"both_wrong_pct", 100.0 * o.both_wrong_fraction()},
              {"only_a_correct_pct", 100.0 * o.only_a_fraction()},
              {"only_b_correct_pct", 100.0 * o.only_b_fraction()},
              {"only_a_share_of_disagreements_pct", 100.0 * o.only_a_share_of_disagreements()}};
}

namespace {

void set_path(Json& root, const std::string& dotted, const Json& value) {
  Json* node = &root;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    const std::string part = dotted.substr(start, dot - start);
    if (part.empty()) throw ConfigError("sweep: bad key '" + dotted + "'");
    if (!node->is_object()) *node = Json::object();
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
}

ExperimentSpec apply_point(const SweepSpec& spec, const std::vector<Json>& point) {
  ExperimentSpec e = spec.base;
  for (std::size_t i = 0; i < spec.axes.size(); ++i) {
    const auto& key = spec.axes[i].key;
    const Json& v = point[i];
    if (key == "predictor") {
      if (!v.is_string()) throw ConfigError("sweep predictor values must be strings");
      e.predictor = v.get<std::string>();
    } else if (key == "seed") {
      e.seed = read_u64(v, "seed");
    } else if (key == "warmup") {
      e.warmup = read_u64(v, "warmup");
    } else if (key == "trace.length") {
      e.trace.length = read_u64(v, "trace.length");
    } else {
      set_path(e.config, key, v);
    }
  }
  return e;
}

std::string csv_cell(const Json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") != std::string::npos) {
    std::string q = "\"";
    for (const char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  return s;
}

}  // namespace

SweepSpec sweep_from_json(const Json& j) {
  check_keys(j, "sweep", {"base", "grid"});
  SweepSpec s;
  if (j.contains("base")) s.base = experiment_from_json(j.at("base"));
  if (j.contains("grid")) {
    const Json& g = j.at("grid");
    if (!g.is_object()) throw ConfigError("sweep.grid: expected an object of arrays");
    for (const auto& item : g.items()) {
      if (!item.value().is_array() || item.value().empty()) {
        throw ConfigError("sweep.grid." + item.key() + ": expected a non-empty array");
      }
      s.axes.push_back({item.key(), std::vector<Json>(item.value().begin(), item.value().end())});
    }
  }
  return s;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, unsigned jobs) {
  std::vector<std::vector<Json>> points{{}};
  for (const auto& axis : spec.axes) {
    std::vector<std::vector<Json>> next;
    for (const auto& p : points) {
      for (const auto& v : axis.values) {
        auto q = p;
        q.push_back(v);
        next.push_back(std::move(q));
      }
    }
    points = std::move(next);
  }

  std::vector<SweepRow> rows(points.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (std::size_t i = cursor++; i < points.size(); i = cursor++) {
      rows[i].point = points[i];
      try {
        rows[i].report = run_experiment(apply_point(spec, points[i])).report;
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
    }
  };
  const unsigned n = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(points.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  for (const auto& axis : spec.axes) out << csv_cell(axis.key) << ',';
  out << "total_branches,mispredictions,accuracy,mpki,error\n";
  for (const auto& row : rows) {
    for (const auto& v : row.point) out << csv_cell(v) << ',';
    if (row.report) {
      out << row.report->total_branches << ',' << row.report->mispredictions << ','
          << Json(row.report->accuracy).dump() << ',' << Json(row.report->mpki).dump() << ",\n";
    } else {
      out << ",,,," << csv_cell(row.error) << '\n';
    }
  }
}

}  // namespace hypre
