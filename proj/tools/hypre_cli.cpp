// hypre: generate traces, run predictors, compare and sweep them.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "hypre/experiment.hpp"

namespace {

using hypre::ConfigError;
using hypre::Json;

constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;

std::uint64_t parse_count(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double d = 0;
  try {
    d = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(d >= 0) || d > 1e18 || d != std::floor(d)) {
    throw ConfigError(what + ": expected a non-negative integer, got '" + text + "'");
  }
  return static_cast<std::uint64_t>(d);
}

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return Json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// "base.dim=128" -> config["base"]["dim"] = 128. Values parse as JSON when
// they can, otherwise as strings.
void apply_set(Json& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("--set expects key=value, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  Json value = Json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  Json* node = &config;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object()) *node = Json::object();
    node = &(*node)[part];
  }
  *node = value;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << body;
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

// Report body plus a segregated metadata block.
std::string report_text(Json body) {
  Json doc = std::move(body);
  doc["metadata"] = Json{{"tool", "hypre"},
                         {"generated_at", static_cast<std::uint64_t>(std::time(nullptr))}};
  return doc.dump(2) + "\n";
}

// Options shared by run, compare and sweep for picking the trace.
struct TraceOptions {
  std::string trace_path;
  std::string preset;
  std::string length = "0";

  void add(CLI::App* cmd) {
    cmd->add_option("--trace", trace_path, "Trace file (text or binary)");
    cmd->add_option("--preset", preset, "Synthetic generator preset (e.g. paper-stress)");
    cmd->add_option("--len", length, "Synthetic trace length, e.g. 1e6");
  }

  void apply(hypre::ExperimentSpec& e) const {
    if (!trace_path.empty() && !preset.empty()) {
      throw ConfigError("--trace and --preset are mutually exclusive");
    }
    if (!trace_path.empty()) {
      e.trace = {};
      e.trace.path = trace_path;
    } else if (!preset.empty()) {
      e.trace = {};
      e.trace.generator = hypre::generator_preset(preset);
    }
    if (const auto n = parse_count(length, "--len"); n != 0) e.trace.length = n;
  }
};

struct ExperimentOptions {
  std::string config_path;
  std::string predictor;
  std::vector<std::string> sets;
  std::string warmup;
  TraceOptions trace;

  void add(CLI::App* cmd, bool with_predictor = true) {
    cmd->add_option("--config", config_path, "Experiment JSON file; flags override it");
    if (with_predictor) cmd->add_option("--predictor", predictor, "Predictor kind");
    cmd->add_option("--set", sets, "Predictor config override key=value (repeatable)");
    cmd->add_option("--warmup", warmup, "Branches excluded from scoring");
    trace.add(cmd);
  }

  hypre::ExperimentSpec build(std::uint64_t seed, bool seed_given) const {
    hypre::ExperimentSpec e;
    if (!config_path.empty()) e = hypre::experiment_from_json(load_json(config_path));
    if (!predictor.empty()) e.predictor = predictor;
    for (const auto& s : sets) apply_set(e.config, s);
    if (!warmup.empty()) e.warmup = parse_count(warmup, "--warmup");
    if (seed_given || config_path.empty()) e.seed = seed;
    trace.apply(e);
    e.validate();
    return e;
  }
};

void print_report(const hypre::ExperimentResult& r) {
  const auto& rep = r.report;
  std::cout << "predictor       " << r.spec.predictor << "\n"
            << "branches        " << rep.total_branches << " (warmup " << rep.warmup_excluded
            << " excluded)\n"
            << "mispredictions  " << rep.mispredictions << "\n"
            << std::fixed << std::setprecision(4) << "accuracy        " << 100.0 * rep.accuracy
            << " %\n"
            << "mpki            " << rep.mpki << "\n"
            << "storage         " << r.storage_bits << " bits\n";
  for (const auto& [source, count] : rep.per_source) {
    std::cout << "  " << std::left << std::setw(14) << source << std::right << count << "\n";
  }
}

hypre::GeneratorSpec gen_spec_from_flags(const std::string& kind, const std::string& pattern,
                                         const std::string& period, const std::string& inner,
                                         const std::string& outer, double q,
                                         const std::string& pc) {
  hypre::GeneratorSpec g;
  g.kind = hypre::generator_kind_from_string(kind);
  if (g.kind == hypre::GeneratorKind::kMix) {
    throw ConfigError("--kind mix needs --preset or --spec");
  }
  g.pattern = pattern;
  if (!period.empty()) g.period = parse_count(period, "--period");
  if (!inner.empty()) g.inner = parse_count(inner, "--inner");
  if (!outer.empty()) g.outer = parse_count(outer, "--outer");
  g.taken_probability = q;
  if (!pc.empty()) g.pc = std::stoull(pc, nullptr, 16);
  g.validate();
  return g;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hyperdimensional branch predictor simulator"};
  app.require_subcommand(1);

  std::uint64_t seed = 1;
  auto* seed_opt = app.add_option("--seed", seed, "Seed for generators and predictors")
                       ->envname("HYPRE_SEED");

  // gen
  auto* gen = app.add_subcommand("gen", "Write a synthetic trace");
  std::string kind = "periodic", pattern, period, inner, outer, pc, spec_path, gen_preset,
              gen_len = "0", out_path, format = "text";
  double q = 0.5;
  gen->add_option("--kind", kind, "periodic, nested, correlated, biased, alternator, mix");
  gen->add_option("--pattern", pattern, "T/N pattern for periodic");
  gen->add_option("--period", period, "Loop period for periodic without a pattern");
  gen->add_option("--inner", inner, "Inner trip count (nested)");
  gen->add_option("--outer", outer, "Outer trip count (nested)");
  gen->add_option("--q", q, "Taken probability (biased, correlated)");
  gen->add_option("--pc", pc, "Branch pc in hex");
  gen->add_option("--preset", gen_preset, "Generator preset");
  gen->add_option("--spec", spec_path, "Generator spec JSON file");
  gen->add_option("--len", gen_len, "Number of branches, e.g. 1e6")->required();
  gen->add_option("-o,--out", out_path, "Output path (stdout when omitted, text only)");
  gen->add_option("--format", format, "text or binary")
      ->check(CLI::IsMember({"text", "binary"}));

  // run
  auto* run = app.add_subcommand("run", "Score one predictor on one trace");
  ExperimentOptions run_opts;
  std::string report_path, log_path;
  run_opts.add(run);
  run->add_option("--report", report_path, "Write the JSON report here");
  run->add_option("--log-branches", log_path, "Write a per-branch CSV log here");

  // compare
  auto* cmp = app.add_subcommand("compare", "Overlap of two predictors on one trace");
  ExperimentOptions cmp_opts;
  std::vector<std::string> cmp_predictors;
  std::string cmp_config_b, cmp_report;
  cmp_opts.add(cmp, false);
  cmp->add_option("--predictor", cmp_predictors, "Two predictor kinds, A then B")
      ->expected(1, 2);
  cmp->add_option("--config-b", cmp_config_b, "Experiment JSON for B (default: same as A)");
  cmp->add_option("--report", cmp_report, "Write the overlap JSON here");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Run a grid of experiments");
  ExperimentOptions sweep_opts;
  std::string grid_path, sweep_out;
  std::vector<std::string> axes;
  unsigned jobs = std::max(1U, std::thread::hardware_concurrency());
  sweep_opts.add(sweep);
  sweep->add_option("--grid", grid_path, "Sweep JSON file {base, grid}");
  sweep->add_option("--axis", axes, "Grid axis key=v1,v2,... (repeatable)");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("-o,--out", sweep_out, "CSV output path (stdout when omitted)");

  // size
  auto* size = app.add_subcommand("size", "Itemized storage budget");
  std::string size_predictor = "hypre-ideal", size_config;
  std::vector<std::string> size_sets;
  size->add_option("--predictor", size_predictor, "Predictor kind");
  size->add_option("--config", size_config, "Predictor config JSON (overrides)");
  size->add_option("--set", size_sets, "Config override key=value (repeatable)");

  CLI11_PARSE(app, argc, argv);
  const bool seed_given = seed_opt->count() > 0;

  try {
    if (*gen) {
      hypre::GeneratorSpec g;
      if (!spec_path.empty()) {
        g = hypre::generator_spec_from_json(load_json(spec_path));
      } else if (!gen_preset.empty()) {
        g = hypre::generator_preset(gen_preset);
      } else {
        g = gen_spec_from_flags(kind, pattern, period, inner, outer, q, pc);
      }
      const std::uint64_t n = parse_count(gen_len, "--len");
      hypre::SyntheticSource source(g, seed, n);
      const auto fmt = format == "binary" ? hypre::TraceFormat::kBinary : hypre::TraceFormat::kText;
      if (out_path.empty()) {
        if (fmt == hypre::TraceFormat::kBinary) throw ConfigError("binary output needs --out");
        hypre::TraceWriter writer(std::cout, fmt);
        while (auto e = source.next()) writer.write(*e);
      } else {
        hypre::write_trace(out_path, source, fmt);
      }
      return 0;
    }

    if (*run) {
      const auto spec = run_opts.build(seed, seed_given);
      std::ofstream log_file;
      std::unique_ptr<hypre::CsvBranchLog> log;
      if (!log_path.empty()) {
        log_file.open(log_path, std::ios::binary | std::ios::trunc);
        if (!log_file) throw std::runtime_error("cannot open '" + log_path + "' for writing");
        log = std::make_unique<hypre::CsvBranchLog>(log_file);
      }
      const auto result = hypre::run_experiment(spec, log.get());
      if (log_file.is_open() && !log_file.flush()) {
        throw std::runtime_error("write to '" + log_path + "' failed");
      }
      print_report(result);
      if (!report_path.empty()) write_file(report_path, report_text(hypre::report_json(result)));
      return 0;
    }

    if (*cmp) {
      if (cmp_predictors.empty() && cmp_config_b.empty()) {
        throw ConfigError("compare needs two --predictor values or --config-b");
      }
      cmp_opts.predictor = cmp_predictors.empty() ? "" : cmp_predictors.front();
      auto a = cmp_opts.build(seed, seed_given);
      hypre::ExperimentSpec b = a;
      if (!cmp_config_b.empty()) {
        b = hypre::experiment_from_json(load_json(cmp_config_b));
        cmp_opts.trace.apply(b);
      }
      if (cmp_predictors.size() == 2) {
        b.predictor = cmp_predictors[1];
        if (cmp_config_b.empty()) b.config = Json::object();
      }
      b.validate();
      if (a.seed != b.seed || hypre::to_json(a.trace) != hypre::to_json(b.trace)) {
        throw ConfigError("compare: both sides must use the same trace and seed");
      }
      const std::uint64_t warmup = a.warmup ? *a.warmup
                                            : hypre::default_warmup(hypre::trace_length(a.trace));
      a.warmup = warmup;
      if (b.warmup && *b.warmup != warmup) throw ConfigError("compare: warmups differ");
      b.warmup = warmup;
      hypre::CorrectnessLog log_a(warmup), log_b(warmup);
      const auto ra = hypre::run_experiment(a, &log_a);
      const auto rb = hypre::run_experiment(b, &log_b);
      const auto overlap = hypre::compare(ra.report, log_a, rb.report, log_b);
      std::cout << "A " << ra.spec.predictor << " accuracy " << std::fixed << std::setprecision(4)
                << 100.0 * ra.report.accuracy << " %\n"
                << "B " << rb.spec.predictor << " accuracy " << 100.0 * rb.report.accuracy
                << " %\n"
                << "cell,count,pct\n"
                << "both_correct," << overlap.both_correct << ','
                << 100.0 * (1.0 - overlap.both_wrong_fraction() - overlap.only_a_fraction() -
                            overlap.only_b_fraction())
                << "\nboth_wrong," << overlap.both_wrong << ','
                << 100.0 * overlap.both_wrong_fraction() << "\nonly_a_correct," << overlap.only_a
                << ',' << 100.0 * overlap.only_a_fraction() << "\nonly_b_correct,"
                << overlap.only_b << ',' << 100.0 * overlap.only_b_fraction() << "\n"
                << "identical," << overlap.both_correct + overlap.both_wrong << ','
                << 100.0 * overlap.identical_fraction() << "\n";
      if (!cmp_report.empty()) {
        Json body{{"a", hypre::report_json(ra)},
                  {"b", hypre::report_json(rb)},
                  {"overlap", hypre::to_json(overlap)}};
        write_file(cmp_report, report_text(std::move(body)));
      }
      return 0;
    }

    if (*sweep) {
      hypre::SweepSpec s;
      if (!grid_path.empty()) {
        s = hypre::sweep_from_json(load_json(grid_path));
        if (!sweep_opts.predictor.empty()) s.base.predictor = sweep_opts.predictor;
        for (const auto& a : sweep_opts.sets) apply_set(s.base.config, a);
        if (!sweep_opts.warmup.empty()) s.base.warmup = parse_count(sweep_opts.warmup, "--warmup");
        if (seed_given) s.base.seed = seed;
        sweep_opts.trace.apply(s.base);
      } else {
        s.base = sweep_opts.build(seed, seed_given);
      }
      for (const auto& axis : axes) {
        const auto eq = axis.find('=');
        if (eq == std::string::npos || eq == 0) {
          throw ConfigError("--axis expects key=v1,v2,..., got '" + axis + "'");
        }
        hypre::SweepAxis a{axis.substr(0, eq), {}};
        std::stringstream values(axis.substr(eq + 1));
        std::string v;
        while (std::getline(values, v, ',')) {
          Json parsed = Json::parse(v, nullptr, false);
          a.values.push_back(parsed.is_discarded() ? Json(v) : parsed);
        }
        if (a.values.empty()) throw ConfigError("--axis " + a.key + " has no values");
        s.axes.push_back(std::move(a));
      }
      const auto rows = hypre::run_sweep(s, jobs);
      if (sweep_out.empty()) {
        hypre::write_sweep_csv(std::cout, s, rows);
      } else {
        std::ostringstream csv;
        hypre::write_sweep_csv(csv, s, rows);
        write_file(sweep_out, csv.str());
      }
      bool any_failed = false;
      for (const auto& r : rows) any_failed = any_failed || !r.error.empty();
      return any_failed ? kExitRuntime : 0;
    }

    if (*size) {
      Json overrides = size_config.empty() ? Json::object() : load_json(size_config);
      for (const auto& a : size_sets) apply_set(overrides, a);
      const auto predictor = hypre::make_predictor(size_predictor, overrides, seed);
      const auto breakdown = predictor->storage();
      for (const auto& item : breakdown.items) {
        std::cout << std::left << std::setw(28) << item.name << std::right << std::setw(12)
                  << item.bits << " b\n";
      }
      std::cout << std::left << std::setw(28) << "total" << std::right << std::setw(12)
                << breakdown.total() << " b\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "hypre: " << e.what() << "\n";
    return kExitConfig;
  } catch (const hypre::UsageError& e) {
    std::cerr << "hypre: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "hypre: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
