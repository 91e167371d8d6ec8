#include "hypre/factory.hpp"

#include <algorithm>
#include <set>

namespace hypre {

namespace {

// Parsed JSON holds positive integers as unsigned; values built in code may
// be signed.
bool non_negative_integer(const Json& v) {
  return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
}

// Reads fields out of one JSON object and rejects anything left unread.
class Reader {
 public:
  Reader(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where_ + "." + key + ": wrong type");
    }
  }

  void get_unsigned(const char* key, std::size_t& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!non_negative_integer(*it)) throw ConfigError(where_ + "." + key + ": expected a non-negative integer");
    out = it->get<std::size_t>();
  }

  void get_unsigned(const char* key, unsigned& out) {
    std::size_t v = out;
    get_unsigned(key, v);
    if (v > 0xFFFFFFFFULL) throw ConfigError(where_ + "." + key + ": out of range");
    out = static_cast<unsigned>(v);
  }

  void get_sizes(const char* key, std::vector<std::size_t>& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_array()) throw ConfigError(where_ + "." + key + ": expected an array");
    out.clear();
    for (const auto& v : *it) {
      if (!non_negative_integer(v)) {
        throw ConfigError(where_ + "." + key + ": expected non-negative integers");
      }
      out.push_back(v.get<std::size_t>());
    }
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string where(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) {
        throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
      }
    }
  }

 private:
  const Json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <typename E>
E enum_from(const std::string& where, const std::string& value,
            std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, e] : options) {
    if (value == name) return e;
    names += names.empty() ? "" : ", ";
    names += name;
  }
  throw ConfigError(where + ": '" + value + "' is not one of " + names);
}

void merge(Json& base, const Json& patch) {
  if (!patch.is_object()) {
    base = patch;
    return;
  }
  if (!base.is_object()) base = Json::object();
  for (const auto& item : patch.items()) merge(base[item.key()], item.value());
}

const char* mapper_name(MapperMode m) { return m == MapperMode::kHashed ? "hashed" : "dictionary"; }

void read_thresholds(Reader& r, Thresholds& t) {
  r.get("z_hi", t.z_hi);
  r.get("z_lo", t.z_lo);
}

HdBaseConfig read_hd_base(const Json& j, const std::string& where) {
  HdBaseConfig c;
  Reader r(j, where);
  r.get_unsigned("dim", c.dim);
  r.get_unsigned("local_history_bits", c.local_history_bits);
  r.get_unsigned("table_entries", c.table_entries);
  r.get_unsigned("saturation_bits", c.saturation_bits);
  read_thresholds(r, c.thresholds);
  r.get("update_fraction", c.update_fraction);
  std::string mapper = mapper_name(c.mapper_mode);
  r.get("mapper", mapper);
  c.mapper_mode = enum_from<MapperMode>(r.where("mapper"), mapper,
                                        {{"hashed", MapperMode::kHashed},
                                         {"dictionary", MapperMode::kDictionary}});
  r.finish();
  validate(c);
  return c;
}

}  // namespace

std::string canonical_kind(const std::string& kind) {
  std::string k = kind;
  std::replace(k.begin(), k.end(), '_', '-');
  const auto& kinds = predictor_kinds();
  if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) {
    std::string names;
    for (const auto& n : kinds) names += (names.empty() ? "" : ", ") + n;
    throw ConfigError("unknown predictor '" + kind + "' (expected one of " + names + ")");
  }
  return k;
}

const std::vector<std::string>& predictor_kinds() {
  static const std::vector<std::string> kinds{
      "hypre-ideal", "hypre-realistic", "hd-base",      "bimodal",
      "gshare",      "perceptron",      "always-taken", "always-not-taken"};
  return kinds;
}

HypreConfig hypre_ideal_config() { return HypreConfig{}; }

HypreConfig hypre_realistic_config() {
  HypreConfig c;
  c.dims = {1024, 1024, 1024, 1024, 4096, 4096, 4096, 4096};
  c.use_nt_vectors = false;
  c.history_mode = HistoryMode::kOutcome;
  c.history_entry_bits = 1;
  c.noise_fraction = 0.02;
  c.subtract = SubtractMode::partial(0.5);
  return c;
}

Json to_json(const HdBaseConfig& c) {
  return Json{{"dim", c.dim},
              {"local_history_bits", c.local_history_bits},
              {"table_entries", c.table_entries},
              {"saturation_bits", c.saturation_bits},
              {"z_hi", c.thresholds.z_hi},
              {"z_lo", c.thresholds.z_lo},
              {"update_fraction", c.update_fraction},
              {"mapper", mapper_name(c.mapper_mode)}};
}

Json to_json(const HypreConfig& c) {
  const bool partial = c.subtract.kind == SubtractMode::Kind::kPartialRandomize;
  return Json{{"history_lengths", c.history_lengths},
              {"dims", c.dims},
              {"saturation_bits", c.saturation_bits},
              {"z_hi", c.thresholds.z_hi},
              {"z_lo", c.thresholds.z_lo},
              {"noise_fraction", c.noise_fraction},
              {"subtract", partial ? "partial" : "full"},
              {"subtract_fraction", c.subtract.fraction},
              {"use_nt_vectors", c.use_nt_vectors},
              {"history_mode", c.history_mode == HistoryMode::kPath ? "path" : "outcome"},
              {"selection", c.selection == SelectionPolicy::kLongestMatch ? "longest-match"
                                                                          : "confident-first"},
              {"history_ring_entries", c.history_ring_entries},
              {"history_entry_bits", c.history_entry_bits},
              {"base", to_json(c.base)}};
}

Json to_json(const BimodalConfig& c) {
  return Json{{"prediction_entries", c.prediction_entries},
              {"hysteresis_entries", c.hysteresis_entries}};
}

Json to_json(const GshareConfig& c) {
  return Json{{"entries", c.entries}, {"history_bits", c.history_bits}};
}

Json to_json(const PerceptronConfig& c) {
  return Json{{"entries", c.entries}, {"history_length", c.history_length}};
}

HdBaseConfig hd_base_config_from_json(const Json& j) { return read_hd_base(j, "config"); }

HypreConfig hypre_config_from_json(const Json& j) {
  HypreConfig c;
  Reader r(j, "config");
  r.get_sizes("history_lengths", c.history_lengths);
  r.get_sizes("dims", c.dims);
  r.get_unsigned("saturation_bits", c.saturation_bits);
  read_thresholds(r, c.thresholds);
  r.get("noise_fraction", c.noise_fraction);
  std::string subtract = "full";
  r.get("subtract", subtract);
  double fraction = c.subtract.fraction;
  r.get("subtract_fraction", fraction);
  c.subtract = enum_from<SubtractMode>(r.where("subtract"), subtract,
                                       {{"full", SubtractMode::full()},
                                        {"partial", SubtractMode::partial(fraction)}});
  c.subtract.fraction = fraction;
  r.get("use_nt_vectors", c.use_nt_vectors);
  std::string mode = "path";
  r.get("history_mode", mode);
  c.history_mode = enum_from<HistoryMode>(r.where("history_mode"), mode,
                                          {{"path", HistoryMode::kPath},
                                           {"outcome", HistoryMode::kOutcome}});
  std::string selection =
      c.selection == SelectionPolicy::kLongestMatch ? "longest-match" : "confident-first";
  r.get("selection", selection);
  c.selection = enum_from<SelectionPolicy>(r.where("selection"), selection,
                                           {{"longest-match", SelectionPolicy::kLongestMatch},
                                            {"confident-first", SelectionPolicy::kConfidentFirst}});
  r.get_unsigned("history_ring_entries", c.history_ring_entries);
  r.get_unsigned("history_entry_bits", c.history_entry_bits);
  if (const Json* base = r.child("base")) c.base = read_hd_base(*base, "config.base");
  r.finish();
  validate(c);
  return c;
}

BimodalConfig bimodal_config_from_json(const Json& j) {
  BimodalConfig c;
  Reader r(j, "config");
  r.get_unsigned("prediction_entries", c.prediction_entries);
  r.get_unsigned("hysteresis_entries", c.hysteresis_entries);
  r.finish();
  return c;
}

GshareConfig gshare_config_from_json(const Json& j) {
  GshareConfig c;
  Reader r(j, "config");
  r.get_unsigned("entries", c.entries);
  r.get_unsigned("history_bits", c.history_bits);
  r.finish();
  return c;
}

PerceptronConfig perceptron_config_from_json(const Json& j) {
  PerceptronConfig c;
  Reader r(j, "config");
  r.get_unsigned("entries", c.entries);
  r.get_unsigned("history_length", c.history_length);
  r.finish();
  return c;
}

Json preset_config(const std::string& kind) {
  const std::string k = canonical_kind(kind);
  if (k == "hypre-ideal") return to_json(hypre_ideal_config());
  if (k == "hypre-realistic") return to_json(hypre_realistic_config());
  if (k == "hd-base") return to_json(HdBaseConfig{});
  if (k == "bimodal") return to_json(BimodalConfig{});
  if (k == "gshare") return to_json(GshareConfig{});
  if (k == "perceptron") return to_json(PerceptronConfig{});
  return Json::object();
}

namespace {

Json parse_and_dump(const std::string& k, const Json& merged) {
  if (k == "hypre-ideal" || k == "hypre-realistic") return to_json(hypre_config_from_json(merged));
  if (k == "hd-base") return to_json(hd_base_config_from_json(merged));
  if (k == "bimodal") return to_json(bimodal_config_from_json(merged));
  if (k == "gshare") return to_json(gshare_config_from_json(merged));
  if (k == "perceptron") return to_json(perceptron_config_from_json(merged));
  Reader(merged, "config").finish();
  return Json::object();
}

}  // namespace

Json resolve_config(const std::string& kind, const Json& overrides) {
  const std::string k = canonical_kind(kind);
  Json merged = preset_config(k);
  if (!overrides.is_null()) {
    if (!overrides.is_object()) throw ConfigError("config: expected an object");
    merge(merged, overrides);
  }
  return parse_and_dump(k, merged);
}

std::unique_ptr<Predictor> make_predictor(const std::string& kind, const Json& overrides,
                                          std::uint64_t seed) {
  const std::string k = canonical_kind(kind);
  const Json c = resolve_config(k, overrides);
  if (k == "hypre-ideal" || k == "hypre-realistic") {
    return std::make_unique<HyprePredictor>(hypre_config_from_json(c), seed);
  }
  if (k == "hd-base") return std::make_unique<HdBasePredictor>(hd_base_config_from_json(c), seed);
  if (k == "bimodal") return std::make_unique<BimodalPredictor>(bimodal_config_from_json(c));
  if (k == "gshare") return std::make_unique<GsharePredictor>(gshare_config_from_json(c));
  if (k == "perceptron") {
    return std::make_unique<PerceptronPredictor>(perceptron_config_from_json(c));
  }
  return std::make_unique<StaticPredictor>(k == "always-taken");
}

}  // namespace hypre
