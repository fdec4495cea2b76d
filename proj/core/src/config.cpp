#include "aclrisk/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <set>

#include "aclrisk/error.hpp"
#include "config_json.hpp"
#include "text_util.hpp"

namespace aclrisk {

using nlohmann::json;

std::string_view to_string(WeightSource source) {
  switch (source) {
    case WeightSource::SumMethod: return "sum-method";
    case WeightSource::Geometric: return "geometric";
    case WeightSource::Product: return "product";
    case WeightSource::Table5Compat: return "table5-compat";
    case WeightSource::Explicit: return "explicit";
  }
  return "sum-method";
}

std::optional<WeightSource> parse_weight_source(std::string_view text) {
  if (text == "sum-method" || text == "sum") return WeightSource::SumMethod;
  if (text == "geometric") return WeightSource::Geometric;
  if (text == "product") return WeightSource::Product;
  if (text == "table5-compat") return WeightSource::Table5Compat;
  if (text == "explicit") return WeightSource::Explicit;
  return std::nullopt;
}

std::string_view to_string(ReportFormat format) {
  return format == ReportFormat::Json ? "json" : "csv";
}

std::optional<ReportFormat> parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "csv" || text == "csv-summary") return ReportFormat::CsvSummary;
  return std::nullopt;
}

void RunConfig::validate() const {
  if (!(confidence_threshold >= 0.0 && confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "confidence_threshold must lie in [0,1]");
  }
  if (!(window.landing_duration_s > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "landing_duration_s must be positive");
  }
  if (fps && !(*fps > 0.0)) throw Error(ErrorCode::InvalidConfig, "fps must be positive");
  if (!(degeneracy_epsilon > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "degeneracy_epsilon must be positive");
  }
  thresholds.validate();
  require_valid(judgment_matrix);
  if (judgment_matrix.order() != kIndexCount) {
    throw Error(ErrorCode::InvalidConfig, "judgment_matrix must be 5x5 (one row per scoring item)");
  }
  if (weight_source == WeightSource::Explicit) {
    if (weights.size() != kIndexCount) {
      throw Error(ErrorCode::InvalidConfig, "explicit weights must have exactly 5 entries");
    }
    for (double w : weights) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::InvalidConfig, "explicit weights must be nonnegative");
      }
    }
  }
  require_valid(hierarchy.criterion_matrix);
  if (hierarchy.enabled()) {
    if (hierarchy.groups.size() != kIndexCount) {
      throw Error(ErrorCode::InvalidConfig, "hierarchy.groups must assign all 5 indices");
    }
    for (auto g : hierarchy.groups) {
      if (g >= hierarchy.criterion_matrix.order()) {
        throw Error(ErrorCode::InvalidConfig, "hierarchy.groups names an unknown criterion");
      }
    }
  }
}

PreprocessOptions RunConfig::preprocess_options(View view) const {
  PreprocessOptions opts;
  opts.confidence_threshold = confidence_threshold;
  opts.max_gap = max_gap;
  opts.required = required_keypoints(view, side);
  return opts;
}

KinematicsOptions RunConfig::kinematics_options() const {
  KinematicsOptions opts;
  opts.window = window;
  opts.side = side;
  opts.epsilon = degeneracy_epsilon;
  return opts;
}

namespace detail {

namespace {

double number_or_ratio(const json& v, std::string_view key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_ratio(v.get<std::string>());
    } catch (const Error&) {
    }
  }
  throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a number or fraction");
}

std::string text(const json& v, std::string_view key) {
  if (!v.is_string()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::size_t count(const json& v, std::string_view key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

bool flag(const json& v, std::string_view key) {
  if (!v.is_boolean()) throw Error(ErrorCode::InvalidConfig, std::string(key) + " must be a boolean");
  return v.get<bool>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) {
      throw Error(ErrorCode::InvalidConfig, "unknown key \"" + key + "\" in " + std::string(where));
    }
  }
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json optional_text(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

json matrix_to_json(const JudgmentMatrix& matrix) {
  json rows = json::array();
  for (const auto& row : matrix.rows()) rows.push_back(row);
  return rows;
}

JudgmentMatrix matrix_from_json(const json& rows) {
  if (!rows.is_array()) throw Error(ErrorCode::InvalidMatrix, "matrix must be a list of rows");
  std::vector<std::vector<double>> values;
  for (const auto& row : rows) {
    if (!row.is_array()) throw Error(ErrorCode::InvalidMatrix, "matrix row must be a list");
    std::vector<double> r;
    for (const auto& cell : row) {
      if (cell.is_number()) {
        r.push_back(cell.get<double>());
      } else if (cell.is_string()) {
        r.push_back(parse_ratio(cell.get<std::string>()));
      } else {
        throw Error(ErrorCode::InvalidMatrix, "matrix entries must be numbers or fractions");
      }
    }
    values.push_back(std::move(r));
  }
  if (values.empty()) throw Error(ErrorCode::InvalidMatrix, "matrix has no rows");
  return JudgmentMatrix::from_rows(values);
}

json config_to_json(const RunConfig& c) {
  json doc;
  doc["confidence_threshold"] = c.confidence_threshold;
  doc["max_gap"] = c.max_gap;
  doc["person_policy"] = to_string(c.person_policy);
  doc["window"] = to_string(c.window.mode);
  doc["landing_duration_s"] = c.window.landing_duration_s;
  doc["touchdown_velocity_px"] = c.window.touchdown_velocity_px;
  doc["fps"] = optional_number(c.fps);
  doc["side"] = to_string(c.side);
  doc["degeneracy_epsilon"] = c.degeneracy_epsilon;
  doc["thresholds"] = {
      {"cosine_hi", c.thresholds.cosine_hi},
      {"cosine_lo", c.thresholds.cosine_lo},
      {"distance_lo", c.thresholds.distance_lo},
      {"distance_hi", c.thresholds.distance_hi},
      {"normalize_distances", c.thresholds.normalize_distances},
      {"normalized_distance_lo", optional_number(c.thresholds.normalized_distance_lo)},
      {"normalized_distance_hi", optional_number(c.thresholds.normalized_distance_hi)},
  };
  doc["weight_source"] = to_string(c.weight_source);
  doc["weights"] = c.weights;
  doc["judgment_matrix"] = matrix_to_json(c.judgment_matrix);
  doc["hierarchy"] = {{"criterion_matrix", matrix_to_json(c.hierarchy.criterion_matrix)},
                      {"groups", c.hierarchy.groups}};
  doc["force"] = c.force;
  doc["partial"] = c.partial;
  doc["report"] = optional_text(c.report_path);
  doc["traces"] = optional_text(c.traces_dir);
  doc["format"] = to_string(c.format);
  return doc;
}

RunConfig config_from_json(const json& doc, const RunConfig& base) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a JSON object");
  reject_unknown(doc,
                 {"confidence_threshold", "max_gap", "person_policy", "window", "landing_duration_s",
                  "touchdown_velocity_px", "fps", "side", "degeneracy_epsilon", "thresholds",
                  "weight_source", "weights", "judgment_matrix", "hierarchy", "force", "partial", "report",
                  "traces", "format"},
                 "config");
  RunConfig c = base;
  auto has = [&](const char* key) { return doc.contains(key); };

  if (has("confidence_threshold"))
    c.confidence_threshold = number_or_ratio(doc["confidence_threshold"], "confidence_threshold");
  if (has("max_gap")) c.max_gap = count(doc["max_gap"], "max_gap");
  if (has("person_policy")) {
    const auto p = parse_person_policy(text(doc["person_policy"], "person_policy"));
    if (!p) throw Error(ErrorCode::InvalidConfig, "person_policy must be highest-mean-confidence or strict");
    c.person_policy = *p;
  }
  if (has("window")) {
    const auto w = parse_window_mode(text(doc["window"], "window"));
    if (!w) throw Error(ErrorCode::InvalidConfig, "window must be full or landing");
    c.window.mode = *w;
  }
  if (has("landing_duration_s"))
    c.window.landing_duration_s = number_or_ratio(doc["landing_duration_s"], "landing_duration_s");
  if (has("touchdown_velocity_px"))
    c.window.touchdown_velocity_px = number_or_ratio(doc["touchdown_velocity_px"], "touchdown_velocity_px");
  if (has("fps")) {
    c.fps = doc["fps"].is_null() ? std::nullopt : std::optional(number_or_ratio(doc["fps"], "fps"));
  }
  if (has("side")) {
    const auto s = parse_side(text(doc["side"], "side"));
    if (!s) throw Error(ErrorCode::InvalidConfig, "side must be right or left");
    c.side = *s;
  }
  if (has("degeneracy_epsilon"))
    c.degeneracy_epsilon = number_or_ratio(doc["degeneracy_epsilon"], "degeneracy_epsilon");
  if (has("thresholds")) {
    const auto& t = doc["thresholds"];
    if (!t.is_object()) throw Error(ErrorCode::InvalidConfig, "thresholds must be an object");
    reject_unknown(t,
                   {"cosine_hi", "cosine_lo", "distance_lo", "distance_hi", "normalize_distances",
                    "normalized_distance_lo", "normalized_distance_hi"},
                   "thresholds");
    auto& th = c.thresholds;
    if (t.contains("cosine_hi")) th.cosine_hi = number_or_ratio(t["cosine_hi"], "cosine_hi");
    if (t.contains("cosine_lo")) th.cosine_lo = number_or_ratio(t["cosine_lo"], "cosine_lo");
    if (t.contains("distance_lo")) th.distance_lo = number_or_ratio(t["distance_lo"], "distance_lo");
    if (t.contains("distance_hi")) th.distance_hi = number_or_ratio(t["distance_hi"], "distance_hi");
    if (t.contains("normalize_distances"))
      th.normalize_distances = flag(t["normalize_distances"], "normalize_distances");
    for (const char* key : {"normalized_distance_lo", "normalized_distance_hi"}) {
      if (!t.contains(key)) continue;
      auto& slot = std::string_view(key) == "normalized_distance_lo" ? th.normalized_distance_lo
                                                                     : th.normalized_distance_hi;
      if (t[key].is_null()) {
        slot.reset();
      } else {
        slot = number_or_ratio(t[key], key);
      }
    }
  }
  if (has("weight_source")) {
    const auto s = parse_weight_source(text(doc["weight_source"], "weight_source"));
    if (!s) {
      throw Error(ErrorCode::InvalidConfig,
                  "weight_source must be sum-method, geometric, product, table5-compat or explicit");
    }
    c.weight_source = *s;
  }
  if (has("weights")) {
    if (!doc["weights"].is_array()) throw Error(ErrorCode::InvalidConfig, "weights must be a list");
    c.weights.clear();
    for (const auto& w : doc["weights"]) c.weights.push_back(number_or_ratio(w, "weights"));
  }
  if (has("judgment_matrix")) c.judgment_matrix = matrix_from_json(doc["judgment_matrix"]);
  if (has("hierarchy")) {
    const auto& h = doc["hierarchy"];
    if (!h.is_object()) throw Error(ErrorCode::InvalidConfig, "hierarchy must be an object");
    reject_unknown(h, {"criterion_matrix", "groups"}, "hierarchy");
    if (h.contains("criterion_matrix"))
      c.hierarchy.criterion_matrix = matrix_from_json(h["criterion_matrix"]);
    if (h.contains("groups")) {
      if (!h["groups"].is_array()) throw Error(ErrorCode::InvalidConfig, "hierarchy.groups must be a list");
      c.hierarchy.groups.clear();
      for (const auto& g : h["groups"]) c.hierarchy.groups.push_back(count(g, "hierarchy.groups"));
    }
  }
  if (has("force")) c.force = flag(doc["force"], "force");
  if (has("partial")) c.partial = flag(doc["partial"], "partial");
  if (has("report"))
    c.report_path = doc["report"].is_null() ? std::nullopt : std::optional(text(doc["report"], "report"));
  if (has("traces"))
    c.traces_dir = doc["traces"].is_null() ? std::nullopt : std::optional(text(doc["traces"], "traces"));
  if (has("format")) {
    const auto f = parse_report_format(text(doc["format"], "format"));
    if (!f) throw Error(ErrorCode::InvalidConfig, "format must be json or csv");
    c.format = *f;
  }
  return c;
}

}  // namespace detail

RunConfig parse_run_config(std::string_view text, const RunConfig& base) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  return detail::config_from_json(doc, base);
}

JudgmentMatrix parse_matrix_document(std::string_view text) {
  const auto body = detail::trim(text);
  if (body.empty() || (body.front() != '[' && body.front() != '{')) return parse_matrix_text(text);
  json doc;
  try {
    doc = json::parse(body.begin(), body.end(), nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidMatrix, std::string("matrix is not valid JSON: ") + e.what());
  }
  if (doc.is_object()) {
    if (!doc.contains("judgment_matrix")) {
      throw Error(ErrorCode::InvalidMatrix, "JSON matrix document has no judgment_matrix key");
    }
    return detail::matrix_from_json(doc["judgment_matrix"]);
  }
  return detail::matrix_from_json(doc);
}

std::string format_run_config(const RunConfig& config) {
  return detail::config_to_json(config).dump(2) + "\n";
}

void apply_env_overrides(RunConfig& config, const EnvLookup& lookup) {
  json overrides = json::object();
  auto key_for = [](std::string_view key) {
    std::string name(kEnvPrefix);
    for (char ch : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return name;
  };
  for (const char* key : {"confidence_threshold", "landing_duration_s", "fps"}) {
    if (const char* v = lookup(key_for(key).c_str())) {
      const auto d = detail::parse_double(v);
      if (!d) throw Error(ErrorCode::InvalidConfig, key_for(key) + " is not a number");
      overrides[key] = *d;
    }
  }
  if (const char* v = lookup(key_for("max_gap").c_str())) {
    const auto n = detail::parse_long(v);
    if (!n || *n < 0) throw Error(ErrorCode::InvalidConfig, key_for("max_gap") + " is not a count");
    overrides["max_gap"] = *n;
  }
  for (const char* key : {"person_policy", "window", "side", "weight_source", "format"}) {
    if (const char* v = lookup(key_for(key).c_str())) overrides[key] = std::string(v);
  }
  if (!overrides.empty()) config = detail::config_from_json(overrides, config);
}

void apply_env_overrides(RunConfig& config) {
  apply_env_overrides(config, [](const char* name) { return std::getenv(name); });
}

ResolvedWeights resolve_weights(const RunConfig& config) {
  config.validate();
  ResolvedWeights out;
  switch (config.weight_source) {
    case WeightSource::Geometric: out.matrix_method = WeightMethod::Geometric; break;
    case WeightSource::Product: out.matrix_method = WeightMethod::Product; break;
    default: out.matrix_method = WeightMethod::Sum; break;
  }
  out.matrix_weights = derive_weights(config.judgment_matrix, out.matrix_method);
  out.consistency = consistency(config.judgment_matrix, out.matrix_weights);

  switch (config.weight_source) {
    case WeightSource::Table5Compat: out.weights = presets::table5_compat_weights(); break;
    case WeightSource::Explicit: out.weights = config.weights; break;
    default: out.weights = out.matrix_weights.values; break;
  }

  out.criterion_weights = weights_sum_method(config.hierarchy.criterion_matrix);
  out.criterion_consistency = consistency(config.hierarchy.criterion_matrix, out.criterion_weights);
  if (config.hierarchy.enabled()) {
    out.hierarchical = true;
    out.weights = hierarchical_weights(out.weights, out.criterion_weights.values,
                                       config.hierarchy.groups);
  }
  return out;
}

}  // namespace aclrisk
