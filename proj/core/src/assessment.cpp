#include "aclrisk/assessment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "aclrisk/ingest.hpp"
#include "config_json.hpp"
#include "json.hpp"

namespace aclrisk {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class F>
auto staged(Stage stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(stage, e);
  } catch (const fs::filesystem_error& e) {
    throw StageError(stage, Error(ErrorCode::IoFailure, e.what()));
  }
}

}  // namespace

bool operator==(const ConsistencyReport& a, const ConsistencyReport& b) {
  return a.lambda_max == b.lambda_max && a.ci == b.ci && a.ri == b.ri && a.cr == b.cr &&
         a.pass == b.pass;
}

bool operator==(const AssessmentReport& a, const AssessmentReport& b) {
  return a.trial_id == b.trial_id && a.number == b.number &&
         a.sagittal_source == b.sagittal_source && a.frontal_source == b.frontal_source &&
         a.features == b.features && a.grades == b.grades && a.weights == b.weights &&
         a.consistency == b.consistency && a.criterion_consistency == b.criterion_consistency &&
         a.total == b.total && format_run_config(a.config) == format_run_config(b.config) &&
         a.sagittal_preprocessing == b.sagittal_preprocessing &&
         a.frontal_preprocessing == b.frontal_preprocessing && a.traces == b.traces &&
         a.trace_files == b.trace_files;
}

AssessmentReport assess_series(const std::optional<KeypointSeries>& sagittal,
                               const std::optional<KeypointSeries>& frontal,
                               const RunConfig& config, std::string trial_id) {
  AssessmentReport report;
  report.trial_id = std::move(trial_id);
  report.config = config;

  staged(Stage::Config, [&] { config.validate(); });
  if (!config.partial) {
    if (!sagittal) {
      throw StageError(Stage::Ingest, Error(ErrorCode::EmptySource, "sagittal source missing"));
    }
    if (!frontal) {
      throw StageError(Stage::Ingest, Error(ErrorCode::EmptySource, "frontal source missing"));
    }
  } else if (!sagittal && !frontal) {
    throw StageError(Stage::Ingest, Error(ErrorCode::EmptySource, "no view supplied"));
  }

  const auto weights = staged(Stage::Weighting, [&] {
    auto w = resolve_weights(config);
    if (!config.force) {
      if (!w.consistency.pass) {
        throw Error(ErrorCode::ConsistencyFailure,
                    "judgment matrix CR = " + std::to_string(w.consistency.cr) + " is not below 0.1");
      }
      if (w.hierarchical && !w.criterion_consistency.pass) {
        throw Error(ErrorCode::ConsistencyFailure, "criterion matrix CR = " +
                                                       std::to_string(w.criterion_consistency.cr) +
                                                       " is not below 0.1");
      }
    }
    return w;
  });
  report.weights.source = std::string(to_string(config.weight_source));
  report.weights.values = weights.weights;
  report.weights.matrix_method = std::string(to_string(weights.matrix_method));
  report.weights.matrix_weights = weights.matrix_weights.values;
  report.weights.criterion_weights = weights.criterion_weights.values;
  report.weights.hierarchical = weights.hierarchical;
  report.consistency = weights.consistency;
  report.criterion_consistency = weights.criterion_consistency;

  const auto kin = config.kinematics_options();
  auto with_fps = [&](KeypointSeries series) {
    if (!series.fps) series.fps = config.fps;
    return series;
  };
  if (sagittal) {
    const auto pre = staged(Stage::Preprocess, [&] {
      return preprocess(with_fps(*sagittal), config.preprocess_options(View::Sagittal));
    });
    report.sagittal_preprocessing = pre.stats;
    const auto features = staged(Stage::Kinematics, [&] { return extract_sagittal(pre.series, kin); });
    report.features.p1 = features.p1;
    report.features.p2 = features.p2;
    report.traces["p1"] = features.p1_trace;
    report.traces["p2"] = features.p2_trace;
    const auto g = staged(Stage::Scoring, [&] { return grade_sagittal(features, config.thresholds); });
    report.grades[0] = g[0];
    report.grades[1] = g[1];
  }
  if (frontal) {
    const auto pre = staged(Stage::Preprocess, [&] {
      return preprocess(with_fps(*frontal), config.preprocess_options(View::Frontal));
    });
    report.frontal_preprocessing = pre.stats;
    const auto features = staged(Stage::Kinematics, [&] { return extract_frontal(pre.series, kin); });
    report.features.s4_peak = features.s4_peak;
    report.features.d1 = features.d1;
    report.features.d2 = features.d2;
    report.features.mean_shoulder_width = features.mean_shoulder_width;
    report.traces["s1"] = features.s1_trace;
    report.traces["s2"] = features.s2_trace;
    report.traces["s3"] = features.s3_trace;
    report.traces["s4"] = features.s4_trace;
    const auto g = staged(Stage::Scoring, [&] { return grade_frontal(features, config.thresholds); });
    report.grades[2] = g[0];
    report.grades[3] = g[1];
    report.grades[4] = g[2];
  }

  if (sagittal && frontal) {
    GradeVector grades;
    for (std::size_t i = 0; i < kIndexCount; ++i) grades.items[i] = *report.grades[i];
    report.total = staged(Stage::Weighting, [&] { return aggregate(grades, report.weights.values); });
  }
  return report;
}

AssessmentReport assess_trial(const TrialSource& source, const RunConfig& config) {
  auto load = [&](const std::optional<fs::path>& path, View view) -> std::optional<KeypointSeries> {
    if (!path) return std::nullopt;
    return staged(Stage::Ingest, [&] { return load_series(*path, view, config.person_policy); });
  };
  const auto sagittal = load(source.sagittal, View::Sagittal);
  const auto frontal = load(source.frontal, View::Frontal);
  auto report = assess_series(sagittal, frontal, config, source.id.empty() ? "trial" : source.id);
  if (source.sagittal) report.sagittal_source = source.sagittal->string();
  if (source.frontal) report.frontal_source = source.frontal->string();
  return report;
}

namespace {

json optional_value(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json optional_text(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional_number(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

std::optional<std::string> read_optional_text(const json& v) {
  if (v.is_null()) return std::nullopt;
  return v.get<std::string>();
}

json consistency_json(const ConsistencyReport& c) {
  return {{"lambda_max", c.lambda_max}, {"ci", c.ci}, {"ri", c.ri}, {"cr", c.cr}, {"pass", c.pass}};
}

ConsistencyReport consistency_from(const json& j) {
  return {j.at("lambda_max").get<double>(), j.at("ci").get<double>(), j.at("ri").get<double>(),
          j.at("cr").get<double>(), j.at("pass").get<bool>()};
}

json stats_json(const std::optional<PreprocessStats>& s) {
  if (!s) return nullptr;
  return {{"input_frames", s->input_frames},
          {"output_frames", s->output_frames},
          {"frames_dropped_leading", s->frames_dropped_leading},
          {"frames_dropped_trailing", s->frames_dropped_trailing},
          {"frames_repaired", s->frames_repaired},
          {"keypoints_repaired", s->keypoints_repaired},
          {"keypoints_below_threshold", s->keypoints_below_threshold}};
}

std::optional<PreprocessStats> stats_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  PreprocessStats s;
  s.input_frames = j.at("input_frames").get<std::size_t>();
  s.output_frames = j.at("output_frames").get<std::size_t>();
  s.frames_dropped_leading = j.at("frames_dropped_leading").get<std::size_t>();
  s.frames_dropped_trailing = j.at("frames_dropped_trailing").get<std::size_t>();
  s.frames_repaired = j.at("frames_repaired").get<std::size_t>();
  s.keypoints_repaired = j.at("keypoints_repaired").get<std::size_t>();
  s.keypoints_below_threshold = j.at("keypoints_below_threshold").get<std::size_t>();
  return s;
}

json feature_json(const std::optional<double>& v, const char* unit) {
  return {{"value", optional_value(v)}, {"unit", unit}};
}

std::string format_total(double total) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", total);
  return buf;
}

}  // namespace

std::string emit_report_json(const AssessmentReport& r) {
  json doc;
  doc["trial"] = {{"id", r.trial_id},
                  {"number", r.number},
                  {"sagittal_source", optional_text(r.sagittal_source)},
                  {"frontal_source", optional_text(r.frontal_source)}};
  doc["features"] = {{"p1", feature_json(r.features.p1, "cosine")},
                     {"p2", feature_json(r.features.p2, "cosine")},
                     {"s4_peak", feature_json(r.features.s4_peak, "cosine")},
                     {"d1", feature_json(r.features.d1, "px")},
                     {"d2", feature_json(r.features.d2, "px")},
                     {"mean_shoulder_width", feature_json(r.features.mean_shoulder_width, "px")}};
  json grades = json::object();
  json labels = json::object();
  for (std::size_t i = 0; i < kIndexCount; ++i) {
    const std::string name(kItemNames[i]);
    if (r.grades[i]) {
      grades[name] = value(*r.grades[i]);
      labels[name] = to_string(grade_label(*r.grades[i]));
    } else {
      grades[name] = nullptr;
      labels[name] = nullptr;
    }
  }
  doc["grades"] = grades;
  doc["labels"] = labels;
  doc["weights"] = {{"source", r.weights.source},
                    {"values", r.weights.values},
                    {"matrix_method", r.weights.matrix_method},
                    {"matrix_weights", r.weights.matrix_weights},
                    {"criterion_weights", r.weights.criterion_weights},
                    {"hierarchical", r.weights.hierarchical}};
  doc["consistency"] = {{"index", consistency_json(r.consistency)},
                        {"criterion", consistency_json(r.criterion_consistency)}};
  doc["total"] = optional_value(r.total);
  doc["config"] = detail::config_to_json(r.config);
  doc["preprocessing"] = {{"sagittal", stats_json(r.sagittal_preprocessing)},
                          {"frontal", stats_json(r.frontal_preprocessing)}};
  json series = json::object();
  for (const auto& [name, trace] : r.traces) {
    json points = json::array();
    for (const auto& p : trace) points.push_back(json::array({p.frame, p.value}));
    series[name] = std::move(points);
  }
  doc["traces"] = {{"files", r.trace_files}, {"series", series}};
  return doc.dump(2) + "\n";
}

AssessmentReport parse_report_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("report is not valid JSON: ") + e.what());
  }
  try {
    AssessmentReport r;
    const auto& trial = doc.at("trial");
    r.trial_id = trial.at("id").get<std::string>();
    r.number = trial.at("number").get<int>();
    r.sagittal_source = read_optional_text(trial.at("sagittal_source"));
    r.frontal_source = read_optional_text(trial.at("frontal_source"));

    const auto& f = doc.at("features");
    r.features.p1 = read_optional_number(f.at("p1").at("value"));
    r.features.p2 = read_optional_number(f.at("p2").at("value"));
    r.features.s4_peak = read_optional_number(f.at("s4_peak").at("value"));
    r.features.d1 = read_optional_number(f.at("d1").at("value"));
    r.features.d2 = read_optional_number(f.at("d2").at("value"));
    r.features.mean_shoulder_width = read_optional_number(f.at("mean_shoulder_width").at("value"));

    for (std::size_t i = 0; i < kIndexCount; ++i) {
      const auto& g = doc.at("grades").at(std::string(kItemNames[i]));
      if (!g.is_null()) r.grades[i] = grade_from_int(g.get<int>());
    }
    const auto& w = doc.at("weights");
    r.weights.source = w.at("source").get<std::string>();
    r.weights.values = w.at("values").get<std::vector<double>>();
    r.weights.matrix_method = w.at("matrix_method").get<std::string>();
    r.weights.matrix_weights = w.at("matrix_weights").get<std::vector<double>>();
    r.weights.criterion_weights = w.at("criterion_weights").get<std::vector<double>>();
    r.weights.hierarchical = w.at("hierarchical").get<bool>();
    r.consistency = consistency_from(doc.at("consistency").at("index"));
    r.criterion_consistency = consistency_from(doc.at("consistency").at("criterion"));
    r.total = read_optional_number(doc.at("total"));
    r.config = detail::config_from_json(doc.at("config"), RunConfig{});
    r.sagittal_preprocessing = stats_from(doc.at("preprocessing").at("sagittal"));
    r.frontal_preprocessing = stats_from(doc.at("preprocessing").at("frontal"));
    r.trace_files = doc.at("traces").at("files").get<std::map<std::string, std::string>>();
    for (const auto& [name, points] : doc.at("traces").at("series").items()) {
      Trace trace;
      for (const auto& p : points) trace.push_back({p.at(0).get<long>(), p.at(1).get<double>()});
      r.traces[name] = std::move(trace);
    }
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("report schema violation: ") + e.what());
  }
}

SummaryRow summary_row(const AssessmentReport& report) {
  SummaryRow row;
  row.number = report.number;
  for (std::size_t i = 0; i < kIndexCount; ++i) {
    if (report.grades[i]) row.grades[i] = value(*report.grades[i]);
  }
  row.total = report.total;
  return row;
}

std::string format_summary_csv(std::span<const SummaryRow> rows) {
  std::string out(kSummaryHeader);
  out += '\n';
  for (const auto& row : rows) {
    out += std::to_string(row.number);
    for (const auto& g : row.grades) {
      out += ',';
      if (g) out += std::to_string(*g);
    }
    out += ',';
    if (row.total) out += format_total(*row.total);
    out += '\n';
  }
  return out;
}

std::string emit_report_csv(const AssessmentReport& report) {
  const SummaryRow row = summary_row(report);
  return format_summary_csv(std::span<const SummaryRow>(&row, 1));
}

std::string emit_report(const AssessmentReport& report, ReportFormat format) {
  return format == ReportFormat::Json ? emit_report_json(report) : emit_report_csv(report);
}

std::map<std::string, std::string> emit_traces(AssessmentReport& report, const fs::path& directory) {
  if (report.traces.empty()) throw Error(ErrorCode::IoFailure, "report carries no traces");
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + directory.string() + ": " + ec.message());
  std::map<std::string, std::string> written;
  for (const auto& [name, trace] : report.traces) {
    const auto path = directory / (name + ".csv");
    write_text_file(path, format_trace_csv(trace));
    written[name] = path.string();
  }
  report.trace_files = written;
  return written;
}

std::vector<SummaryRow> score_grade_vectors(std::span<const GradeVector> grades,
                                            std::span<const double> weights) {
  std::vector<SummaryRow> rows;
  rows.reserve(grades.size());
  int number = 1;
  for (const auto& g : grades) {
    SummaryRow row;
    row.number = number++;
    for (std::size_t i = 0; i < kIndexCount; ++i) row.grades[i] = value(g[i]);
    row.total = aggregate(g, weights);
    rows.push_back(row);
  }
  return rows;
}

std::vector<int> mismatched_rows(std::span<const SummaryRow> rows, std::span<const double> expected,
                                 double tolerance) {
  if (rows.size() != expected.size()) {
    throw Error(ErrorCode::OrderMismatch, "row count differs from expected totals");
  }
  std::vector<int> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].total || std::abs(*rows[i].total - expected[i]) > tolerance) {
      out.push_back(rows[i].number);
    }
  }
  return out;
}

std::vector<SummaryRow> BatchResult::summary() const {
  std::vector<SummaryRow> rows;
  rows.reserve(reports.size());
  for (const auto& r : reports) rows.push_back(summary_row(r));
  return rows;
}

BatchResult assess_batch(std::span<const TrialSource> trials, const RunConfig& config,
                         unsigned max_threads) {
  if (trials.empty()) throw Error(ErrorCode::EmptySource, "batch has no trials");

  std::vector<std::optional<AssessmentReport>> reports(trials.size());
  std::vector<std::optional<BatchFailure>> failures(trials.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < trials.size(); i = next++) {
      const int number = static_cast<int>(i) + 1;
      try {
        auto report = assess_trial(trials[i], config);
        report.number = number;
        reports[i] = std::move(report);
      } catch (const StageError& e) {
        failures[i] = BatchFailure{trials[i].id, number, e.stage(), e.what()};
      } catch (const std::exception& e) {
        failures[i] = BatchFailure{trials[i].id, number, Stage::Ingest, e.what()};
      }
    }
  };

  unsigned threads = max_threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : max_threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(trials.size()));
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();

  BatchResult result;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (reports[i]) result.reports.push_back(std::move(*reports[i]));
    if (failures[i]) result.failures.push_back(std::move(*failures[i]));
  }
  return result;
}

}  // namespace aclrisk
