#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aclrisk/ahp.hpp"
#include "aclrisk/config.hpp"
#include "aclrisk/error.hpp"
#include "aclrisk/kinematics.hpp"
#include "aclrisk/preprocess.hpp"
#include "aclrisk/scoring.hpp"

namespace aclrisk {

// Item names in GradeVector order.
inline constexpr std::array<std::string_view, kIndexCount> kItemNames{"A1", "A2", "A3", "D1", "D2"};
// Trace names written by emit_traces.
inline constexpr std::array<std::string_view, 6> kTraceNames{"p1", "p2", "s1", "s2", "s3", "s4"};

struct TrialSource {
  std::string id;
  std::optional<std::filesystem::path> sagittal;
  std::optional<std::filesystem::path> frontal;
};

// Feature values; a view that was not assessed leaves its fields empty.
struct FeatureReport {
  std::optional<double> p1;
  std::optional<double> p2;
  std::optional<double> s4_peak;
  std::optional<double> d1;
  std::optional<double> d2;
  std::optional<double> mean_shoulder_width;

  friend bool operator==(const FeatureReport&, const FeatureReport&) = default;
};

struct WeightReport {
  std::string source;                 // WeightSource name
  std::vector<double> values;         // used for the total
  std::string matrix_method;          // sum | geometric | product
  std::vector<double> matrix_weights;
  std::vector<double> criterion_weights;
  bool hierarchical = false;

  friend bool operator==(const WeightReport&, const WeightReport&) = default;
};

struct AssessmentReport {
  std::string trial_id;
  int number = 1;
  std::optional<std::string> sagittal_source;
  std::optional<std::string> frontal_source;
  FeatureReport features;
  std::array<std::optional<Grade>, kIndexCount> grades{};
  WeightReport weights;
  ConsistencyReport consistency;
  ConsistencyReport criterion_consistency;
  // Omitted when only one view was assessed.
  std::optional<double> total;
  RunConfig config;
  std::optional<PreprocessStats> sagittal_preprocessing;
  std::optional<PreprocessStats> frontal_preprocessing;
  std::map<std::string, Trace> traces;
  std::map<std::string, std::string> trace_files;

  bool partial() const noexcept { return !total.has_value(); }
};

bool operator==(const ConsistencyReport& a, const ConsistencyReport& b);
bool operator==(const AssessmentReport& a, const AssessmentReport& b);

// Runs the pipeline on already loaded series; either view may be absent only
// when config.partial is set. Errors are rethrown as StageError.
AssessmentReport assess_series(const std::optional<KeypointSeries>& sagittal,
                               const std::optional<KeypointSeries>& frontal,
                               const RunConfig& config, std::string trial_id = "trial");

// Ingest, preprocess, extract, grade, weight and aggregate one trial.
AssessmentReport assess_trial(const TrialSource& source, const RunConfig& config);

std::string emit_report_json(const AssessmentReport& report);
std::string emit_report_csv(const AssessmentReport& report);
std::string emit_report(const AssessmentReport& report, ReportFormat format);
AssessmentReport parse_report_json(std::string_view text);

// Writes <name>.csv for every trace present and records the paths in the
// report. Throws IoFailure.
std::map<std::string, std::string> emit_traces(AssessmentReport& report,
                                               const std::filesystem::path& directory);

// One row of the per-subject summary table.
struct SummaryRow {
  int number = 0;
  std::array<std::optional<int>, kIndexCount> grades{};
  std::optional<double> total;
};

inline constexpr std::string_view kSummaryHeader = "number,x1,x2,x3,x4,x5,total";

SummaryRow summary_row(const AssessmentReport& report);
// Header plus one row per entry; totals printed with four decimals.
std::string format_summary_csv(std::span<const SummaryRow> rows);

// Totals for pre-graded subjects, numbered from 1.
std::vector<SummaryRow> score_grade_vectors(std::span<const GradeVector> grades,
                                            std::span<const double> weights);
// Numbers of rows whose total differs from `expected` by more than `tolerance`.
std::vector<int> mismatched_rows(std::span<const SummaryRow> rows, std::span<const double> expected,
                                 double tolerance);

struct BatchFailure {
  std::string trial_id;
  int number = 0;
  Stage stage = Stage::Ingest;
  std::string message;
};

struct BatchResult {
  std::vector<AssessmentReport> reports;
  std::vector<BatchFailure> failures;

  std::vector<SummaryRow> summary() const;
};

// Trials run concurrently on up to `max_threads` workers (0 = hardware
// concurrency). A failing trial is recorded and never aborts the batch.
BatchResult assess_batch(std::span<const TrialSource> trials, const RunConfig& config,
                         unsigned max_threads = 0);

}  // namespace aclrisk
