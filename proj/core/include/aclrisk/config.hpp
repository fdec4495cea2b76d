#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aclrisk/ahp.hpp"
#include "aclrisk/ingest.hpp"
#include "aclrisk/kinematics.hpp"
#include "aclrisk/preprocess.hpp"
#include "aclrisk/scoring.hpp"

namespace aclrisk {

enum class WeightSource { SumMethod, Geometric, Product, Table5Compat, Explicit };

std::string_view to_string(WeightSource source);
std::optional<WeightSource> parse_weight_source(std::string_view text);

// Criterion layer. Its weights are always derived and reported; they only
// enter the total when `groups` assigns each of the five indices a criterion.
struct HierarchyConfig {
  JudgmentMatrix criterion_matrix = presets::criterion_matrix();
  std::vector<std::size_t> groups;  // zero-based criterion per index; empty = off

  bool enabled() const noexcept { return !groups.empty(); }
};

enum class ReportFormat { Json, CsvSummary };

std::string_view to_string(ReportFormat format);
std::optional<ReportFormat> parse_report_format(std::string_view text);

struct RunConfig {
  double confidence_threshold = kDefaultConfidenceThreshold;
  std::size_t max_gap = kDefaultMaxGap;
  PersonPolicy person_policy = PersonPolicy::HighestMeanConfidence;
  WindowOptions window;
  // Frame rate used when the input series does not carry one.
  std::optional<double> fps;
  Side side = Side::Right;
  double degeneracy_epsilon = kDefaultDegeneracyEpsilon;
  ThresholdConfig thresholds;
  WeightSource weight_source = WeightSource::SumMethod;
  std::vector<double> weights;  // only for WeightSource::Explicit
  JudgmentMatrix judgment_matrix = presets::index_matrix();
  HierarchyConfig hierarchy;
  // Proceed even when the judgment matrix fails the consistency check.
  bool force = false;
  // Assess a single view; the total is then omitted.
  bool partial = false;
  std::optional<std::string> report_path;
  std::optional<std::string> traces_dir;
  ReportFormat format = ReportFormat::Json;

  // Throws InvalidConfig / InvalidMatrix.
  void validate() const;

  PreprocessOptions preprocess_options(View view) const;
  KinematicsOptions kinematics_options() const;
};

// Overlays the keys present in a JSON config document on top of `base`.
// Matrix entries may be numbers or fraction strings such as "1/3".
RunConfig parse_run_config(std::string_view text, const RunConfig& base = {});
// Canonical JSON; parse_run_config(format_run_config(c)) reproduces c.
std::string format_run_config(const RunConfig& config);

// Matrix file: a JSON row list, a JSON object with "judgment_matrix", or
// plain text rows (see parse_matrix_text).
JudgmentMatrix parse_matrix_document(std::string_view text);

inline constexpr std::string_view kEnvPrefix = "ACLRISK_";

using EnvLookup = std::function<const char*(const char*)>;

// ACLRISK_<KEY> overrides for the scalar keys (CONFIDENCE_THRESHOLD, MAX_GAP,
// PERSON_POLICY, WINDOW, LANDING_DURATION_S, FPS, SIDE, WEIGHT_SOURCE, FORMAT).
void apply_env_overrides(RunConfig& config, const EnvLookup& lookup);
void apply_env_overrides(RunConfig& config);

struct ResolvedWeights {
  std::vector<double> weights;         // what the total is computed with
  WeightVector matrix_weights;         // derived from the judgment matrix
  WeightMethod matrix_method = WeightMethod::Sum;
  ConsistencyReport consistency;       // judgment matrix with matrix_weights
  WeightVector criterion_weights;
  ConsistencyReport criterion_consistency;
  bool hierarchical = false;
};

// Validates the configured matrices and derives the weight vector in use.
ResolvedWeights resolve_weights(const RunConfig& config);

}  // namespace aclrisk
