#include <doctest.h>

#include <cmath>
#include <random>

#include "aclrisk/assessment.hpp"
#include "aclrisk/error.hpp"
#include "aclrisk/ingest.hpp"
#include "aclrisk/motion_synth.hpp"
#include "test_support.hpp"

using namespace aclrisk;
using testsupport::error_code_of;
using testsupport::TempDir;
namespace fs = std::filesystem;

namespace {

MotionScript excellent_script() {
  MotionScript s;
  s.peak_knee_flexion_deg = 70.0;
  s.peak_hip_flexion_deg = 70.0;
  s.peak_lateral_lean_deg = 5.0;
  return s;
}

MotionScript poor_script() {
  MotionScript s;
  s.peak_knee_flexion_deg = 20.0;
  s.peak_hip_flexion_deg = 20.0;
  s.peak_lateral_lean_deg = 70.0;
  s.stance_ankle_width_px = 100.0;
  s.knee_offset_px = -60.0;       // knees 60 px wider than the ankles
  s.shoulder_width_px = 160.0;    // ankles 60 px narrower than the shoulders
  return s;
}

RunConfig table5_config() {
  RunConfig c;
  c.weight_source = WeightSource::Table5Compat;
  return c;
}

TrialSource write_trial(const fs::path& dir, const std::string& id, const MotionScript& script) {
  const auto trial = generate(script);
  fs::create_directories(dir);
  write_text_file(dir / (id + "_sagittal.csv"), format_series_csv(trial.sagittal));
  write_text_file(dir / (id + "_frontal.csv"), format_series_csv(trial.frontal));
  return {id, dir / (id + "_sagittal.csv"), dir / (id + "_frontal.csv")};
}

std::array<int, 5> grade_values(const AssessmentReport& r) {
  std::array<int, 5> out{};
  for (std::size_t i = 0; i < 5; ++i) out[i] = r.grades[i] ? value(*r.grades[i]) : 0;
  return out;
}

}  // namespace

TEST_CASE("excellent synthetic trial scores every item 9") {
  const auto t = generate(excellent_script());
  const auto r = assess_series(t.sagittal, t.frontal, table5_config());
  CHECK(grade_values(r) == std::array<int, 5>{9, 9, 9, 9, 9});
  REQUIRE(r.total.has_value());
  CHECK(std::abs(*r.total - 8.9766) <= 1e-3);
  CHECK_FALSE(r.partial());
}

TEST_CASE("poor synthetic trial scores every item 1") {
  const auto t = generate(poor_script());
  const auto r = assess_series(t.sagittal, t.frontal, table5_config());
  CHECK(grade_values(r) == std::array<int, 5>{1, 1, 1, 1, 1});
  CHECK(std::abs(*r.total - 0.9974) <= 1e-3);
}

TEST_CASE("missing frontal source is an ingest-stage error") {
  TempDir dir;
  auto src = write_trial(dir.path(), "t", excellent_script());
  src.frontal.reset();
  try {
    assess_trial(src, RunConfig{});
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Ingest);
  }
  src.frontal = dir / "does_not_exist.csv";
  try {
    assess_trial(src, RunConfig{});
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Ingest);
    CHECK(e.code() == ErrorCode::EmptySource);
  }
}

TEST_CASE("every error names exactly one stage") {
  const auto t = generate(excellent_script());

  RunConfig bad_config;
  bad_config.confidence_threshold = 2.0;
  try {
    assess_series(t.sagittal, t.frontal, bad_config);
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Config);
  }

  auto gappy = t.sagittal;
  for (std::size_t i = 10; i < 20; ++i) {
    gappy.frames[i].keypoints[body25::kRightKnee] = {};
    gappy.frames[i].missing[body25::kRightKnee] = true;
  }
  try {
    assess_series(gappy, t.frontal, RunConfig{});
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Preprocess);
    CHECK(e.code() == ErrorCode::GapTooLong);
  }

  auto degenerate = t.frontal;
  for (auto& f : degenerate.frames) f.keypoints[body25::kNeck] = f.keypoints[body25::kMidHip];
  try {
    assess_series(t.sagittal, degenerate, RunConfig{});
    FAIL("expected StageError");
  } catch (const StageError& e) {
    CHECK(e.stage() == Stage::Kinematics);
    CHECK(e.code() == ErrorCode::DegenerateVector);
    CHECK(std::string(e.what()).find("[kinematics]") != std::string::npos);
  }
}

TEST_CASE("inconsistent judgment matrix is refused unless forced") {
  const auto t = generate(excellent_script());
  RunConfig c;
  c.judgment_matrix = JudgmentMatrix::from_rows(testsupport::inconsistent_matrix_rows());
  try {
    assess_series(t.sagittal, t.frontal, c);
    FAIL("expected ConsistencyFailure");
  } catch (const StageError& e) {
    CHECK(e.code() == ErrorCode::ConsistencyFailure);
    CHECK(e.stage() == Stage::Weighting);
  }
  c.force = true;
  const auto r = assess_series(t.sagittal, t.frontal, c);
  CHECK_FALSE(r.consistency.pass);
  CHECK(r.total.has_value());
}

TEST_CASE("partial mode assesses one view and omits the total") {
  const auto t = generate(excellent_script());
  RunConfig c;
  c.partial = true;
  const auto r = assess_series(t.sagittal, std::nullopt, c);
  CHECK(r.partial());
  CHECK(r.grades[0].has_value());
  CHECK_FALSE(r.grades[2].has_value());
  CHECK(r.features.p1.has_value());
  CHECK_FALSE(r.features.d1.has_value());
  CHECK(r.traces.count("p1") == 1);
  CHECK(r.traces.count("s4") == 0);
  // Without partial the same call is an error.
  CHECK(error_code_of([&] { assess_series(t.sagittal, std::nullopt, RunConfig{}); }) == ErrorCode::EmptySource);
}

TEST_CASE("report json round trips to an equal report") {
  TempDir dir;
  auto src = write_trial(dir.path(), "rt", excellent_script());
  auto r = assess_trial(src, table5_config());
  emit_traces(r, dir / "traces");
  const auto text = emit_report_json(r);
  const auto back = parse_report_json(text);
  CHECK(back == r);
  CHECK(emit_report_json(back) == text);
}

TEST_CASE("partial report json round trips too") {
  const auto t = generate(poor_script());
  RunConfig c;
  c.partial = true;
  const auto r = assess_series(std::nullopt, t.frontal, c, "front-only");
  CHECK(parse_report_json(emit_report_json(r)) == r);
}

TEST_CASE("report json uses the stable field names") {
  const auto t = generate(excellent_script());
  const auto text = emit_report_json(assess_series(t.sagittal, t.frontal, RunConfig{}));
  for (const char* key : {"\"features\"", "\"grades\"", "\"labels\"", "\"weights\"", "\"consistency\"",
                          "\"total\"", "\"config\"", "\"preprocessing\"", "\"traces\""}) {
    CAPTURE(key);
    CHECK(text.find(key) != std::string::npos);
  }
  CHECK(text.find("\"excellent\"") != std::string::npos);
}

TEST_CASE("report total recomputes from its own grades and weights") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 20; ++i) {
    const auto t = generate(testsupport::random_script(rng));
    for (auto source : {WeightSource::SumMethod, WeightSource::Geometric, WeightSource::Table5Compat}) {
      RunConfig c;
      c.weight_source = source;
      const auto r = assess_series(t.sagittal, t.frontal, c);
      double total = 0.0;
      for (std::size_t k = 0; k < 5; ++k) total += r.weights.values[k] * value(*r.grades[k]);
      CHECK(std::abs(*r.total - total) <= 1e-9);
    }
  }
}

TEST_CASE("csv summary row matches the study table layout") {
  const auto t = generate(excellent_script());
  auto r = assess_series(t.sagittal, t.frontal, table5_config());
  r.number = 10;
  CHECK(emit_report_csv(r) == "number,x1,x2,x3,x4,x5,total\n10,9,9,9,9,9,8.9766\n");
  CHECK(emit_report(r, ReportFormat::CsvSummary) == emit_report_csv(r));
}

TEST_CASE("report without traces still emits a csv row") {
  AssessmentReport r;
  r.number = 3;
  CHECK(emit_report_csv(r) == "number,x1,x2,x3,x4,x5,total\n3,,,,,,\n");
}

TEST_CASE("traces: six files of one row per frame") {
  TempDir dir;
  MotionScript s = excellent_script();
  s.n_frames = 100;
  auto r = assess_series(generate(s).sagittal, generate(s).frontal, RunConfig{});
  const auto files = emit_traces(r, dir / "out");
  CHECK(files.size() == 6);
  for (auto name : kTraceNames) {
    const auto path = dir / "out" / (std::string(name) + ".csv");
    REQUIRE(fs::exists(path));
    const auto text = read_text_file(path);
    CHECK(text.rfind("frame,value\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 101);
  }
  CHECK(r.trace_files.size() == 6);
  AssessmentReport empty;
  CHECK(error_code_of([&] { emit_traces(empty, dir / "none"); }) == ErrorCode::IoFailure);
}

TEST_CASE("constant upright pose gives a constant -1 s4 trace") {
  const auto t = generate(MotionScript{});
  const auto r = assess_series(t.sagittal, t.frontal, RunConfig{});
  for (const auto& p : r.traces.at("s4")) CHECK(p.value == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("65 degree knee trial peaks between -0.5 and 0") {
  MotionScript s;
  s.peak_knee_flexion_deg = 65.0;
  s.peak_hip_flexion_deg = 70.0;
  const auto t = generate(s);
  const auto r = assess_series(t.sagittal, t.frontal, RunConfig{});
  double peak = -2.0;
  for (const auto& p : r.traces.at("p1")) peak = std::max(peak, p.value);
  CHECK(peak > -0.5);
  CHECK(peak < 0.0);
}

TEST_CASE("study table grade vectors: 29 of 30 totals reproduce, row 26 flagged") {
  std::vector<GradeVector> grades;
  std::vector<double> expected;
  for (const auto& row : testsupport::study_table()) {
    grades.push_back(testsupport::grades_of(row.grades));
    expected.push_back(row.total);
  }
  const auto rows = score_grade_vectors(grades, presets::table5_compat_weights());
  CHECK(rows.size() == 30);
  CHECK(mismatched_rows(rows, expected, 1e-3) == std::vector<int>{testsupport::kStudyTypoRow});
  const auto csv = format_summary_csv(rows);
  CHECK(csv.find("\n10,9,9,9,9,9,8.9766\n") != std::string::npos);
}

TEST_CASE("empty batch is an error") {
  CHECK(error_code_of([] { assess_batch({}, RunConfig{}); }) == ErrorCode::EmptySource);
}

TEST_CASE("one corrupt trial among three yields two reports and one failure") {
  TempDir dir;
  std::vector<TrialSource> trials{write_trial(dir.path(), "a", excellent_script()),
                                  write_trial(dir.path(), "b", poor_script()),
                                  write_trial(dir.path(), "c", excellent_script())};
  write_text_file(*trials[1].frontal, "frame,garbage\n1,2\n");
  const auto result = assess_batch(trials, table5_config(), 3);
  REQUIRE(result.reports.size() == 2);
  REQUIRE(result.failures.size() == 1);
  CHECK(result.failures[0].trial_id == "b");
  CHECK(result.failures[0].number == 2);
  CHECK(result.failures[0].stage == Stage::Ingest);
  CHECK(result.reports[0].number == 1);
  CHECK(result.reports[1].number == 3);
  const auto summary = result.summary();
  CHECK(summary.size() == 2);
  CHECK(summary[1].number == 3);
}

TEST_CASE("batch results do not depend on the thread count") {
  TempDir dir;
  std::mt19937_64 rng(12);
  std::vector<TrialSource> trials;
  for (int i = 0; i < 8; ++i) trials.push_back(write_trial(dir.path(), "t" + std::to_string(i), testsupport::random_script(rng)));
  const auto serial = assess_batch(trials, RunConfig{}, 1);
  const auto parallel = assess_batch(trials, RunConfig{}, 4);
  REQUIRE(serial.reports.size() == 8);
  REQUIRE(parallel.reports.size() == 8);
  for (std::size_t i = 0; i < 8; ++i) CHECK(emit_report_json(serial.reports[i]) == emit_report_json(parallel.reports[i]));
}

TEST_CASE("identical inputs produce byte-identical json") {
  TempDir dir;
  const auto src = write_trial(dir.path(), "d", excellent_script());
  CHECK(emit_report_json(assess_trial(src, RunConfig{})) == emit_report_json(assess_trial(src, RunConfig{})));
}

TEST_CASE("config snapshot reproduces the run") {
  TempDir dir;
  const auto src = write_trial(dir.path(), "snap", poor_script());
  RunConfig c;
  c.weight_source = WeightSource::Geometric;
  c.confidence_threshold = 0.5;
  const auto first = assess_trial(src, c);
  const auto replay_config = parse_run_config(format_run_config(first.config));
  CHECK(emit_report_json(assess_trial(src, replay_config)) == emit_report_json(first));
}

TEST_CASE("landing window uses the configured frame rate for csv input") {
  TempDir dir;
  MotionScript s = excellent_script();
  s.n_frames = 120;
  s.touchdown_frame = 40;
  const auto src = write_trial(dir.path(), "land", s);
  RunConfig c;
  c.window.mode = WindowMode::Landing;
  c.fps = 30.0;
  const auto r = assess_trial(src, c);
  CHECK(r.traces.at("p1").size() == 30);
  CHECK(std::abs(r.traces.at("p1").front().frame - 40) <= 2);
}
