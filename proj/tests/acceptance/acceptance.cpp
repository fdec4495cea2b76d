// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "aclrisk/ahp.hpp"
#include "aclrisk/assessment.hpp"
#include "aclrisk/error.hpp"
#include "aclrisk/ingest.hpp"
#include "aclrisk/kinematics.hpp"
#include "aclrisk/motion_synth.hpp"
#include "aclrisk/preprocess.hpp"
#include "aclrisk/scoring.hpp"
#include "cli.hpp"
#include "test_support.hpp"

using namespace aclrisk;
namespace ts = testsupport;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Collects the reasons a criterion failed.
struct Check {
  std::vector<std::string> failures;
  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream os;
      os.precision(10);
      os << what << ": got " << got << ", want " << want << " +- " << tol;
      failures.push_back(os.str());
    }
  }
};

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

int report(int number, const std::string& title, const Check& c, const std::string& detail) {
  const bool ok = c.failures.empty();
  std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", number, title.c_str(), detail.c_str());
  for (const auto& f : c.failures) std::printf("    - %s\n", f.c_str());
  return ok ? 0 : 1;
}

int run_cli(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "aclrisk");
  std::ostringstream o, e;
  const int code = cli::run(args, o, e);
  if (out) *out = o.str();
  return code;
}

int criterion_1() {
  Check c;
  ts::TempDir dir;
  write_text_file(dir / "index.txt",
                  "1 2 3 5 5\n1/2 1 2 3 4\n1/3 1/2 1 3 2\n1/5 1/3 1/3 1 2\n1/5 1/4 1/2 1/2 1\n");

  const auto start = Clock::now();
  const auto matrix = parse_matrix_document(read_text_file(dir / "index.txt"));
  const auto w = weights_sum_method(matrix);
  const auto cons = consistency(matrix, w);
  const double ms = elapsed_ms(start);

  const std::array<double, 5> expected{0.4267, 0.2574, 0.1602, 0.0886, 0.0671};
  for (std::size_t i = 0; i < 5; ++i) c.near(w[i], expected[i], 5e-4, "w" + std::to_string(i + 1));
  c.near(cons.lambda_max, 5.126, 5e-3, "lambda_max");
  c.near(cons.ci, 0.031, 1e-3, "CI");
  c.near(cons.cr, 0.028, 1e-3, "CR");
  c.expect(cons.pass, "consistency check should pass");
  c.expect(ms < 10.0, "runtime " + std::to_string(ms) + " ms");

  std::string out;
  const int code = run_cli({"ahp", "--matrix", (dir / "index.txt").string()}, &out);
  c.expect(code == 0, "ahp command exit code " + std::to_string(code));
  c.expect(out.find("weights: 0.4267 0.2574 0.1602 0.0886 0.0671") != std::string::npos, "ahp command weights line");
  c.expect(out.find("consistency: pass") != std::string::npos, "ahp command verdict");

  char detail[160];
  std::snprintf(detail, sizeof detail, "lambda_max=%.4f CI=%.4f CR=%.4f, %.3f ms", cons.lambda_max, cons.ci, cons.cr, ms);
  return report(1, "AHP weights and consistency of the five-index matrix", c, detail);
}

int criterion_2() {
  Check c;
  const auto m = JudgmentMatrix::from_rows({{1, 3}, {1.0 / 3.0, 1}});
  const auto w = weights_sum_method(m);
  const auto cons = consistency(m, w);
  std::vector<double> sorted = w.values;
  std::sort(sorted.begin(), sorted.end());
  c.near(cons.lambda_max, 2.0, 1e-9, "lambda_max");
  c.near(cons.ci, 0.0, 1e-9, "CI");
  c.expect(cons.cr == 0.0, "CR must be exactly 0 for n = 2");
  c.expect(cons.pass, "consistency check should pass");
  c.near(sorted[0], 0.25, 1e-9, "smaller weight");
  c.near(sorted[1], 0.75, 1e-9, "larger weight");
  char detail[120];
  std::snprintf(detail, sizeof detail, "weights as computed (%.4f, %.4f)", w[0], w[1]);
  return report(2, "AHP 2x2 criterion matrix", c, detail);
}

int criterion_3() {
  Check c;
  std::vector<GradeVector> grades;
  std::vector<double> printed;
  for (const auto& row : ts::study_table()) {
    grades.push_back(ts::grades_of(row.grades));
    printed.push_back(row.total);
  }
  const auto start = Clock::now();
  const auto rows = score_grade_vectors(grades, presets::table5_compat_weights());
  const auto mismatched = mismatched_rows(rows, printed, 1e-3);
  const double ms = elapsed_ms(start);

  c.expect(rows.size() == 30, "30 rows");
  c.expect(mismatched == std::vector<int>{ts::kStudyTypoRow},
           "only row 26 may mismatch; mismatches: " + std::to_string(mismatched.size()));
  c.expect(ms < 10.0, "runtime " + std::to_string(ms) + " ms");
  char detail[120];
  std::snprintf(detail, sizeof detail, "%zu/30 totals within 1e-3, row 26 excepted, %.3f ms",
                rows.size() - mismatched.size(), ms);
  return report(3, "per-subject totals reproduce with table5-compat weights", c, detail);
}

int criterion_4() {
  Check c;
  const double r3 = std::sqrt(3.0) / 2.0;
  c.expect(grade_cosine_sagittal(-0.5) == Grade::Good, "p = -1/2 -> 5");
  c.expect(grade_cosine_sagittal(-r3) == Grade::Poor, "p = -sqrt3/2 -> 1");
  c.expect(grade_distance(30.0) == Grade::Good, "d = 30 -> 5");
  c.expect(grade_distance(50.0) == Grade::Poor, "d = 50 -> 1");
  c.expect(grade_cosine_frontal(-r3) == Grade::Excellent, "s4 = -sqrt3/2 -> 9");
  c.expect(grade_cosine_frontal(-0.5) == Grade::Good, "s4 = -1/2 -> 5");
  c.expect(grade_cosine_sagittal(std::nextafter(-0.5, 1.0)) == Grade::Excellent, "p just above -1/2 -> 9");
  c.expect(grade_cosine_frontal(std::nextafter(-0.5, 1.0)) == Grade::Poor, "s4 just above -1/2 -> 1");

  constexpr int kPoints = 10000;
  int prev_s = 0, prev_f = 10, prev_d = 10;
  bool total = true, monotone = true;
  for (int i = 0; i <= kPoints; ++i) {
    const double p = -1.0 + 2.0 * i / kPoints;
    const double d = 200.0 * i / kPoints;
    int gs = 0, gf = 0, gd = 0;
    try {
      gs = value(grade_cosine_sagittal(p));
      gf = value(grade_cosine_frontal(p));
      gd = value(grade_distance(d));
    } catch (const Error&) {
      total = false;
      continue;
    }
    for (int g : {gs, gf, gd}) total = total && (g == 1 || g == 5 || g == 9);
    monotone = monotone && gs >= prev_s && gf <= prev_f && gd <= prev_d;
    prev_s = gs;
    prev_f = gf;
    prev_d = gd;
  }
  c.expect(total, "every swept point maps to one of 1/5/9");
  c.expect(monotone, "sweeps are monotone");
  return report(4, "grading boundaries, totality and monotonicity", c, "6 boundary probes, 3 x 10^4-point sweeps");
}

int criterion_5() {
  Check c;
  std::mt19937_64 rng(5);
  int grades_ok = 0;
  double worst_cos = 0.0, worst_px = 0.0;
  const auto start = Clock::now();
  for (int i = 0; i < 50; ++i) {
    const auto s = ts::random_script(rng);
    const auto trial = generate(s);
    const auto sag = extract_sagittal(trial.sagittal);
    const auto front = extract_frontal(trial.frontal);
    worst_cos = std::max({worst_cos, std::abs(sag.p1 - trial.truth.p1), std::abs(sag.p2 - trial.truth.p2),
                          std::abs(front.s4_peak - trial.truth.s4)});
    worst_px = std::max({worst_px, std::abs(front.d1 - trial.truth.d1), std::abs(front.d2 - trial.truth.d2)});
    const auto g = grade_all(sag, front);
    const std::array<int, 5> hand{ts::oracle::flexion_grade(s.peak_knee_flexion_deg),
                                  ts::oracle::flexion_grade(s.peak_hip_flexion_deg),
                                  ts::oracle::lean_grade(s.peak_lateral_lean_deg),
                                  ts::oracle::width_grade(std::abs(s.knee_offset_px)),
                                  ts::oracle::width_grade(std::abs(s.shoulder_width_px - s.stance_ankle_width_px))};
    bool same = true;
    for (std::size_t k = 0; k < 5; ++k) same = same && value(g[k]) == hand[k];
    grades_ok += same ? 1 : 0;
  }
  const double ms = elapsed_ms(start);
  c.expect(worst_cos <= 1e-6, "cosine error " + std::to_string(worst_cos));
  c.expect(worst_px <= 1e-6, "distance error " + std::to_string(worst_px));
  c.expect(grades_ok == 50, std::to_string(grades_ok) + "/50 grade vectors match");
  c.expect(ms < 2000.0, "runtime " + std::to_string(ms) + " ms");
  char detail[160];
  std::snprintf(detail, sizeof detail, "50 scripts, max cosine err %.2e, max px err %.2e, %d/50 grades, %.1f ms",
                worst_cos, worst_px, grades_ok, ms);
  return report(5, "kinematics against analytic ground truth", c, detail);
}

int criterion_6() {
  Check c;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> shift(-1e4, 1e4);
  std::uniform_real_distribution<double> theta(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> log_k(std::log(0.1), std::log(10.0));
  double worst_cos = 0.0, worst_rel = 0.0;
  for (int i = 0; i < 50; ++i) {
    const auto base = generate(ts::random_script(rng));
    const auto sag = perturb(base.sagittal, 2.0, 2 * i);
    const auto front = perturb(base.frontal, 2.0, 2 * i + 1);
    const auto s0 = extract_sagittal(sag);
    const auto f0 = extract_frontal(front);
    const double tx = shift(rng), ty = shift(rng), th = theta(rng), k = std::exp(log_k(rng));
    const double co = std::cos(th), si = std::sin(th);

    auto cos_err = [&](const SagittalFeatures& a, const FrontalFeatures& b) {
      double e = std::max(std::abs(a.p1 - s0.p1), std::abs(a.p2 - s0.p2));
      for (std::size_t j = 0; j < b.s4_trace.size(); ++j) e = std::max(e, std::abs(b.s4_trace[j].value - f0.s4_trace[j].value));
      return e;
    };
    auto rel = [](double got, double want) { return want == 0.0 ? std::abs(got) : std::abs(got - want) / want; };

    const auto tr = [&](double x, double y) { return std::pair{x + tx, y + ty}; };
    const auto rot = [&](double x, double y) { return std::pair{co * x - si * y, si * x + co * y}; };
    const auto sc = [&](double x, double y) { return std::pair{k * x, k * y}; };

    worst_cos = std::max(worst_cos, cos_err(extract_sagittal(ts::transform(sag, tr)), extract_frontal(ts::transform(front, tr))));
    worst_cos = std::max(worst_cos, cos_err(extract_sagittal(ts::transform(sag, rot)), extract_frontal(ts::transform(front, rot))));
    const auto fs_ = extract_frontal(ts::transform(front, sc));
    worst_cos = std::max(worst_cos, cos_err(extract_sagittal(ts::transform(sag, sc)), fs_));
    worst_rel = std::max({worst_rel, rel(fs_.d1, k * f0.d1), rel(fs_.d2, k * f0.d2)});
  }
  c.expect(worst_cos <= 1e-9, "cosine drift " + std::to_string(worst_cos));
  c.expect(worst_rel <= 1e-9, "distance scale error " + std::to_string(worst_rel));
  char detail[140];
  std::snprintf(detail, sizeof detail, "50 noisy trials, max cosine drift %.2e, max distance rel err %.2e", worst_cos,
                worst_rel);
  return report(6, "translation, rotation and scale invariance", c, detail);
}

int criterion_7() {
  Check c;
  MotionScript s;
  s.peak_knee_flexion_deg = 65.0;
  s.peak_hip_flexion_deg = 70.0;
  s.peak_lateral_lean_deg = std::acos(0.75) * 180.0 / std::numbers::pi;  // about 41.4 deg
  const auto t = generate(s);
  const auto r = assess_series(t.sagittal, t.frontal, RunConfig{});
  auto peak = [&](const char* name) {
    double m = -2.0;
    for (const auto& p : r.traces.at(name)) m = std::max(m, p.value);
    return m;
  };
  const double p1 = peak("p1"), p2 = peak("p2"), s4 = peak("s4");
  c.expect(p1 > -0.5 && p1 < 0.0, "p1 peak " + std::to_string(p1));
  c.expect(p2 > -0.5 && p2 < 0.0, "p2 peak " + std::to_string(p2));
  c.near(s4, -0.75, 0.01, "s4 peak");
  c.expect(r.grades[2] == Grade::Good, "s4 grade should be 5");
  char detail[120];
  std::snprintf(detail, sizeof detail, "p1=%.4f p2=%.4f s4=%.4f", p1, p2, s4);
  return report(7, "65/70 degree landing trace peaks", c, detail);
}

int criterion_8() {
  Check c;
  KeypointSeries s;
  for (long t = 0; t < 3; ++t) s.frames.push_back(ts::full_frame(t));
  s.frames[0].keypoints[10] = {100.0, 200.0, 0.9};
  s.frames[2].keypoints[10] = {102.0, 204.0, 0.9};
  s.frames[1].keypoints[10] = {};
  s.frames[1].missing[10] = true;
  const auto fixed = preprocess(s);
  c.expect(fixed.series.frames[1].at(10).x == 101.0 && fixed.series.frames[1].at(10).y == 202.0,
           "midpoint repair must be exact");

  KeypointSeries gap;
  for (long t = 0; t < 12; ++t) gap.frames.push_back(ts::full_frame(t));
  for (std::size_t t = 2; t < 8; ++t) {
    gap.frames[t].keypoints[9] = {};
    gap.frames[t].missing[9] = true;
  }
  c.expect(ts::error_code_of([&] { preprocess(gap); }) == ErrorCode::GapTooLong, "6-frame gap must be GapTooLong");

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coord(1.0, 1900.0), conf(0.3, 1.0);
  std::bernoulli_distribution drop(0.1);
  int idempotent = 0, attempts = 0;
  while (idempotent < 100 && attempts < 1000) {
    ++attempts;
    KeypointSeries x;
    x.view = rng() % 2 ? View::Sagittal : View::Frontal;
    const std::size_t n = 5 + rng() % 40;
    for (std::size_t t = 0; t < n; ++t) {
      std::array<Keypoint2D, kBody25Count> kps{};
      for (auto& kp : kps) {
        if (!drop(rng)) kp = {coord(rng), coord(rng), conf(rng)};
      }
      x.frames.push_back(SkeletonFrame::from_keypoints(static_cast<long>(t), kps));
    }
    PreprocessResult once;
    try {
      once = preprocess(x);
    } catch (const Error&) {
      continue;
    }
    if (!(preprocess(once.series).series == once.series)) {
      c.expect(false, "preprocess not idempotent on attempt " + std::to_string(attempts));
      break;
    }
    ++idempotent;
  }
  c.expect(idempotent == 100, std::to_string(idempotent) + "/100 random series idempotent");
  return report(8, "preprocessing repair, gap limit and idempotence", c,
                std::to_string(idempotent) + " idempotent series from " + std::to_string(attempts) + " draws");
}

int criterion_9() {
  Check c;
  ts::TempDir dir;
  MotionScript s;
  s.n_frames = 300;
  s.touchdown_frame = 60;
  s.peak_knee_flexion_deg = 75.0;
  s.peak_hip_flexion_deg = 55.0;
  s.peak_lateral_lean_deg = 20.0;
  s.noise_sigma_px = 1.0;
  s.seed = 9;
  const auto trial = generate(s);
  write_text_file(dir / "sagittal.csv", format_series_csv(trial.sagittal));
  write_text_file(dir / "frontal.csv", format_series_csv(trial.frontal));
  const auto report_path = (dir / "report.json").string();
  const std::vector<std::string> args{"assess", "--sagittal", (dir / "sagittal.csv").string(), "--frontal",
                                      (dir / "frontal.csv").string(), "--report", report_path};

  const auto start = Clock::now();
  const int first_code = run_cli(args);
  const double ms = elapsed_ms(start);
  const auto first = read_text_file(report_path);
  const int second_code = run_cli(args);
  const auto second = read_text_file(report_path);

  c.expect(first_code == 0 && second_code == 0, "assess exit codes");
  c.expect(first == second, "reports differ between runs");
  c.expect(!first.empty(), "report is empty");
  c.expect(ms < 1000.0, "runtime " + std::to_string(ms) + " ms");
  char detail[120];
  std::snprintf(detail, sizeof detail, "300-frame two-view trial, %zu-byte report, %.1f ms", first.size(), ms);
  return report(9, "end-to-end determinism and runtime", c, detail);
}

}  // namespace

int main() {
  const std::vector<std::function<int()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                                   criterion_6, criterion_7, criterion_8, criterion_9};
  int failed = 0;
  for (const auto& criterion : criteria) {
    try {
      failed += criterion();
    } catch (const std::exception& e) {
      std::printf("FAIL criterion: unexpected exception: %s\n", e.what());
      ++failed;
    }
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
