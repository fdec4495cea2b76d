#include "aclrisk/motion_synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "aclrisk/error.hpp"
#include "json.hpp"

namespace aclrisk {

using nlohmann::json;

namespace {

constexpr double kMaxAngleDeg = 170.0;
constexpr double kGroundY = 900.0;
constexpr double kCenterX = 640.0;

double radians(double deg) { return deg * std::numbers::pi / 180.0; }

struct Point {
  double x;
  double y;
};

Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
Point scaled(Point dir, double s) { return {dir.x * s, dir.y * s}; }
// Rotation in image coordinates; positive angles turn "up" towards +x.
Point rotated(Point v, double rad) {
  return {v.x * std::cos(rad) - v.y * std::sin(rad), v.x * std::sin(rad) + v.y * std::cos(rad)};
}

int angle_grade(double deg) {
  if (deg <= 30.0) return 1;
  if (deg <= 60.0) return 5;
  return 9;
}

int lean_grade(double deg) {
  if (deg <= 30.0) return 9;
  if (deg <= 60.0) return 5;
  return 1;
}

int width_grade(double px) {
  if (px < 30.0) return 9;
  if (px < 50.0) return 5;
  return 1;
}

double ramp(const MotionScript& s, std::size_t t) {
  if (t < s.touchdown_frame) return 0.0;
  const double u = std::min(1.0, static_cast<double>(t - s.touchdown_frame) /
                                     static_cast<double>(s.ramp_frames));
  return 0.5 * (1.0 - std::cos(std::numbers::pi * u));
}

// Vertical offset of the whole body: negative (above ground) while falling.
double fall_offset(const MotionScript& s, std::size_t t) {
  if (t >= s.touchdown_frame || s.touchdown_frame == 0) return 0.0;
  const double u = static_cast<double>(t) / static_cast<double>(s.touchdown_frame);
  return -s.drop_height_px * (1.0 - u * u);
}

void set(SkeletonFrame& f, std::size_t idx, Point p) { f.keypoints[idx] = {p.x, p.y, 1.0}; }

SkeletonFrame sagittal_frame(const MotionScript& s, long index, double knee_deg, double hip_deg,
                             double offset) {
  using namespace body25;
  SkeletonFrame f;
  f.frame_index = index;
  const double half = radians(knee_deg) / 2.0;
  const Point ankle{kCenterX, kGroundY + offset};
  const Point knee = ankle + scaled({std::sin(half), -std::cos(half)}, s.shank_length_px);
  const Point thigh_up{-std::sin(half), -std::cos(half)};
  const Point hip = knee + scaled(thigh_up, s.thigh_length_px);
  const Point trunk_up = rotated(thigh_up, radians(hip_deg));
  const Point neck = hip + scaled(trunk_up, s.trunk_length_px);
  const Point head = neck + scaled(trunk_up, 0.25 * s.trunk_length_px);
  const Point down{0.0, 1.0};
  const Point toe{1.0, 0.0};
  const Point behind{-4.0, 0.0};

  set(f, 0, head);
  set(f, kNeck, neck);
  set(f, kRightShoulder, neck);
  set(f, 3, neck + scaled(down, 0.4 * s.trunk_length_px));
  set(f, 4, neck + scaled(down, 0.8 * s.trunk_length_px));
  set(f, kLeftShoulder, neck + behind);
  set(f, 6, neck + behind + scaled(down, 0.4 * s.trunk_length_px));
  set(f, 7, neck + behind + scaled(down, 0.8 * s.trunk_length_px));
  set(f, kMidHip, hip);
  set(f, kRightHip, hip);
  set(f, kRightKnee, knee);
  set(f, kRightAnkle, ankle);
  set(f, kLeftHip, hip + behind);
  set(f, kLeftKnee, knee + behind);
  set(f, kLeftAnkle, ankle + behind);
  set(f, 15, head + Point{6.0, -4.0});
  set(f, 16, head + Point{6.0, -4.0} + behind);
  set(f, 17, head + Point{-6.0, -2.0});
  set(f, 18, head + Point{-6.0, -2.0} + behind);
  set(f, 19, ankle + behind + scaled(toe, 40.0));
  set(f, 20, ankle + behind + scaled(toe, 34.0));
  set(f, 21, ankle + behind + scaled(toe, -10.0));
  set(f, 22, ankle + scaled(toe, 40.0));
  set(f, 23, ankle + scaled(toe, 34.0));
  set(f, 24, ankle + scaled(toe, -10.0));
  return f;
}

SkeletonFrame frontal_frame(const MotionScript& s, long index, double knee_deg, double lean_deg,
                            double offset) {
  using namespace body25;
  SkeletonFrame f;
  f.frame_index = index;
  const double half = radians(knee_deg) / 2.0;
  const double ankle_y = kGroundY + offset;
  const double knee_y = ankle_y - s.shank_length_px * std::cos(half);
  const double hip_y = knee_y - s.thigh_length_px * std::cos(half);
  const double half_ankle = s.stance_ankle_width_px / 2.0;
  const double half_knee = (s.stance_ankle_width_px - s.knee_offset_px) / 2.0;

  // Subject faces the camera: their right side is on the image left.
  const Point right_ankle{kCenterX - half_ankle, ankle_y};
  const Point left_ankle{kCenterX + half_ankle, ankle_y};
  const Point right_knee{kCenterX - half_knee, knee_y};
  const Point left_knee{kCenterX + half_knee, knee_y};
  const Point right_hip{kCenterX - half_knee, hip_y};
  const Point left_hip{kCenterX + half_knee, hip_y};
  const Point mid_hip{kCenterX, hip_y};

  const double lean = radians(lean_deg);
  const Point trunk_up{std::sin(lean), -std::cos(lean)};
  const Point across{std::cos(lean), std::sin(lean)};
  const Point neck = mid_hip + scaled(trunk_up, s.trunk_length_px);
  const Point head = neck + scaled(trunk_up, 0.25 * s.trunk_length_px);
  const Point right_shoulder = neck + scaled(across, -s.shoulder_width_px / 2.0);
  const Point left_shoulder = neck + scaled(across, s.shoulder_width_px / 2.0);
  const Point down{0.0, 1.0};

  set(f, 0, head);
  set(f, kNeck, neck);
  set(f, kRightShoulder, right_shoulder);
  set(f, 3, right_shoulder + scaled(down, 0.4 * s.trunk_length_px));
  set(f, 4, right_shoulder + scaled(down, 0.8 * s.trunk_length_px));
  set(f, kLeftShoulder, left_shoulder);
  set(f, 6, left_shoulder + scaled(down, 0.4 * s.trunk_length_px));
  set(f, 7, left_shoulder + scaled(down, 0.8 * s.trunk_length_px));
  set(f, kMidHip, mid_hip);
  set(f, kRightHip, right_hip);
  set(f, kRightKnee, right_knee);
  set(f, kRightAnkle, right_ankle);
  set(f, kLeftHip, left_hip);
  set(f, kLeftKnee, left_knee);
  set(f, kLeftAnkle, left_ankle);
  set(f, 15, head + Point{-8.0, -6.0});
  set(f, 16, head + Point{8.0, -6.0});
  set(f, 17, head + Point{-16.0, -2.0});
  set(f, 18, head + Point{16.0, -2.0});
  set(f, 19, left_ankle + Point{8.0, 12.0});
  set(f, 20, left_ankle + Point{16.0, 10.0});
  set(f, 21, left_ankle + Point{0.0, 6.0});
  set(f, 22, right_ankle + Point{-8.0, 12.0});
  set(f, 23, right_ankle + Point{-16.0, 10.0});
  set(f, 24, right_ankle + Point{0.0, 6.0});
  return f;
}

}  // namespace

void MotionScript::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidScript, what); };
  if (n_frames < 2) fail("n_frames must be at least 2");
  if (!(fps > 0.0)) fail("fps must be positive");
  for (double a : {peak_knee_flexion_deg, peak_hip_flexion_deg, peak_lateral_lean_deg}) {
    if (!(a >= 0.0 && a <= kMaxAngleDeg)) fail("peak angles must lie in [0, 170] degrees");
  }
  for (double len : {thigh_length_px, shank_length_px, trunk_length_px, stance_ankle_width_px,
                     shoulder_width_px}) {
    if (!(len > 0.0)) fail("lengths and widths must be positive");
  }
  if (!(stance_ankle_width_px - knee_offset_px > 0.0)) fail("knee width (ankle width - knee offset) must be positive");
  if (touchdown_frame >= n_frames) fail("touchdown_frame must be less than n_frames");
  if (ramp_frames < 1) fail("ramp_frames must be at least 1");
  if (!(drop_height_px >= 0.0)) fail("drop_height_px must be nonnegative");
  if (!(noise_sigma_px >= 0.0)) fail("noise_sigma_px must be nonnegative");
}

SyntheticTrial generate(const MotionScript& script) {
  script.validate();
  SyntheticTrial trial;
  trial.sagittal.view = View::Sagittal;
  trial.frontal.view = View::Frontal;
  trial.sagittal.fps = script.fps;
  trial.frontal.fps = script.fps;

  auto& truth = trial.truth;
  truth.touchdown_frame = script.touchdown_frame;
  truth.ankle_width = script.stance_ankle_width_px;
  truth.knee_width = script.stance_ankle_width_px - script.knee_offset_px;
  truth.shoulder_width = script.shoulder_width_px;
  truth.d1 = std::abs(truth.ankle_width - truth.knee_width);
  truth.d2 = std::abs(truth.ankle_width - truth.shoulder_width);

  double max_knee = 0.0, max_hip = 0.0, max_lean = 0.0;
  for (std::size_t t = 0; t < script.n_frames; ++t) {
    const double r = ramp(script, t);
    const double knee = script.peak_knee_flexion_deg * r;
    const double hip = script.peak_hip_flexion_deg * r;
    const double lean = script.peak_lateral_lean_deg * r;
    const double offset = fall_offset(script, t);
    const long index = static_cast<long>(t);

    trial.sagittal.frames.push_back(sagittal_frame(script, index, knee, hip, offset));
    trial.frontal.frames.push_back(frontal_frame(script, index, knee, lean, offset));

    truth.frames.push_back(index);
    truth.knee_flexion_deg.push_back(knee);
    truth.hip_flexion_deg.push_back(hip);
    truth.lateral_lean_deg.push_back(lean);
    truth.p1_trace.push_back(std::cos(radians(180.0 - knee)));
    truth.p2_trace.push_back(std::cos(radians(180.0 - hip)));
    truth.s4_trace.push_back(std::cos(radians(180.0 - lean)));
    max_knee = std::max(max_knee, knee);
    max_hip = std::max(max_hip, hip);
    max_lean = std::max(max_lean, lean);
  }
  truth.p1 = *std::max_element(truth.p1_trace.begin(), truth.p1_trace.end());
  truth.p2 = *std::max_element(truth.p2_trace.begin(), truth.p2_trace.end());
  truth.s4 = *std::max_element(truth.s4_trace.begin(), truth.s4_trace.end());
  truth.grades = {angle_grade(max_knee), angle_grade(max_hip), lean_grade(max_lean),
                  width_grade(truth.d1), width_grade(truth.d2)};

  if (script.noise_sigma_px > 0.0) {
    trial.sagittal = perturb(trial.sagittal, script.noise_sigma_px, script.seed);
    trial.frontal = perturb(trial.frontal, script.noise_sigma_px, script.seed + 1);
  }
  return trial;
}

KeypointSeries perturb(const KeypointSeries& series, double sigma_px, std::uint64_t seed) {
  if (!(sigma_px >= 0.0)) throw Error(ErrorCode::OutOfRange, "sigma_px must be nonnegative");
  KeypointSeries out = series;
  if (sigma_px == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, sigma_px);
  for (auto& frame : out.frames) {
    for (std::size_t i = 0; i < kBody25Count; ++i) {
      if (frame.missing[i]) continue;
      frame.keypoints[i].x += jitter(rng);
      frame.keypoints[i].y += jitter(rng);
    }
  }
  return out;
}

namespace {

const std::set<std::string>& script_keys() {
  static const std::set<std::string> keys{
      "n_frames",           "fps",                   "peak_knee_flexion_deg",
      "peak_hip_flexion_deg", "peak_lateral_lean_deg", "stance_ankle_width_px",
      "knee_offset_px",     "shoulder_width_px",     "thigh_length_px",
      "shank_length_px",    "trunk_length_px",       "touchdown_frame",
      "ramp_frames",        "drop_height_px",        "noise_sigma_px",
      "seed"};
  return keys;
}

}  // namespace

MotionScript parse_motion_script(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::InvalidScript, std::string("script is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::InvalidScript, "script must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!script_keys().contains(key)) {
      throw Error(ErrorCode::InvalidScript, "unknown script key \"" + key + "\"");
    }
  }
  MotionScript s;
  auto number = [&](const char* key, double& slot) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) throw Error(ErrorCode::InvalidScript, std::string(key) + " must be a number");
    slot = doc[key].get<double>();
  };
  auto count = [&](const char* key, auto& slot) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_unsigned()) {
      throw Error(ErrorCode::InvalidScript, std::string(key) + " must be a nonnegative integer");
    }
    slot = doc[key].get<std::remove_reference_t<decltype(slot)>>();
  };
  count("n_frames", s.n_frames);
  number("fps", s.fps);
  number("peak_knee_flexion_deg", s.peak_knee_flexion_deg);
  number("peak_hip_flexion_deg", s.peak_hip_flexion_deg);
  number("peak_lateral_lean_deg", s.peak_lateral_lean_deg);
  number("stance_ankle_width_px", s.stance_ankle_width_px);
  number("knee_offset_px", s.knee_offset_px);
  number("shoulder_width_px", s.shoulder_width_px);
  number("thigh_length_px", s.thigh_length_px);
  number("shank_length_px", s.shank_length_px);
  number("trunk_length_px", s.trunk_length_px);
  count("touchdown_frame", s.touchdown_frame);
  count("ramp_frames", s.ramp_frames);
  number("drop_height_px", s.drop_height_px);
  number("noise_sigma_px", s.noise_sigma_px);
  count("seed", s.seed);
  return s;
}

std::string format_motion_script(const MotionScript& s) {
  json doc{{"n_frames", s.n_frames},
           {"fps", s.fps},
           {"peak_knee_flexion_deg", s.peak_knee_flexion_deg},
           {"peak_hip_flexion_deg", s.peak_hip_flexion_deg},
           {"peak_lateral_lean_deg", s.peak_lateral_lean_deg},
           {"stance_ankle_width_px", s.stance_ankle_width_px},
           {"knee_offset_px", s.knee_offset_px},
           {"shoulder_width_px", s.shoulder_width_px},
           {"thigh_length_px", s.thigh_length_px},
           {"shank_length_px", s.shank_length_px},
           {"trunk_length_px", s.trunk_length_px},
           {"touchdown_frame", s.touchdown_frame},
           {"ramp_frames", s.ramp_frames},
           {"drop_height_px", s.drop_height_px},
           {"noise_sigma_px", s.noise_sigma_px},
           {"seed", s.seed}};
  return doc.dump(2) + "\n";
}

std::string format_ground_truth(const GroundTruth& t) {
  json doc{{"frames", t.frames},
           {"knee_flexion_deg", t.knee_flexion_deg},
           {"hip_flexion_deg", t.hip_flexion_deg},
           {"lateral_lean_deg", t.lateral_lean_deg},
           {"p1_trace", t.p1_trace},
           {"p2_trace", t.p2_trace},
           {"s4_trace", t.s4_trace},
           {"ankle_width", t.ankle_width},
           {"knee_width", t.knee_width},
           {"shoulder_width", t.shoulder_width},
           {"p1", t.p1},
           {"p2", t.p2},
           {"s4", t.s4},
           {"d1", t.d1},
           {"d2", t.d2},
           {"touchdown_frame", t.touchdown_frame},
           {"grades", t.grades}};
  return doc.dump(2) + "\n";
}

}  // namespace aclrisk
