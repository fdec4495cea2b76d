#include "aclrisk/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aclrisk/error.hpp"
#include "text_util.hpp"

namespace aclrisk {

double cosine_between(Vec2 u, Vec2 v, double epsilon) {
  const double nu = std::hypot(u.x, u.y);
  const double nv = std::hypot(v.x, v.y);
  if (!(nu >= epsilon) || !(nv >= epsilon)) {
    throw Error(ErrorCode::DegenerateVector, "vector norm below epsilon (coincident keypoints)");
  }
  const double c = (u.x * v.x + u.y * v.y) / (nu * nv);
  return std::clamp(c, -1.0, 1.0);
}

std::string_view to_string(WindowMode mode) {
  return mode == WindowMode::Full ? "full" : "landing";
}

std::optional<WindowMode> parse_window_mode(std::string_view text) {
  if (text == "full") return WindowMode::Full;
  if (text == "landing") return WindowMode::Landing;
  return std::nullopt;
}

namespace {

std::optional<double> ankle_height(const SkeletonFrame& frame, View view) {
  std::size_t count = 0;
  double sum = 0.0;
  auto add = [&](std::size_t idx) {
    if (!frame.missing[idx]) {
      sum += frame.keypoints[idx].y;
      ++count;
    }
  };
  add(body25::kRightAnkle);
  if (view == View::Frontal) add(body25::kLeftAnkle);
  if (count == 0 && view == View::Sagittal) add(body25::kLeftAnkle);
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count);
}

const Keypoint2D& require(const SkeletonFrame& frame, std::size_t idx) {
  if (frame.missing[idx]) {
    throw Error(ErrorCode::AllFramesInvalid,
                "required keypoint " + std::to_string(idx) + " is missing; preprocess first",
                frame.frame_index);
  }
  return frame.keypoints[idx];
}

double cosine_at(Vec2 u, Vec2 v, double epsilon, long frame) {
  try {
    return cosine_between(u, v, epsilon);
  } catch (const Error& e) {
    throw Error(e.code(), e.detail(), frame);
  }
}

double peak(const Trace& trace) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : trace) best = std::max(best, p.value);
  return best;
}

}  // namespace

FrameRange analysis_window(const KeypointSeries& series, const WindowOptions& options) {
  if (series.frames.empty()) throw Error(ErrorCode::WindowEmpty, "series is empty");
  const std::size_t n = series.frames.size();
  if (options.mode == WindowMode::Full) return {0, n - 1};

  // Image rows grow downward, so a falling ankle has positive velocity.
  std::vector<std::optional<double>> velocity(n);
  for (std::size_t p = 1; p < n; ++p) {
    const auto y0 = ankle_height(series.frames[p - 1], series.view);
    const auto y1 = ankle_height(series.frames[p], series.view);
    const auto dt = series.frames[p].frame_index - series.frames[p - 1].frame_index;
    if (y0 && y1 && dt > 0) velocity[p] = (*y1 - *y0) / static_cast<double>(dt);
  }

  std::optional<std::size_t> touchdown;
  double fastest = 0.0;
  for (std::size_t p = 1; p + 1 < n; ++p) {
    if (!velocity[p] || !velocity[p + 1]) continue;
    if (*velocity[p] > options.touchdown_velocity_px &&
        *velocity[p + 1] <= options.touchdown_velocity_px && *velocity[p] > fastest) {
      fastest = *velocity[p];
      touchdown = p;
    }
  }
  if (!touchdown) throw Error(ErrorCode::WindowEmpty, "no touchdown found in ankle trajectory");

  std::size_t last = n - 1;
  if (series.fps && *series.fps > 0.0) {
    const auto frames = static_cast<std::size_t>(
        std::max(1.0, std::round(options.landing_duration_s * *series.fps)));
    last = std::min(last, *touchdown + frames - 1);
  }
  return {*touchdown, last};
}

SagittalFeatures extract_sagittal(const KeypointSeries& series, const KinematicsOptions& options) {
  using namespace body25;
  const bool left = options.side == Side::Left;
  const std::size_t hip = left ? kLeftHip : kRightHip;
  const std::size_t knee = left ? kLeftKnee : kRightKnee;
  const std::size_t ankle = left ? kLeftAnkle : kRightAnkle;

  SagittalFeatures out;
  out.window = analysis_window(series, options.window);
  out.p1_trace.reserve(out.window.size());
  out.p2_trace.reserve(out.window.size());
  for (std::size_t p = out.window.first; p <= out.window.last; ++p) {
    const auto& f = series.frames[p];
    const Vec2 thigh = require(f, hip) - require(f, knee);
    const Vec2 shank = require(f, ankle) - require(f, knee);
    const Vec2 torso = require(f, kMidHip) - require(f, kNeck);
    out.p1_trace.push_back({f.frame_index, cosine_at(thigh, shank, options.epsilon, f.frame_index)});
    out.p2_trace.push_back({f.frame_index, cosine_at(thigh, torso, options.epsilon, f.frame_index)});
  }
  out.p1 = peak(out.p1_trace);
  out.p2 = peak(out.p2_trace);
  return out;
}

FrontalFeatures extract_frontal(const KeypointSeries& series, const KinematicsOptions& options) {
  using namespace body25;
  auto dist = [](const Keypoint2D& a, const Keypoint2D& b) { return std::hypot(a.x - b.x, a.y - b.y); };

  FrontalFeatures out;
  out.window = analysis_window(series, options.window);
  double shoulder_sum = 0.0;
  for (std::size_t p = out.window.first; p <= out.window.last; ++p) {
    const auto& f = series.frames[p];
    const long idx = f.frame_index;
    const double s1 = dist(require(f, kLeftAnkle), require(f, kRightAnkle));
    const double s2 = dist(require(f, kLeftKnee), require(f, kRightKnee));
    const double s3 = dist(require(f, kLeftShoulder), require(f, kRightShoulder));
    const Vec2 trunk = require(f, kMidHip) - require(f, kNeck);
    const Vec2 right_thigh = require(f, kRightHip) - require(f, kRightKnee);
    const Vec2 left_thigh = require(f, kLeftHip) - require(f, kLeftKnee);
    const double s4 = 0.5 * (cosine_at(trunk, right_thigh, options.epsilon, idx) +
                             cosine_at(trunk, left_thigh, options.epsilon, idx));

    out.s1_trace.push_back({idx, s1});
    out.s2_trace.push_back({idx, s2});
    out.s3_trace.push_back({idx, s3});
    out.s4_trace.push_back({idx, s4});
    out.d1 = std::max(out.d1, std::abs(s1 - s2));
    out.d2 = std::max(out.d2, std::abs(s1 - s3));
    shoulder_sum += s3;
  }
  out.s4_peak = peak(out.s4_trace);
  out.mean_shoulder_width = shoulder_sum / static_cast<double>(out.window.size());
  return out;
}

std::string format_trace_csv(const Trace& trace) {
  std::string out = "frame,value\n";
  for (const auto& p : trace) {
    out += std::to_string(p.frame);
    out += ',';
    out += detail::format_double(p.value);
    out += '\n';
  }
  return out;
}

}  // namespace aclrisk
