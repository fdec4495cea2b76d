#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aclrisk/keypoints.hpp"

namespace aclrisk {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline Vec2 operator-(const Keypoint2D& a, const Keypoint2D& b) { return {a.x - b.x, a.y - b.y}; }

inline constexpr double kDefaultDegeneracyEpsilon = 1e-9;

// u.v / (|u||v|) clamped to [-1, 1]. Throws DegenerateVector when either norm
// is below `epsilon` pixels.
double cosine_between(Vec2 u, Vec2 v, double epsilon = kDefaultDegeneracyEpsilon);

struct TracePoint {
  long frame = 0;
  double value = 0.0;

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};
using Trace = std::vector<TracePoint>;

// Inclusive range of positions into KeypointSeries::frames.
struct FrameRange {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const noexcept { return last - first + 1; }
  friend bool operator==(const FrameRange&, const FrameRange&) = default;
};

enum class WindowMode { Full, Landing };

std::string_view to_string(WindowMode mode);
std::optional<WindowMode> parse_window_mode(std::string_view text);

struct WindowOptions {
  WindowMode mode = WindowMode::Full;
  // Landing window length; runs to series end when the series has no fps.
  double landing_duration_s = 1.0;
  // Minimum downward ankle speed (px/frame) that counts as falling.
  double touchdown_velocity_px = 0.5;
};

// Full mode returns the whole series. Landing mode starts at the touchdown
// frame: the last frame of a downward ankle movement that stops on the next
// frame, taking the fastest such arrival. Throws WindowEmpty.
FrameRange analysis_window(const KeypointSeries& series, const WindowOptions& options = {});

struct KinematicsOptions {
  WindowOptions window;
  Side side = Side::Right;  // sagittal leg; Left mirrors to keypoints 12/13/14
  double epsilon = kDefaultDegeneracyEpsilon;
};

struct SagittalFeatures {
  double p1 = -1.0;  // peak knee cosine
  double p2 = -1.0;  // peak thigh/trunk cosine
  Trace p1_trace;
  Trace p2_trace;
  FrameRange window;
};

struct FrontalFeatures {
  double d1 = 0.0;       // max |s1 - s2|, px
  double d2 = 0.0;       // max |s1 - s3|, px
  double s4_peak = -1.0; // peak mean thigh/trunk cosine
  double mean_shoulder_width = 0.0;
  Trace s1_trace;  // ankle width
  Trace s2_trace;  // knee width
  Trace s3_trace;  // shoulder width
  Trace s4_trace;
  FrameRange window;
};

SagittalFeatures extract_sagittal(const KeypointSeries& series, const KinematicsOptions& options = {});
FrontalFeatures extract_frontal(const KeypointSeries& series, const KinematicsOptions& options = {});

// `frame,value` CSV.
std::string format_trace_csv(const Trace& trace);

}  // namespace aclrisk
