#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "aclrisk/keypoints.hpp"

namespace aclrisk {

// Scripted drop landing. Angles ramp from 0 to their peak with a half-cosine
// profile starting at the touchdown frame and then hold; before touchdown the
// whole body falls with constant acceleration onto the ground line.
struct MotionScript {
  std::size_t n_frames = 90;
  double fps = 30.0;
  double peak_knee_flexion_deg = 0.0;
  double peak_hip_flexion_deg = 0.0;
  double peak_lateral_lean_deg = 0.0;
  double stance_ankle_width_px = 120.0;
  // Ankle width minus knee width; positive brings the knees inward.
  double knee_offset_px = 0.0;
  double shoulder_width_px = 120.0;
  double thigh_length_px = 180.0;
  double shank_length_px = 180.0;
  double trunk_length_px = 260.0;
  std::size_t touchdown_frame = 30;
  std::size_t ramp_frames = 10;
  double drop_height_px = 150.0;
  double noise_sigma_px = 0.0;
  std::uint64_t seed = 0;

  // Throws InvalidScript.
  void validate() const;
};

// Exact values implied by the script, independent of the feature extractor.
struct GroundTruth {
  std::vector<long> frames;
  std::vector<double> knee_flexion_deg;
  std::vector<double> hip_flexion_deg;
  std::vector<double> lateral_lean_deg;
  std::vector<double> p1_trace;  // cos(180 deg - knee)
  std::vector<double> p2_trace;  // cos(180 deg - hip)
  std::vector<double> s4_trace;  // cos(180 deg - lean)
  double ankle_width = 0.0;
  double knee_width = 0.0;
  double shoulder_width = 0.0;
  double p1 = -1.0;
  double p2 = -1.0;
  double s4 = -1.0;
  double d1 = 0.0;
  double d2 = 0.0;
  std::size_t touchdown_frame = 0;
  // Grades read off the degree and pixel criteria directly: A1, A2, A3, D1, D2.
  std::array<int, 5> grades{};
};

struct SyntheticTrial {
  KeypointSeries sagittal;
  KeypointSeries frontal;
  GroundTruth truth;
};

SyntheticTrial generate(const MotionScript& script);

// Seeded Gaussian jitter on the coordinates of every detected keypoint.
KeypointSeries perturb(const KeypointSeries& series, double sigma_px, std::uint64_t seed);

// JSON script document; keys mirror MotionScript field names.
MotionScript parse_motion_script(std::string_view text);
std::string format_motion_script(const MotionScript& script);
std::string format_ground_truth(const GroundTruth& truth);

}  // namespace aclrisk
