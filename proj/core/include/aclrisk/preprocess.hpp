#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "aclrisk/keypoints.hpp"

namespace aclrisk {

inline constexpr double kDefaultConfidenceThreshold = 0.4;
inline constexpr std::size_t kDefaultMaxGap = 5;

struct PreprocessOptions {
  double confidence_threshold = kDefaultConfidenceThreshold;
  std::size_t max_gap = kDefaultMaxGap;
  // Keypoints that must be present in every output frame; defaults to the
  // view's feature keypoints.
  std::optional<std::vector<std::size_t>> required;
};

struct PreprocessStats {
  std::size_t input_frames = 0;
  std::size_t output_frames = 0;
  std::size_t frames_dropped_leading = 0;
  std::size_t frames_dropped_trailing = 0;
  std::size_t frames_repaired = 0;
  std::size_t keypoints_repaired = 0;
  std::size_t keypoints_below_threshold = 0;

  friend bool operator==(const PreprocessStats&, const PreprocessStats&) = default;
};

struct PreprocessResult {
  KeypointSeries series;
  PreprocessStats stats;
};

// Confidence gate, leading/trailing trim and bounded linear gap filling on the
// required keypoints. Non-required keypoints are gated but never repaired.
// Throws GapTooLong or AllFramesInvalid.
PreprocessResult preprocess(const KeypointSeries& series, const PreprocessOptions& options = {});

}  // namespace aclrisk
