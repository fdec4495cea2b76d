#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace aclrisk {

inline constexpr std::size_t kBody25Count = 25;

// BODY_25 indices referenced by the feature model.
namespace body25 {
inline constexpr std::size_t kNeck = 1;
inline constexpr std::size_t kRightShoulder = 2;
inline constexpr std::size_t kLeftShoulder = 5;
inline constexpr std::size_t kMidHip = 8;
inline constexpr std::size_t kRightHip = 9;
inline constexpr std::size_t kRightKnee = 10;
inline constexpr std::size_t kRightAnkle = 11;
inline constexpr std::size_t kLeftHip = 12;
inline constexpr std::size_t kLeftKnee = 13;
inline constexpr std::size_t kLeftAnkle = 14;
}  // namespace body25

struct Keypoint2D {
  double x = 0.0;  // pixels
  double y = 0.0;  // pixels, image rows grow downward
  double confidence = 0.0;

  // (0, 0, 0) is how the detector reports an undetected joint.
  bool is_undetected() const noexcept {
    return x == 0.0 && y == 0.0 && confidence == 0.0;
  }

  friend bool operator==(const Keypoint2D&, const Keypoint2D&) = default;
};

struct SkeletonFrame {
  long frame_index = 0;
  std::array<Keypoint2D, kBody25Count> keypoints{};
  std::array<bool, kBody25Count> missing{};

  // Builds a frame from detector output; undetected triples are flagged missing.
  static SkeletonFrame from_keypoints(long frame_index,
                                      const std::array<Keypoint2D, kBody25Count>& kps);

  bool is_missing(std::size_t index) const { return missing.at(index); }
  const Keypoint2D& at(std::size_t index) const { return keypoints.at(index); }

  friend bool operator==(const SkeletonFrame&, const SkeletonFrame&) = default;
};

enum class View { Sagittal, Frontal };

std::string_view to_string(View view);
std::optional<View> parse_view(std::string_view text);

// Which leg the sagittal features are taken from.
enum class Side { Right, Left };

std::string_view to_string(Side side);
std::optional<Side> parse_side(std::string_view text);

struct KeypointSeries {
  View view = View::Sagittal;
  std::vector<SkeletonFrame> frames;
  std::optional<double> fps;

  bool empty() const noexcept { return frames.empty(); }
  std::size_t size() const noexcept { return frames.size(); }

  friend bool operator==(const KeypointSeries&, const KeypointSeries&) = default;
};

// Keypoints the feature definitions read for a given view. Sagittal uses the
// right leg unless `side` mirrors it to the left.
std::vector<std::size_t> required_keypoints(View view, Side side = Side::Right);

// True when frame indices are strictly increasing.
bool has_increasing_frame_indices(std::span<const SkeletonFrame> frames);

}  // namespace aclrisk
