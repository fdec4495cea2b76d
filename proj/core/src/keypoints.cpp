#include "aclrisk/keypoints.hpp"

namespace aclrisk {

SkeletonFrame SkeletonFrame::from_keypoints(long frame_index,
                                            const std::array<Keypoint2D, kBody25Count>& kps) {
  SkeletonFrame frame;
  frame.frame_index = frame_index;
  frame.keypoints = kps;
  for (std::size_t i = 0; i < kBody25Count; ++i) {
    frame.missing[i] = kps[i].is_undetected();
  }
  return frame;
}

std::string_view to_string(View view) {
  return view == View::Sagittal ? "sagittal" : "frontal";
}

std::optional<View> parse_view(std::string_view text) {
  if (text == "sagittal") return View::Sagittal;
  if (text == "frontal") return View::Frontal;
  return std::nullopt;
}

std::string_view to_string(Side side) { return side == Side::Right ? "right" : "left"; }

std::optional<Side> parse_side(std::string_view text) {
  if (text == "right") return Side::Right;
  if (text == "left") return Side::Left;
  return std::nullopt;
}

std::vector<std::size_t> required_keypoints(View view, Side side) {
  using namespace body25;
  if (view == View::Sagittal) {
    if (side == Side::Left) {
      return {kNeck, kMidHip, kLeftHip, kLeftKnee, kLeftAnkle};
    }
    return {kNeck, kMidHip, kRightHip, kRightKnee, kRightAnkle};
  }
  return {kNeck,     kRightShoulder, kLeftShoulder, kMidHip,  kRightHip,
          kRightKnee, kLeftHip,      kLeftKnee,     kRightAnkle, kLeftAnkle};
}

bool has_increasing_frame_indices(std::span<const SkeletonFrame> frames) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].frame_index <= frames[i - 1].frame_index) return false;
  }
  return true;
}

}  // namespace aclrisk
