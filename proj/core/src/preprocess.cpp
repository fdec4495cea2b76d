#include "aclrisk/preprocess.hpp"

#include <algorithm>
#include <string>

#include "aclrisk/error.hpp"

namespace aclrisk {

namespace {

double lerp_clamped(double a, double b, double t) {
  const double v = a + t * (b - a);
  return std::clamp(v, std::min(a, b), std::max(a, b));
}

struct Gap {
  std::size_t before;  // last valid position before the gap
  std::size_t after;   // first valid position after the gap
};

}  // namespace

PreprocessResult preprocess(const KeypointSeries& series, const PreprocessOptions& options) {
  if (!(options.confidence_threshold >= 0.0 && options.confidence_threshold <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "confidence threshold must lie in [0,1]");
  }
  const auto required = options.required.value_or(required_keypoints(series.view));
  for (auto idx : required) {
    if (idx >= kBody25Count) {
      throw Error(ErrorCode::OutOfRange, "required keypoint index " + std::to_string(idx));
    }
  }

  PreprocessStats stats;
  stats.input_frames = series.frames.size();
  if (series.frames.empty()) {
    throw Error(ErrorCode::AllFramesInvalid, "series has no frames");
  }

  std::vector<SkeletonFrame> frames = series.frames;
  for (auto& frame : frames) {
    for (std::size_t i = 0; i < kBody25Count; ++i) {
      if (!frame.missing[i] && frame.keypoints[i].confidence < options.confidence_threshold) {
        frame.missing[i] = true;
        ++stats.keypoints_below_threshold;
      }
    }
  }

  const std::size_t n = frames.size();
  std::size_t start = 0;
  std::size_t end = n - 1;
  for (auto idx : required) {
    std::size_t first = n;
    std::size_t last = 0;
    for (std::size_t p = 0; p < n; ++p) {
      if (!frames[p].missing[idx]) {
        first = std::min(first, p);
        last = p;
      }
    }
    if (first == n) {
      throw Error(ErrorCode::AllFramesInvalid,
                  "required keypoint " + std::to_string(idx) + " is never valid");
    }
    start = std::max(start, first);
    end = std::min(end, last);
  }
  if (start > end) {
    throw Error(ErrorCode::AllFramesInvalid,
                "no frame range where every required keypoint is available");
  }

  std::vector<bool> frame_touched(n, false);
  for (auto idx : required) {
    // Gaps bounded by valid samples on both sides that overlap [start, end].
    std::vector<Gap> gaps;
    std::optional<std::size_t> last_valid;
    for (std::size_t p = 0; p < n; ++p) {
      if (frames[p].missing[idx]) continue;
      if (last_valid && p - *last_valid > 1) gaps.push_back({*last_valid, p});
      last_valid = p;
    }
    for (const auto& gap : gaps) {
      if (gap.after <= start || gap.before >= end) continue;
      const std::size_t length = gap.after - gap.before - 1;
      if (length > options.max_gap) {
        throw Error(ErrorCode::GapTooLong,
                    "keypoint " + std::to_string(idx) + " missing for " + std::to_string(length) +
                        " consecutive frames (max " + std::to_string(options.max_gap) + ")",
                    frames[gap.before + 1].frame_index);
      }
      const auto& a = frames[gap.before];
      const auto& b = frames[gap.after];
      const double span = static_cast<double>(b.frame_index - a.frame_index);
      for (std::size_t p = gap.before + 1; p < gap.after; ++p) {
        const double t = static_cast<double>(frames[p].frame_index - a.frame_index) / span;
        const auto& ka = a.keypoints[idx];
        const auto& kb = b.keypoints[idx];
        frames[p].keypoints[idx] = {lerp_clamped(ka.x, kb.x, t), lerp_clamped(ka.y, kb.y, t),
                                    lerp_clamped(ka.confidence, kb.confidence, t)};
        frames[p].missing[idx] = false;
        if (p >= start && p <= end) {
          ++stats.keypoints_repaired;
          frame_touched[p] = true;
        }
      }
    }
  }

  PreprocessResult result;
  result.series.view = series.view;
  result.series.fps = series.fps;
  result.series.frames.assign(frames.begin() + static_cast<std::ptrdiff_t>(start),
                              frames.begin() + static_cast<std::ptrdiff_t>(end) + 1);
  stats.frames_dropped_leading = start;
  stats.frames_dropped_trailing = n - 1 - end;
  stats.output_frames = result.series.frames.size();
  stats.frames_repaired = static_cast<std::size_t>(
      std::count(frame_touched.begin() + static_cast<std::ptrdiff_t>(start),
                 frame_touched.begin() + static_cast<std::ptrdiff_t>(end) + 1, true));
  result.stats = stats;
  return result;
}

}  // namespace aclrisk
