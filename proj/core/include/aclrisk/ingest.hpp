#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "aclrisk/keypoints.hpp"

namespace aclrisk {

// How to pick the subject when a frame document lists several people.
enum class PersonPolicy {
  HighestMeanConfidence,  // mean over non-missing keypoints; ties go to the first listed
  Strict,                 // more than one person is an error
};

std::string_view to_string(PersonPolicy policy);
std::optional<PersonPolicy> parse_person_policy(std::string_view text);

// Parses one OpenPose BODY_25 frame document ({"people":[{"pose_keypoints_2d":[75 numbers]}]}).
SkeletonFrame parse_openpose_frame(std::string_view document, PersonPolicy policy,
                                   long frame_index = 0);

// Single-person OpenPose document for `frame`.
std::string format_openpose_frame(const SkeletonFrame& frame);

// CSV series: header frame,kp0_x,kp0_y,kp0_c,...,kp24_c then one row per frame.
KeypointSeries parse_series_csv(std::string_view text, View view);
std::string format_series_csv(const KeypointSeries& series);
std::string series_csv_header();

// Frame index encoded as the last run of digits in a per-frame file name,
// e.g. "trial_000000000042_keypoints.json" -> 42.
std::optional<long> frame_index_from_filename(std::string_view filename);

// Loads a directory of per-frame JSON documents, a single CSV file, or a
// single JSON frame document. Frames come back ordered by frame index.
KeypointSeries load_series(const std::filesystem::path& source, View view,
                           PersonPolicy policy = PersonPolicy::HighestMeanConfidence);

// Writes one OpenPose document per frame into `directory` using the
// "<stem>_<12-digit index>_keypoints.json" naming scheme.
void write_series_openpose(const KeypointSeries& series,
                           const std::filesystem::path& directory,
                           std::string_view stem);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace aclrisk
