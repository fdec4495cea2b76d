#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string_view>

#include "aclrisk/kinematics.hpp"

namespace aclrisk {

// Discrete item grade. The numeric value is what enters the weighted total.
enum class Grade : int { Poor = 1, Good = 5, Excellent = 9 };

inline constexpr int value(Grade g) noexcept { return static_cast<int>(g); }

// Throws InvalidGrade for anything other than 1, 5, 9.
Grade grade_from_int(int raw);

enum class GradeLabel { Excellent, Good, Poor };

std::string_view to_string(GradeLabel label);
GradeLabel grade_label(Grade grade);
GradeLabel grade_label(int raw);

// Scoring items in output order: A1 (p1), A2 (p2), A3 (s4), D1 (d1), D2 (d2).
inline constexpr std::size_t kIndexCount = 5;

struct GradeVector {
  std::array<Grade, kIndexCount> items{Grade::Poor, Grade::Poor, Grade::Poor, Grade::Poor,
                                       Grade::Poor};

  Grade operator[](std::size_t i) const { return items.at(i); }
  std::array<double, kIndexCount> as_values() const;

  friend bool operator==(const GradeVector&, const GradeVector&) = default;
};

struct ThresholdConfig {
  double cosine_hi = -0.5;
  double cosine_lo = -std::sqrt(3.0) / 2.0;
  double distance_lo = 30.0;  // px
  double distance_hi = 50.0;  // px
  // When set, d1 and d2 are divided by the mean shoulder width and graded
  // against the unitless thresholds below instead.
  bool normalize_distances = false;
  std::optional<double> normalized_distance_lo;
  std::optional<double> normalized_distance_hi;

  // Throws InvalidConfig when the intervals are not ordered.
  void validate() const;
};

// 9 on (hi, 1], 5 on (lo, hi], 1 on [-1, lo]. Throws OutOfRange outside [-1, 1].
Grade grade_cosine_sagittal(double p, const ThresholdConfig& cfg = {});
// Reversed orientation: 9 on [-1, lo], 5 on (lo, hi], 1 on (hi, 1].
Grade grade_cosine_frontal(double s4, const ThresholdConfig& cfg = {});
// 9 below lo, 5 on [lo, hi), 1 from hi. Throws OutOfRange for negative input.
Grade grade_distance(double dmax, const ThresholdConfig& cfg = {});
Grade grade_distance(double dmax, double lo, double hi);

struct FeatureValues {
  double p1 = -1.0;
  double p2 = -1.0;
  double s4 = -1.0;
  double d1 = 0.0;
  double d2 = 0.0;
  // Only used by the normalized distance mode.
  double mean_shoulder_width = 0.0;
};

FeatureValues feature_values(const SagittalFeatures& sagittal, const FrontalFeatures& frontal);

GradeVector grade_all(const FeatureValues& features, const ThresholdConfig& cfg = {});
GradeVector grade_all(const SagittalFeatures& sagittal, const FrontalFeatures& frontal,
                      const ThresholdConfig& cfg = {});

// Sagittal-only (A1, A2) and frontal-only (A3, D1, D2) grades for partial runs.
std::array<Grade, 2> grade_sagittal(const SagittalFeatures& sagittal, const ThresholdConfig& cfg = {});
std::array<Grade, 3> grade_frontal(const FrontalFeatures& frontal, const ThresholdConfig& cfg = {});

}  // namespace aclrisk
