#include "aclrisk/scoring.hpp"

#include <string>

#include "aclrisk/error.hpp"

namespace aclrisk {

Grade grade_from_int(int raw) {
  switch (raw) {
    case 1: return Grade::Poor;
    case 5: return Grade::Good;
    case 9: return Grade::Excellent;
    default: throw Error(ErrorCode::InvalidGrade, "grade must be 1, 5 or 9, got " + std::to_string(raw));
  }
}

std::string_view to_string(GradeLabel label) {
  switch (label) {
    case GradeLabel::Excellent: return "excellent";
    case GradeLabel::Good: return "good";
    case GradeLabel::Poor: return "poor";
  }
  return "poor";
}

GradeLabel grade_label(Grade grade) {
  switch (grade) {
    case Grade::Excellent: return GradeLabel::Excellent;
    case Grade::Good: return GradeLabel::Good;
    case Grade::Poor: return GradeLabel::Poor;
  }
  throw Error(ErrorCode::InvalidGrade, "unknown grade");
}

GradeLabel grade_label(int raw) { return grade_label(grade_from_int(raw)); }

std::array<double, kIndexCount> GradeVector::as_values() const {
  std::array<double, kIndexCount> out{};
  for (std::size_t i = 0; i < kIndexCount; ++i) out[i] = value(items[i]);
  return out;
}

void ThresholdConfig::validate() const {
  if (!(cosine_lo < cosine_hi) || cosine_lo < -1.0 || cosine_hi > 1.0) {
    throw Error(ErrorCode::InvalidConfig, "cosine thresholds must satisfy -1 <= lo < hi <= 1");
  }
  if (!(distance_lo > 0.0 && distance_lo < distance_hi)) {
    throw Error(ErrorCode::InvalidConfig, "distance thresholds must satisfy 0 < lo < hi");
  }
  if (normalize_distances) {
    if (!normalized_distance_lo || !normalized_distance_hi) {
      throw Error(ErrorCode::InvalidConfig,
                  "normalized distance mode needs normalized_distance_lo and normalized_distance_hi");
    }
    if (!(*normalized_distance_lo > 0.0 && *normalized_distance_lo < *normalized_distance_hi)) {
      throw Error(ErrorCode::InvalidConfig, "normalized distance thresholds must satisfy 0 < lo < hi");
    }
  }
}

namespace {

void check_cosine(double c) {
  if (!(c >= -1.0 && c <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "cosine " + std::to_string(c) + " outside [-1, 1]");
  }
}

}  // namespace

Grade grade_cosine_sagittal(double p, const ThresholdConfig& cfg) {
  check_cosine(p);
  if (p > cfg.cosine_hi) return Grade::Excellent;
  if (p > cfg.cosine_lo) return Grade::Good;
  return Grade::Poor;
}

Grade grade_cosine_frontal(double s4, const ThresholdConfig& cfg) {
  check_cosine(s4);
  if (s4 <= cfg.cosine_lo) return Grade::Excellent;
  if (s4 <= cfg.cosine_hi) return Grade::Good;
  return Grade::Poor;
}

Grade grade_distance(double dmax, double lo, double hi) {
  if (!(dmax >= 0.0)) {
    throw Error(ErrorCode::OutOfRange, "distance " + std::to_string(dmax) + " is negative");
  }
  if (dmax < lo) return Grade::Excellent;
  if (dmax < hi) return Grade::Good;
  return Grade::Poor;
}

Grade grade_distance(double dmax, const ThresholdConfig& cfg) {
  return grade_distance(dmax, cfg.distance_lo, cfg.distance_hi);
}

FeatureValues feature_values(const SagittalFeatures& sagittal, const FrontalFeatures& frontal) {
  return {sagittal.p1, sagittal.p2, frontal.s4_peak, frontal.d1, frontal.d2,
          frontal.mean_shoulder_width};
}

namespace {

std::array<Grade, 2> distance_grades(double d1, double d2, double shoulder,
                                     const ThresholdConfig& cfg) {
  if (!cfg.normalize_distances) return {grade_distance(d1, cfg), grade_distance(d2, cfg)};
  cfg.validate();
  if (!(shoulder > 0.0)) {
    throw Error(ErrorCode::DegenerateVector, "mean shoulder width is zero; cannot normalize");
  }
  const double lo = *cfg.normalized_distance_lo;
  const double hi = *cfg.normalized_distance_hi;
  return {grade_distance(d1 / shoulder, lo, hi), grade_distance(d2 / shoulder, lo, hi)};
}

}  // namespace

GradeVector grade_all(const FeatureValues& f, const ThresholdConfig& cfg) {
  const auto d = distance_grades(f.d1, f.d2, f.mean_shoulder_width, cfg);
  return GradeVector{{grade_cosine_sagittal(f.p1, cfg), grade_cosine_sagittal(f.p2, cfg),
                      grade_cosine_frontal(f.s4, cfg), d[0], d[1]}};
}

GradeVector grade_all(const SagittalFeatures& sagittal, const FrontalFeatures& frontal,
                      const ThresholdConfig& cfg) {
  return grade_all(feature_values(sagittal, frontal), cfg);
}

std::array<Grade, 2> grade_sagittal(const SagittalFeatures& s, const ThresholdConfig& cfg) {
  return {grade_cosine_sagittal(s.p1, cfg), grade_cosine_sagittal(s.p2, cfg)};
}

std::array<Grade, 3> grade_frontal(const FrontalFeatures& f, const ThresholdConfig& cfg) {
  const auto d = distance_grades(f.d1, f.d2, f.mean_shoulder_width, cfg);
  return {grade_cosine_frontal(f.s4_peak, cfg), d[0], d[1]};
}

}  // namespace aclrisk
