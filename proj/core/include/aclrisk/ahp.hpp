#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "aclrisk/scoring.hpp"

namespace aclrisk {

inline constexpr std::size_t kMinMatrixOrder = 2;
inline constexpr std::size_t kMaxMatrixOrder = 9;
inline constexpr double kReciprocityTolerance = 1e-9;
inline constexpr double kConsistencyThreshold = 0.1;

// Positive reciprocal pairwise comparison matrix, a_ij ~ w_i / w_j.
// Construction only checks squareness; call validate() for the rest.
class JudgmentMatrix {
 public:
  explicit JudgmentMatrix(Eigen::MatrixXd values);

  static JudgmentMatrix from_rows(const std::vector<std::vector<double>>& rows);
  // Perfectly consistent matrix a_ij = w_i / w_j.
  static JudgmentMatrix from_weights(std::span<const double> weights);

  std::size_t order() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  const Eigen::MatrixXd& values() const noexcept { return values_; }
  std::vector<std::vector<double>> rows() const;

 private:
  Eigen::MatrixXd values_;
};

// Accepts "3", "0.25", "1/3".
double parse_ratio(std::string_view text);

// Whitespace- or comma-separated rows, one per line; '#' starts a comment.
JudgmentMatrix parse_matrix_text(std::string_view text);

enum class ViolationKind { Order, NonFinite, Positivity, Diagonal, Reciprocity };

struct Violation {
  ViolationKind kind;
  std::size_t row = 0;  // zero based
  std::size_t col = 0;
  double value = 0.0;

  // Human readable, with 1-based indices.
  std::string describe() const;
};

// Every structural problem of the matrix; empty means valid.
std::vector<Violation> validate(const JudgmentMatrix& matrix);
// Throws InvalidMatrix listing all violations.
void require_valid(const JudgmentMatrix& matrix);

struct WeightVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values.at(i); }
  operator std::span<const double>() const noexcept { return values; }
};

enum class WeightMethod {
  Sum,        // column-normalize, then average rows
  Geometric,  // n-th root of row products, normalized
  Product,    // row products normalized directly
};

std::string_view to_string(WeightMethod method);
std::optional<WeightMethod> parse_weight_method(std::string_view text);

WeightVector weights_sum_method(const JudgmentMatrix& matrix);
WeightVector weights_geometric(const JudgmentMatrix& matrix);
WeightVector weights_product(const JudgmentMatrix& matrix);
WeightVector derive_weights(const JudgmentMatrix& matrix, WeightMethod method);

struct ConsistencyReport {
  double lambda_max = 0.0;
  double ci = 0.0;
  double ri = 0.0;
  double cr = 0.0;
  bool pass = true;
};

// Random consistency index by matrix order (1..9).
double random_index(std::size_t n);

// lambda_max = sum_i (A w)_i / (n w_i); CI = (lambda_max - n) / (n - 1);
// CR = CI / RI with CR = 0 when RI = 0. Throws OrderMismatch.
ConsistencyReport consistency(const JudgmentMatrix& matrix, std::span<const double> weights);

// Weighted total sum_i w_i x_i. Throws OrderMismatch.
double aggregate(std::span<const double> values, std::span<const double> weights);
double aggregate(const GradeVector& grades, std::span<const double> weights);

// Two-level weighting: index i gets criterion_weights[group[i]] times its
// index weight renormalized within its group.
std::vector<double> hierarchical_weights(std::span<const double> index_weights,
                                         std::span<const double> criterion_weights,
                                         std::span<const std::size_t> group);

namespace presets {
// Index-layer judgment matrix over (A1, A2, A3, D1, D2).
JudgmentMatrix index_matrix();
// Criterion-layer judgment matrix.
JudgmentMatrix criterion_matrix();
// Index weights as published alongside the index matrix.
std::vector<double> published_index_weights();
// Weights that reproduce the published per-subject totals.
std::vector<double> table5_compat_weights();
}  // namespace presets

}  // namespace aclrisk
