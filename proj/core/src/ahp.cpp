#include "aclrisk/ahp.hpp"

#include <array>
#include <cmath>
#include <numeric>

#include "aclrisk/error.hpp"
#include "text_util.hpp"

namespace aclrisk {

JudgmentMatrix::JudgmentMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    throw Error(ErrorCode::InvalidMatrix, "judgment matrix must be square");
  }
}

JudgmentMatrix JudgmentMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(row.size()) != n) {
      throw Error(ErrorCode::InvalidMatrix, "row " + std::to_string(i + 1) + " has " +
                                                std::to_string(row.size()) + " entries, expected " +
                                                std::to_string(n));
    }
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = row[static_cast<std::size_t>(j)];
  }
  return JudgmentMatrix(std::move(m));
}

JudgmentMatrix JudgmentMatrix::from_weights(std::span<const double> weights) {
  const auto n = static_cast<Eigen::Index>(weights.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      m(i, j) = i == j ? 1.0 : weights[static_cast<std::size_t>(i)] / weights[static_cast<std::size_t>(j)];
    }
  }
  return JudgmentMatrix(std::move(m));
}

std::vector<std::vector<double>> JudgmentMatrix::rows() const {
  std::vector<std::vector<double>> out(order(), std::vector<double>(order()));
  for (std::size_t i = 0; i < order(); ++i)
    for (std::size_t j = 0; j < order(); ++j) out[i][j] = (*this)(i, j);
  return out;
}

double parse_ratio(std::string_view text) {
  text = detail::trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    if (auto v = detail::parse_double(text)) return *v;
  } else {
    const auto num = detail::parse_double(text.substr(0, slash));
    const auto den = detail::parse_double(text.substr(slash + 1));
    if (num && den && *den != 0.0) return *num / *den;
  }
  throw Error(ErrorCode::InvalidMatrix, "cannot parse ratio \"" + std::string(text) + "\"");
}

JudgmentMatrix parse_matrix_text(std::string_view text) {
  std::vector<std::vector<double>> rows;
  for (auto line : detail::split_lines(text)) {
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == ',')) ++pos;
      const auto start = pos;
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != ',') ++pos;
      if (pos > start) row.push_back(parse_ratio(line.substr(start, pos - start)));
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::InvalidMatrix, "matrix text has no rows");
  return JudgmentMatrix::from_rows(rows);
}

std::string Violation::describe() const {
  const auto at = "(" + std::to_string(row + 1) + "," + std::to_string(col + 1) + ")";
  switch (kind) {
    case ViolationKind::Order:
      return "order " + std::to_string(row) + " outside [2, 9]";
    case ViolationKind::NonFinite:
      return "non-finite entry at " + at;
    case ViolationKind::Positivity:
      return "non-positive entry " + detail::format_double(value) + " at " + at;
    case ViolationKind::Diagonal:
      return "diagonal entry " + detail::format_double(value) + " at " + at + " is not 1";
    case ViolationKind::Reciprocity:
      return "reciprocity violation at " + at + ": a_ij * a_ji = " + detail::format_double(value);
  }
  return "unknown violation";
}

std::vector<Violation> validate(const JudgmentMatrix& matrix) {
  std::vector<Violation> out;
  const std::size_t n = matrix.order();
  if (n < kMinMatrixOrder || n > kMaxMatrixOrder) {
    out.push_back({ViolationKind::Order, n, n, 0.0});
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = matrix(i, j);
      if (!std::isfinite(a)) {
        out.push_back({ViolationKind::NonFinite, i, j, a});
      } else if (a <= 0.0) {
        out.push_back({ViolationKind::Positivity, i, j, a});
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double d = matrix(i, i);
    if (std::isfinite(d) && std::abs(d - 1.0) > kReciprocityTolerance) {
      out.push_back({ViolationKind::Diagonal, i, i, d});
    }
    for (std::size_t j = i + 1; j < n; ++j) {
      const double product = matrix(i, j) * matrix(j, i);
      if (std::isfinite(product) && std::abs(product - 1.0) > kReciprocityTolerance) {
        out.push_back({ViolationKind::Reciprocity, i, j, product});
      }
    }
  }
  return out;
}

void require_valid(const JudgmentMatrix& matrix) {
  const auto violations = validate(matrix);
  if (violations.empty()) return;
  std::string message = "invalid judgment matrix: ";
  for (std::size_t k = 0; k < violations.size(); ++k) {
    if (k > 0) message += "; ";
    message += violations[k].describe();
  }
  throw Error(ErrorCode::InvalidMatrix, message);
}

std::string_view to_string(WeightMethod method) {
  switch (method) {
    case WeightMethod::Sum: return "sum";
    case WeightMethod::Geometric: return "geometric";
    case WeightMethod::Product: return "product";
  }
  return "sum";
}

std::optional<WeightMethod> parse_weight_method(std::string_view text) {
  if (text == "sum") return WeightMethod::Sum;
  if (text == "geometric") return WeightMethod::Geometric;
  if (text == "product") return WeightMethod::Product;
  return std::nullopt;
}

namespace {

WeightVector normalized(const Eigen::VectorXd& raw) {
  const double total = raw.sum();
  WeightVector w;
  w.values.resize(static_cast<std::size_t>(raw.size()));
  for (Eigen::Index i = 0; i < raw.size(); ++i) w.values[static_cast<std::size_t>(i)] = raw(i) / total;
  return w;
}

}  // namespace

WeightVector weights_sum_method(const JudgmentMatrix& matrix) {
  require_valid(matrix);
  const auto& a = matrix.values();
  const Eigen::RowVectorXd column_sums = a.colwise().sum();
  const Eigen::MatrixXd scaled = a.array().rowwise() / column_sums.array();
  return normalized(scaled.rowwise().mean());
}

WeightVector weights_geometric(const JudgmentMatrix& matrix) {
  require_valid(matrix);
  const auto n = static_cast<double>(matrix.order());
  // Row products can overflow for large ratios; work in log space.
  const Eigen::VectorXd roots = (matrix.values().array().log().rowwise().sum() / n).exp();
  return normalized(roots);
}

WeightVector weights_product(const JudgmentMatrix& matrix) {
  require_valid(matrix);
  return normalized(matrix.values().rowwise().prod());
}

WeightVector derive_weights(const JudgmentMatrix& matrix, WeightMethod method) {
  switch (method) {
    case WeightMethod::Sum: return weights_sum_method(matrix);
    case WeightMethod::Geometric: return weights_geometric(matrix);
    case WeightMethod::Product: return weights_product(matrix);
  }
  return weights_sum_method(matrix);
}

double random_index(std::size_t n) {
  static constexpr std::array<double, 9> kRandomIndex{0.00, 0.00, 0.58, 0.90, 1.12,
                                                      1.24, 1.32, 1.41, 1.45};
  if (n < 1 || n > kRandomIndex.size()) {
    throw Error(ErrorCode::OutOfRange, "no random index for order " + std::to_string(n));
  }
  return kRandomIndex[n - 1];
}

ConsistencyReport consistency(const JudgmentMatrix& matrix, std::span<const double> weights) {
  const std::size_t n = matrix.order();
  if (weights.size() != n) {
    throw Error(ErrorCode::OrderMismatch, "matrix order " + std::to_string(n) + " but " +
                                              std::to_string(weights.size()) + " weights");
  }
  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!(weights[i] > 0.0)) {
      throw Error(ErrorCode::OutOfRange, "weights must be strictly positive");
    }
    w(static_cast<Eigen::Index>(i)) = weights[i];
  }
  const Eigen::VectorXd aw = matrix.values() * w;

  ConsistencyReport report;
  const double nd = static_cast<double>(n);
  report.lambda_max = (aw.array() / (nd * w.array())).sum();
  report.ci = n > 1 ? (report.lambda_max - nd) / (nd - 1.0) : 0.0;
  report.ri = random_index(n);
  report.cr = report.ri > 0.0 ? report.ci / report.ri : 0.0;
  report.pass = report.cr < kConsistencyThreshold;
  return report;
}

double aggregate(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) {
    throw Error(ErrorCode::OrderMismatch, std::to_string(values.size()) + " values but " +
                                              std::to_string(weights.size()) + " weights");
  }
  return std::inner_product(values.begin(), values.end(), weights.begin(), 0.0);
}

double aggregate(const GradeVector& grades, std::span<const double> weights) {
  const auto values = grades.as_values();
  return aggregate(std::span<const double>(values), weights);
}

std::vector<double> hierarchical_weights(std::span<const double> index_weights,
                                         std::span<const double> criterion_weights,
                                         std::span<const std::size_t> group) {
  if (group.size() != index_weights.size()) {
    throw Error(ErrorCode::OrderMismatch, "criterion grouping must name a group for every index");
  }
  std::vector<double> group_totals(criterion_weights.size(), 0.0);
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (group[i] >= criterion_weights.size()) {
      throw Error(ErrorCode::OrderMismatch, "index " + std::to_string(i + 1) +
                                                " assigned to unknown criterion " +
                                                std::to_string(group[i] + 1));
    }
    group_totals[group[i]] += index_weights[i];
  }
  std::vector<double> out(index_weights.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double total = group_totals[group[i]];
    out[i] = total > 0.0 ? criterion_weights[group[i]] * index_weights[i] / total : 0.0;
  }
  return out;
}

namespace presets {

JudgmentMatrix index_matrix() {
  return JudgmentMatrix::from_rows({
      {1.0, 2.0, 3.0, 5.0, 5.0},
      {1.0 / 2, 1.0, 2.0, 3.0, 4.0},
      {1.0 / 3, 1.0 / 2, 1.0, 3.0, 2.0},
      {1.0 / 5, 1.0 / 3, 1.0 / 3, 1.0, 2.0},
      {1.0 / 5, 1.0 / 4, 1.0 / 2, 1.0 / 2, 1.0},
  });
}

JudgmentMatrix criterion_matrix() {
  return JudgmentMatrix::from_rows({{1.0, 3.0}, {1.0 / 3, 1.0}});
}

std::vector<double> published_index_weights() { return {0.4267, 0.2574, 0.1602, 0.0886, 0.0671}; }

std::vector<double> table5_compat_weights() { return {0.4267, 0.2574, 0.1602, 0.0860, 0.0671}; }

}  // namespace presets

}  // namespace aclrisk
