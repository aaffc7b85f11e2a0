#pragma once

// Least-squares classification on +/-1 targets with an unpenalized intercept.
//
// Training goes through SufficientStats (count, feature sums, Gram matrix,
// feature-target cross products) so that wrappers which grow their training
// set every round can update in O(rows * d^2) instead of refitting from rows.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "monotone/dataset.hpp"

namespace monotone {

/// Linear scorer: one output column for binary problems, one per class otherwise.
class LinearModel {
 public:
  LinearModel() = default;
  LinearModel(Eigen::MatrixXd weights, Eigen::VectorXd intercepts, int class_count,
              std::int64_t trained_on = 0);

  [[nodiscard]] const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  [[nodiscard]] const Eigen::VectorXd& intercepts() const noexcept { return intercepts_; }
  [[nodiscard]] int class_count() const noexcept { return class_count_; }
  [[nodiscard]] Eigen::Index dims() const noexcept { return weights_.rows(); }
  [[nodiscard]] std::int64_t trained_on() const noexcept { return trained_on_; }
  [[nodiscard]] bool is_binary() const noexcept { return class_count_ == 2 && weights_.cols() == 1; }

  /// Real-valued outputs, rows x output columns.
  [[nodiscard]] Eigen::MatrixXd scores(const Matrix& features) const;

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd intercepts_;
  int class_count_ = 2;
  std::int64_t trained_on_ = 0;
};

/// Number of regression targets for a problem: 1 for binary, class_count otherwise.
[[nodiscard]] inline Eigen::Index output_columns(int class_count) noexcept {
  return class_count == 2 ? 1 : class_count;
}

/// Additive sufficient statistics for the least-squares normal equations.
class SufficientStats {
 public:
  SufficientStats() = default;
  SufficientStats(Eigen::Index dims, int class_count);

  /// Accumulate rows. Throws DataError("invalid data") on non-finite features.
  void add(const LabeledDataset& data);
  SufficientStats& operator+=(const SufficientStats& other);

  [[nodiscard]] std::int64_t count() const noexcept { return count_; }
  [[nodiscard]] Eigen::Index dims() const noexcept { return sum_x_.size(); }
  [[nodiscard]] int class_count() const noexcept { return class_count_; }

  /// Centered Gram matrix (full symmetric) and centered cross products.
  [[nodiscard]] Eigen::MatrixXd centered_gram() const;
  [[nodiscard]] Eigen::MatrixXd centered_cross() const;
  [[nodiscard]] Eigen::VectorXd mean_x() const;
  [[nodiscard]] Eigen::VectorXd mean_y() const;

  /// The raw rows, kept only while count() <= dims() (the rank-deficient regime).
  [[nodiscard]] bool has_rows() const noexcept { return count_ > 0 && rows_kept_; }
  [[nodiscard]] const Matrix& rows() const noexcept { return rows_x_; }
  [[nodiscard]] const Eigen::MatrixXd& row_targets() const noexcept { return rows_t_; }

 private:
  void keep_rows(const Matrix& x, const Eigen::MatrixXd& t);

  std::int64_t count_ = 0;
  int class_count_ = 2;
  Eigen::VectorXd sum_x_;
  Eigen::MatrixXd gram_;  // lower triangle is authoritative
  Eigen::MatrixXd cross_;
  Eigen::VectorXd sum_y_;
  bool rows_kept_ = true;
  Matrix rows_x_;
  Eigen::MatrixXd rows_t_;
};

/// Targets +1 / -1 for one-vs-all (or the single binary column).
[[nodiscard]] Eigen::MatrixXd regression_targets(const Labels& labels, int class_count);

/// Solve (C + lambda I) W = R on centered statistics. lambda = 0 with a singular
/// Gram matrix yields the minimum-norm solution (eigenvalues below
/// max(m, d) * eps * largest eigenvalue are dropped).
[[nodiscard]] LinearModel fit_from_stats(const SufficientStats& stats, double lambda);

[[nodiscard]] LinearModel fit_least_squares(const LabeledDataset& train, double lambda);

/// One tridiagonal reduction C = Q T Q^T of the centered Gram matrix, reused
/// for a whole lambda grid: each positive lambda costs a tridiagonal solve.
/// lambda = 0 falls back to fit_from_stats.
class RidgePath {
 public:
  explicit RidgePath(const SufficientStats& stats);
  [[nodiscard]] LinearModel fit(double lambda) const;

 private:
  SufficientStats stats_;
  Eigen::Tridiagonalization<Eigen::MatrixXd> tridiagonal_;
  Eigen::VectorXd diagonal_;
  Eigen::VectorXd subdiagonal_;
  Eigen::MatrixXd projected_cross_;  // Q^T R
  Eigen::VectorXd mean_x_;
  Eigen::VectorXd mean_y_;
};

/// Binary: score >= 0 -> class 1. Multiclass: argmax, lowest index on ties.
[[nodiscard]] Labels predict(const LinearModel& model, const Matrix& features);

/// Per-row correctness of the model's predictions.
[[nodiscard]] std::vector<bool> correctness(const LinearModel& model, const LabeledDataset& data);

[[nodiscard]] std::int64_t count_errors(const LinearModel& model, const LabeledDataset& data);

/// Zero-one loss averaged over rows. Throws DataError("empty evaluation set").
[[nodiscard]] double empirical_error(const LinearModel& model, const LabeledDataset& data);

}  // namespace monotone
