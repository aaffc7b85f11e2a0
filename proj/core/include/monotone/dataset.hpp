#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace monotone {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/// Raised on malformed inputs: shape mismatches, non-finite values, empty sets.
class DataError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Feature rows plus integer class labels in [0, class_count).
class LabeledDataset {
 public:
  LabeledDataset() = default;
  LabeledDataset(Matrix features, Labels labels, int class_count);

  /// Empty dataset with a fixed column count, useful as an append target.
  static LabeledDataset empty(Eigen::Index dims, int class_count);

  [[nodiscard]] const Matrix& features() const noexcept { return features_; }
  [[nodiscard]] const Labels& labels() const noexcept { return labels_; }
  [[nodiscard]] int class_count() const noexcept { return class_count_; }
  [[nodiscard]] Eigen::Index rows() const noexcept { return features_.rows(); }
  [[nodiscard]] Eigen::Index dims() const noexcept { return features_.cols(); }
  [[nodiscard]] bool empty() const noexcept { return features_.rows() == 0; }

  /// Rows selected by index, in the given order.
  [[nodiscard]] LabeledDataset subset(std::span<const Eigen::Index> rows) const;

  /// Row-wise concatenation; both sides must agree on dims and class_count.
  [[nodiscard]] static LabeledDataset concat(const LabeledDataset& top,
                                             const LabeledDataset& bottom);

  /// Per-class row counts.
  [[nodiscard]] std::vector<Eigen::Index> class_counts() const;

 private:
  Matrix features_;
  Labels labels_;
  int class_count_ = 2;
};

}  // namespace monotone
