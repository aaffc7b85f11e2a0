#include "monotone/dataset.hpp"

#include <string>

namespace monotone {

LabeledDataset::LabeledDataset(Matrix features, Labels labels, int class_count)
    : features_(std::move(features)), labels_(std::move(labels)), class_count_(class_count) {
  if (class_count_ < 2) {
    throw DataError("class_count must be at least 2");
  }
  if (static_cast<Eigen::Index>(labels_.size()) != features_.rows()) {
    throw DataError("label count " + std::to_string(labels_.size()) +
                    " does not match row count " + std::to_string(features_.rows()));
  }
  for (int y : labels_) {
    if (y < 0 || y >= class_count_) {
      throw DataError("label " + std::to_string(y) + " outside [0, " +
                      std::to_string(class_count_) + ")");
    }
  }
}

LabeledDataset LabeledDataset::empty(Eigen::Index dims, int class_count) {
  return LabeledDataset(Matrix(0, dims), {}, class_count);
}

LabeledDataset LabeledDataset::subset(std::span<const Eigen::Index> rows) const {
  Matrix x(static_cast<Eigen::Index>(rows.size()), dims());
  Labels y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Eigen::Index r = rows[i];
    if (r < 0 || r >= this->rows()) {
      throw DataError("subset row index out of range");
    }
    x.row(static_cast<Eigen::Index>(i)) = features_.row(r);
    y[i] = labels_[static_cast<std::size_t>(r)];
  }
  return LabeledDataset(std::move(x), std::move(y), class_count_);
}

LabeledDataset LabeledDataset::concat(const LabeledDataset& top, const LabeledDataset& bottom) {
  if (top.dims() != bottom.dims()) {
    throw DataError("cannot concatenate datasets with different dimensionality");
  }
  if (top.class_count() != bottom.class_count()) {
    throw DataError("cannot concatenate datasets with different class counts");
  }
  Matrix x(top.rows() + bottom.rows(), top.dims());
  x.topRows(top.rows()) = top.features_;
  x.bottomRows(bottom.rows()) = bottom.features_;
  Labels y;
  y.reserve(top.labels_.size() + bottom.labels_.size());
  y.insert(y.end(), top.labels_.begin(), top.labels_.end());
  y.insert(y.end(), bottom.labels_.begin(), bottom.labels_.end());
  return LabeledDataset(std::move(x), std::move(y), top.class_count());
}

std::vector<Eigen::Index> LabeledDataset::class_counts() const {
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(class_count_), 0);
  for (int y : labels_) {
    ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

}  // namespace monotone
