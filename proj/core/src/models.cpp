#include "monotone/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace monotone {

namespace {

constexpr double kLltMinRcond = 1e-10;

void require_same_dims(const LinearModel& model, Eigen::Index cols) {
  if (model.dims() != cols) {
    throw DataError("dimension mismatch: model expects " + std::to_string(model.dims()) +
                    " features, got " + std::to_string(cols));
  }
}

LinearModel assemble(Eigen::MatrixXd weights, const Eigen::VectorXd& mean_x,
                     const Eigen::VectorXd& mean_y, int class_count, std::int64_t count) {
  Eigen::VectorXd intercepts = mean_y - weights.transpose() * mean_x;
  return LinearModel(std::move(weights), std::move(intercepts), class_count, count);
}

// W = V diag(f(s)) V^T R with the pseudo-inverse cutoff for lambda == 0.
Eigen::MatrixXd spectral_solve(const Eigen::MatrixXd& vectors, const Eigen::VectorXd& values,
                               const Eigen::MatrixXd& projected_cross, double lambda,
                               std::int64_t count) {
  const double largest = values.size() > 0 ? std::max(values.maxCoeff(), 0.0) : 0.0;
  const double cutoff = static_cast<double>(std::max<std::int64_t>(count, values.size())) *
                        std::numeric_limits<double>::epsilon() * largest;
  Eigen::VectorXd inv(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double s = std::max(values[i], 0.0);
    if (lambda > 0.0) {
      inv[i] = 1.0 / (s + lambda);
    } else {
      inv[i] = s > cutoff ? 1.0 / s : 0.0;
    }
  }
  return vectors * (inv.asDiagonal() * projected_cross);
}

// With m <= d rows the minimum-norm solution lives in the row space:
// W = Xc^T K^+ Tc with K = Xc Xc^T, an m x m problem. K shares its nonzero
// spectrum with the Gram matrix, so the cutoff matches spectral_solve.
LinearModel minimum_norm_from_rows(const SufficientStats& stats) {
  const Eigen::VectorXd mean_x = stats.mean_x();
  const Eigen::VectorXd mean_y = stats.mean_y();
  const Eigen::MatrixXd xc = stats.rows().rowwise() - mean_x.transpose();
  const Eigen::MatrixXd tc = stats.row_targets().rowwise() - mean_y.transpose();
  Eigen::MatrixXd k(xc.rows(), xc.rows());
  k.setZero();
  k.selfadjointView<Eigen::Lower>().rankUpdate(xc);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k.selfadjointView<Eigen::Lower>());
  const Eigen::VectorXd& values = eig.eigenvalues();
  const double largest = std::max(values.maxCoeff(), 0.0);
  const double cutoff = static_cast<double>(std::max<std::int64_t>(stats.count(), stats.dims())) *
                        std::numeric_limits<double>::epsilon() * largest;
  Eigen::VectorXd inv(values.size());
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    inv[i] = values[i] > cutoff ? 1.0 / values[i] : 0.0;
  }
  const Eigen::MatrixXd dual =
      eig.eigenvectors() * (inv.asDiagonal() * (eig.eigenvectors().transpose() * tc));
  return assemble(xc.transpose() * dual, mean_x, mean_y, stats.class_count(), stats.count());
}

}  // namespace

LinearModel::LinearModel(Eigen::MatrixXd weights, Eigen::VectorXd intercepts, int class_count,
                         std::int64_t trained_on)
    : weights_(std::move(weights)),
      intercepts_(std::move(intercepts)),
      class_count_(class_count),
      trained_on_(trained_on) {
  if (weights_.cols() != intercepts_.size()) {
    throw DataError("weight column count must equal intercept count");
  }
  if (weights_.cols() != output_columns(class_count_)) {
    throw DataError("output column count does not match class count");
  }
}

Eigen::MatrixXd LinearModel::scores(const Matrix& features) const {
  require_same_dims(*this, features.cols());
  Eigen::MatrixXd out = features * weights_;
  out.rowwise() += intercepts_.transpose();
  return out;
}

SufficientStats::SufficientStats(Eigen::Index dims, int class_count)
    : class_count_(class_count),
      sum_x_(Eigen::VectorXd::Zero(dims)),
      gram_(Eigen::MatrixXd::Zero(dims, dims)),
      cross_(Eigen::MatrixXd::Zero(dims, output_columns(class_count))),
      sum_y_(Eigen::VectorXd::Zero(output_columns(class_count))) {}

void SufficientStats::add(const LabeledDataset& data) {
  if (data.empty()) {
    return;
  }
  if (data.dims() != dims()) {
    throw DataError("dimension mismatch while accumulating statistics");
  }
  if (data.class_count() != class_count_) {
    throw DataError("class count mismatch while accumulating statistics");
  }
  const Matrix& x = data.features();
  if (!x.allFinite()) {
    throw DataError("invalid data");
  }
  const Eigen::MatrixXd t = regression_targets(data.labels(), class_count_);
  keep_rows(x, t);
  count_ += data.rows();
  sum_x_ += x.colwise().sum().transpose();
  gram_.selfadjointView<Eigen::Lower>().rankUpdate(x.transpose());
  cross_.noalias() += x.transpose() * t;
  sum_y_ += t.colwise().sum().transpose();
}

// Call before count_ is advanced.
void SufficientStats::keep_rows(const Matrix& x, const Eigen::MatrixXd& t) {
  if (!rows_kept_) {
    return;
  }
  if (count_ + x.rows() > dims()) {
    rows_kept_ = false;
    rows_x_.resize(0, 0);
    rows_t_.resize(0, 0);
    return;
  }
  if (rows_x_.rows() == 0) {
    rows_x_ = x;
    rows_t_ = t;
    return;
  }
  Matrix grown_x(rows_x_.rows() + x.rows(), x.cols());
  grown_x << rows_x_, x;
  Eigen::MatrixXd grown_t(rows_t_.rows() + t.rows(), t.cols());
  grown_t << rows_t_, t;
  rows_x_ = std::move(grown_x);
  rows_t_ = std::move(grown_t);
}

SufficientStats& SufficientStats::operator+=(const SufficientStats& other) {
  if (other.count_ == 0) {
    return *this;
  }
  if (other.dims() != dims() || other.class_count_ != class_count_) {
    throw DataError("cannot merge statistics of different shapes");
  }
  if (other.rows_kept_) {
    keep_rows(other.rows_x_, other.rows_t_);
  } else {
    rows_kept_ = false;
    rows_x_.resize(0, 0);
    rows_t_.resize(0, 0);
  }
  count_ += other.count_;
  sum_x_ += other.sum_x_;
  gram_.triangularView<Eigen::Lower>() += other.gram_;
  cross_ += other.cross_;
  sum_y_ += other.sum_y_;
  return *this;
}

Eigen::VectorXd SufficientStats::mean_x() const {
  return count_ > 0 ? Eigen::VectorXd(sum_x_ / static_cast<double>(count_))
                    : Eigen::VectorXd::Zero(dims());
}

Eigen::VectorXd SufficientStats::mean_y() const {
  return count_ > 0 ? Eigen::VectorXd(sum_y_ / static_cast<double>(count_))
                    : Eigen::VectorXd::Zero(sum_y_.size());
}

Eigen::MatrixXd SufficientStats::centered_gram() const {
  Eigen::MatrixXd c = gram_.selfadjointView<Eigen::Lower>();
  if (count_ > 0) {
    c.noalias() -= sum_x_ * sum_x_.transpose() / static_cast<double>(count_);
  }
  return c;
}

Eigen::MatrixXd SufficientStats::centered_cross() const {
  Eigen::MatrixXd r = cross_;
  if (count_ > 0) {
    r.noalias() -= sum_x_ * sum_y_.transpose() / static_cast<double>(count_);
  }
  return r;
}

Eigen::MatrixXd regression_targets(const Labels& labels, int class_count) {
  const Eigen::Index cols = output_columns(class_count);
  Eigen::MatrixXd t = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(labels.size()), cols, -1.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    if (cols == 1) {
      t(row, 0) = labels[i] == 1 ? 1.0 : -1.0;
    } else {
      t(row, labels[i]) = 1.0;
    }
  }
  return t;
}

LinearModel fit_from_stats(const SufficientStats& stats, double lambda) {
  if (stats.count() == 0) {
    throw DataError("empty training set");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DataError("lambda must be a finite nonnegative number");
  }
  const Eigen::Index d = stats.dims();
  Eigen::MatrixXd gram = stats.centered_gram();
  const Eigen::MatrixXd cross = stats.centered_cross();

  // Cholesky is only attempted where the centered Gram matrix can be full rank.
  if (lambda > 0.0 || stats.count() - 1 >= d) {
    Eigen::MatrixXd regularized = gram;
    regularized.diagonal().array() += lambda;
    Eigen::LLT<Eigen::MatrixXd> llt(regularized);
    if (llt.info() == Eigen::Success && llt.rcond() > kLltMinRcond) {
      return assemble(llt.solve(cross), stats.mean_x(), stats.mean_y(), stats.class_count(),
                      stats.count());
    }
  }
  if (lambda == 0.0 && stats.has_rows()) {
    return minimum_norm_from_rows(stats);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::MatrixXd projected = eig.eigenvectors().transpose() * cross;
  return assemble(spectral_solve(eig.eigenvectors(), eig.eigenvalues(), projected, lambda,
                                 stats.count()),
                  stats.mean_x(), stats.mean_y(), stats.class_count(), stats.count());
}

LinearModel fit_least_squares(const LabeledDataset& train, double lambda) {
  if (train.empty()) {
    throw DataError("empty training set");
  }
  SufficientStats stats(train.dims(), train.class_count());
  stats.add(train);
  return fit_from_stats(stats, lambda);
}

RidgePath::RidgePath(const SufficientStats& stats)
    : stats_(stats), mean_x_(stats.mean_x()), mean_y_(stats.mean_y()) {
  if (stats.count() == 0) {
    throw DataError("empty training set");
  }
  tridiagonal_.compute(stats.centered_gram());
  diagonal_ = tridiagonal_.diagonal();
  subdiagonal_ = tridiagonal_.subDiagonal();
  projected_cross_ = tridiagonal_.matrixQ().transpose() * stats.centered_cross();
}

LinearModel RidgePath::fit(double lambda) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw DataError("lambda must be a finite nonnegative number");
  }
  if (lambda == 0.0) {
    return fit_from_stats(stats_, 0.0);
  }
  // T + lambda I is symmetric positive definite: LDL^T without pivoting.
  const Eigen::Index n = diagonal_.size();
  Eigen::VectorXd pivots(n);
  Eigen::VectorXd multipliers(n > 0 ? n - 1 : 0);
  pivots[0] = diagonal_[0] + lambda;
  for (Eigen::Index i = 1; i < n; ++i) {
    multipliers[i - 1] = subdiagonal_[i - 1] / pivots[i - 1];
    pivots[i] = diagonal_[i] + lambda - multipliers[i - 1] * subdiagonal_[i - 1];
  }
  Eigen::MatrixXd y = projected_cross_;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    for (Eigen::Index i = 1; i < n; ++i) y(i, c) -= multipliers[i - 1] * y(i - 1, c);
    for (Eigen::Index i = 0; i < n; ++i) y(i, c) /= pivots[i];
    for (Eigen::Index i = n - 2; i >= 0; --i) y(i, c) -= multipliers[i] * y(i + 1, c);
  }
  Eigen::MatrixXd weights = tridiagonal_.matrixQ() * y;
  return assemble(std::move(weights), mean_x_, mean_y_, stats_.class_count(), stats_.count());
}

Labels predict(const LinearModel& model, const Matrix& features) {
  const Eigen::MatrixXd s = model.scores(features);
  Labels out(static_cast<std::size_t>(s.rows()));
  if (s.cols() == 1) {
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      out[static_cast<std::size_t>(i)] = s(i, 0) >= 0.0 ? 1 : 0;
    }
    return out;
  }
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < s.cols(); ++c) {
      if (s(i, c) > s(i, best)) {
        best = c;
      }
    }
    out[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return out;
}

std::vector<bool> correctness(const LinearModel& model, const LabeledDataset& data) {
  const Labels predicted = predict(model, data.features());
  std::vector<bool> ok(predicted.size());
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ok[i] = predicted[i] == data.labels()[i];
  }
  return ok;
}

std::int64_t count_errors(const LinearModel& model, const LabeledDataset& data) {
  const Labels predicted = predict(model, data.features());
  std::int64_t errors = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    errors += predicted[i] != data.labels()[i] ? 1 : 0;
  }
  return errors;
}

double empirical_error(const LinearModel& model, const LabeledDataset& data) {
  if (data.empty()) {
    throw DataError("empty evaluation set");
  }
  return static_cast<double>(count_errors(model, data)) / static_cast<double>(data.rows());
}

}  // namespace monotone
