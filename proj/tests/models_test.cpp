#include <gtest/gtest.h>

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "monotone/data.hpp"
#include "monotone/models.hpp"
#include "monotone/wrappers.hpp"
#include "oracles.hpp"

using namespace monotone;

namespace {

LabeledDataset make(std::initializer_list<std::initializer_list<double>> rows, Labels labels,
                    int class_count = 2) {
  Matrix x(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (double v : row) x(i, j++) = v;
    ++i;
  }
  return LabeledDataset(std::move(x), std::move(labels), class_count);
}

LabeledDataset gaussian(Eigen::Index m, Eigen::Index d, int class_count, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::normal_distribution<double> n01;
  std::uniform_int_distribution<int> pick(0, class_count - 1);
  Matrix x(m, d);
  Labels y(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    y[static_cast<std::size_t>(i)] = pick(rng);
    for (Eigen::Index j = 0; j < d; ++j) x(i, j) = n01(rng) + 0.7 * y[static_cast<std::size_t>(i)];
  }
  return LabeledDataset(std::move(x), std::move(y), class_count);
}

Eigen::MatrixXd stacked(const LinearModel& m) {
  Eigen::MatrixXd out(m.dims() + 1, m.weights().cols());
  out.topRows(m.dims()) = m.weights();
  out.bottomRows(1) = m.intercepts().transpose();
  return out;
}

}  // namespace

TEST(FitLeastSquares, InterpolatesTwoPoints) {
  const auto train = make({{0.0}, {1.0}}, {0, 1});
  const LinearModel m = fit_least_squares(train, 0.0);
  EXPECT_NEAR(m.weights()(0, 0), 2.0, 1e-12);
  EXPECT_NEAR(m.intercepts()(0), -1.0, 1e-12);
  EXPECT_EQ(predict(m, train.features()), (Labels{0, 1}));
}

TEST(FitLeastSquares, RidgeLeavesInterceptUnpenalized) {
  const auto train = make({{-1.0}, {1.0}}, {0, 1});
  const LinearModel m = fit_least_squares(train, 1.0);
  const Eigen::MatrixXd ref = oracle::ridge_with_intercept(
      train.features(), regression_targets(train.labels(), 2), 1.0);
  EXPECT_NEAR(m.weights()(0, 0), 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.intercepts()(0), 0.0, 1e-12);
  EXPECT_NEAR(ref(0, 0), 2.0 / 3.0, 1e-12);
}

TEST(FitLeastSquares, SingleSampleHasNoComponentOffItsDirection) {
  const auto train = make({{1.0, 0.0}}, {1});
  const LinearModel m = fit_least_squares(train, 0.0);
  EXPECT_NEAR(m.weights()(1, 0), 0.0, 1e-12);
}

TEST(FitLeastSquares, Errors) {
  EXPECT_THROW(
      {
        try {
          (void)fit_least_squares(LabeledDataset::empty(3, 2), 0.0);
        } catch (const DataError& e) {
          EXPECT_STREQ(e.what(), "empty training set");
          throw;
        }
      },
      DataError);
  auto bad = make({{1.0, std::numeric_limits<double>::quiet_NaN()}}, {1});
  EXPECT_THROW(
      {
        try {
          (void)fit_least_squares(bad, 0.0);
        } catch (const DataError& e) {
          EXPECT_STREQ(e.what(), "invalid data");
          throw;
        }
      },
      DataError);
  EXPECT_THROW((void)fit_least_squares(make({{1.0}}, {1}), -1.0), DataError);
}

TEST(FitLeastSquares, MatchesIndependentSolver) {
  for (double lambda : {0.0, 1e-3, 1.0, 100.0}) {
    for (auto [m, d] : {std::pair<Eigen::Index, Eigen::Index>{40, 5}, {8, 20}, {21, 20}}) {
      const auto data = gaussian(m, d, 2, static_cast<std::uint64_t>(m * 100 + d));
      const LinearModel fit = fit_least_squares(data, lambda);
      const Eigen::MatrixXd ref =
          oracle::ridge_with_intercept(data.features(), regression_targets(data.labels(), 2), lambda);
      EXPECT_LT((stacked(fit) - ref).norm(), 1e-7 * (1.0 + ref.norm()))
          << "lambda=" << lambda << " m=" << m << " d=" << d;
    }
  }
}

TEST(FitLeastSquares, NormalEquationResidual) {
  const auto data = gaussian(200, 10, 2, 7);
  const LinearModel fit = fit_least_squares(data, 0.0);
  Eigen::MatrixXd design(data.rows(), data.dims() + 1);
  design.leftCols(data.dims()) = data.features();
  design.rightCols(1).setOnes();
  const Eigen::MatrixXd t = regression_targets(data.labels(), 2);
  const Eigen::MatrixXd residual = design.transpose() * (design * stacked(fit) - t);
  EXPECT_LT(residual.norm(), 1e-8 * (design.transpose() * t).norm());
}

TEST(FitLeastSquares, RidgeShrinksWeights) {
  const auto data = gaussian(30, 15, 2, 11);
  double previous = std::numeric_limits<double>::infinity();
  for (double lambda : log10_grid(-5.0, 5.0, 0.5)) {
    const double norm = fit_least_squares(data, lambda).weights().norm();
    EXPECT_LE(norm, previous * (1.0 + 1e-9)) << lambda;
    previous = norm;
  }
}

TEST(FitLeastSquares, MinimumNormInterpolant) {
  const auto data = gaussian(10, 30, 2, 13);
  const LinearModel fit = fit_least_squares(data, 0.0);
  const Eigen::MatrixXd t = regression_targets(data.labels(), 2);
  const Eigen::MatrixXd pred = fit.scores(data.features());
  EXPECT_LT((pred - t).norm(), 1e-8);

  // Perturbations orthogonal to the centered row space keep interpolating but grow the norm.
  const Eigen::MatrixXd xc = data.features().rowwise() - data.features().colwise().mean();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(xc);
  const Eigen::MatrixXd null = lu.kernel();
  Rng rng = make_rng(5);
  std::normal_distribution<double> n01;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd coef(null.cols());
    for (Eigen::Index i = 0; i < coef.size(); ++i) coef[i] = n01(rng);
    const Eigen::VectorXd other = fit.weights().col(0) + null * coef;
    EXPECT_LT((xc * (other - fit.weights().col(0))).norm(), 1e-8);
    EXPECT_LE(fit.weights().col(0).norm(), other.norm() + 1e-12);
  }
}

TEST(FitLeastSquares, BinaryAgreesWithOneVsAll) {
  const auto data = gaussian(60, 4, 2, 17);
  const auto test = gaussian(500, 4, 2, 18);
  const LinearModel binary = fit_least_squares(data, 0.0);
  // Independent one-vs-all: one +/-1 regression per class, argmax, lowest index on ties.
  Eigen::MatrixXd t(data.rows(), 2);
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const int y = data.labels()[static_cast<std::size_t>(i)];
    t(i, 0) = y == 0 ? 1.0 : -1.0;
    t(i, 1) = y == 1 ? 1.0 : -1.0;
  }
  const Eigen::MatrixXd coef = oracle::ridge_with_intercept(data.features(), t, 0.0);
  const Eigen::MatrixXd scores =
      test.features() * coef.topRows(4) + Eigen::VectorXd::Ones(test.rows()) * coef.bottomRows(1);
  const Labels got = predict(binary, test.features());
  for (Eigen::Index i = 0; i < test.rows(); ++i) {
    const int want = scores(i, 1) > scores(i, 0) ? 1 : 0;
    if (std::abs(scores(i, 1) - scores(i, 0)) > 1e-9) {
      EXPECT_EQ(got[static_cast<std::size_t>(i)], want) << i;
    }
  }
}

TEST(FitLeastSquares, MulticlassUsesOneColumnPerClass) {
  const auto data = gaussian(300, 3, 3, 19);
  const LinearModel m = fit_least_squares(data, 0.0);
  EXPECT_EQ(m.weights().cols(), 3);
  EXPECT_FALSE(m.is_binary());
  EXPECT_LT(empirical_error(m, data), 0.5);
}

TEST(SufficientStats, MergingEqualsAccumulating) {
  const auto a = gaussian(30, 6, 2, 21);
  const auto b = gaussian(45, 6, 2, 22);
  SufficientStats one(6, 2);
  one.add(a);
  one.add(b);
  SufficientStats left(6, 2);
  left.add(a);
  SufficientStats right(6, 2);
  right.add(b);
  left += right;
  EXPECT_EQ(left.count(), one.count());
  EXPECT_LT((left.centered_gram() - one.centered_gram()).norm(), 1e-9);
  EXPECT_LT((left.centered_cross() - one.centered_cross()).norm(), 1e-9);
}

TEST(RidgePath, MatchesDirectFits) {
  for (auto [m, d] : {std::pair<Eigen::Index, Eigen::Index>{50, 10}, {12, 30}}) {
    const auto data = gaussian(m, d, 2, 23);
    SufficientStats stats(d, 2);
    stats.add(data);
    const RidgePath path(stats);
    for (double lambda : {0.0, 1e-5, 1e-2, 1.0, 1e3, 1e5}) {
      const LinearModel a = path.fit(lambda);
      const LinearModel b = fit_from_stats(stats, lambda);
      EXPECT_LT((stacked(a) - stacked(b)).norm(), 1e-6 * (1.0 + stacked(b).norm()))
          << "lambda=" << lambda << " m=" << m;
    }
  }
}

TEST(Predict, TieRules) {
  const LinearModel zero_binary(Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(1), 2);
  Matrix x = Matrix::Random(5, 2);
  for (int label : predict(zero_binary, x)) EXPECT_EQ(label, 1);

  const LinearModel zero_multi(Eigen::MatrixXd::Zero(2, 3), Eigen::VectorXd::Zero(3), 3);
  for (int label : predict(zero_multi, x)) EXPECT_EQ(label, 0);

  Eigen::VectorXd intercepts(3);
  intercepts << 0.2, 0.9, 0.9;
  const LinearModel tied(Eigen::MatrixXd::Zero(2, 3), intercepts, 3);
  EXPECT_EQ(predict(tied, x.topRows(1))[0], 1);
}

TEST(Predict, DimensionMismatchThrows) {
  const LinearModel m(Eigen::MatrixXd::Zero(2, 1), Eigen::VectorXd::Zero(1), 2);
  EXPECT_THROW((void)predict(m, Matrix::Zero(3, 3)), DataError);
}

TEST(EmpiricalError, Counting) {
  const LinearModel m(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::VectorXd::Constant(1, -1.0), 2);
  EXPECT_DOUBLE_EQ(empirical_error(m, make({{0.0}, {1.0}}, {0, 1})), 0.0);
  EXPECT_DOUBLE_EQ(empirical_error(m, make({{0.0}, {1.0}}, {1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(empirical_error(m, make({{0.0}, {1.0}, {2.0}, {-3.0}}, {0, 1, 1, 1})), 0.25);
  EXPECT_THROW(
      {
        try {
          (void)empirical_error(m, LabeledDataset::empty(1, 2));
        } catch (const DataError& e) {
          EXPECT_STREQ(e.what(), "empty evaluation set");
          throw;
        }
      },
      DataError);
}

TEST(EmpiricalError, InvariantUnderRowPermutation) {
  const auto data = gaussian(100, 3, 2, 29);
  const LinearModel m = fit_least_squares(gaussian(40, 3, 2, 30), 0.0);
  std::vector<Eigen::Index> order(100);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng = make_rng(31);
  std::shuffle(order.begin(), order.end(), rng);
  const double e = empirical_error(m, data);
  EXPECT_GE(e, 0.0);
  EXPECT_LE(e, 1.0);
  EXPECT_DOUBLE_EQ(e, empirical_error(m, data.subset(order)));
}
