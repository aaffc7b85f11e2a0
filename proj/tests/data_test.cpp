#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "monotone/data.hpp"
#include "monotone/models.hpp"

using namespace monotone;

namespace {

GeneratorSpec peaking_spec(Eigen::Index d, double delta, std::uint64_t seed = 1) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::peaking;
  spec.d = d;
  spec.peaking.delta = delta;
  spec.seed = seed;
  return spec;
}

GeneratorSpec dipping_spec(std::uint64_t seed = 1) {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::dipping;
  spec.d = 2;
  spec.seed = seed;
  return spec;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

bool same(const LabeledDataset& a, const LabeledDataset& b) {
  return a.labels() == b.labels() && a.features() == b.features();
}

}  // namespace

TEST(Peaking, SumRuleReachesBayesError) {
  const auto data = generate(peaking_spec(10, 2.33), 200000);
  std::int64_t wrong = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const int guess = data.features().row(i).sum() >= 0.0 ? 1 : 0;
    wrong += guess != data.labels()[static_cast<std::size_t>(i)];
  }
  const double rate = static_cast<double>(wrong) / static_cast<double>(data.rows());
  const double bayes = normal_cdf(-2.33);
  EXPECT_NEAR(bayes, 0.0099, 1e-4);
  EXPECT_NEAR(rate, bayes, 4.0 * std::sqrt(bayes * (1 - bayes) / 200000.0));
}

TEST(Peaking, ClassMeansAreShifted) {
  const auto spec = peaking_spec(4, 2.0);
  const auto data = generate(spec, 40000);
  Eigen::RowVectorXd pos = Eigen::RowVectorXd::Zero(4), neg = Eigen::RowVectorXd::Zero(4);
  const auto counts = data.class_counts();
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    (data.labels()[static_cast<std::size_t>(i)] == 1 ? pos : neg) += data.features().row(i);
  }
  pos /= static_cast<double>(counts[1]);
  neg /= static_cast<double>(counts[0]);
  for (Eigen::Index j = 0; j < 4; ++j) {
    EXPECT_NEAR(pos[j], 1.0, 0.03);
    EXPECT_NEAR(neg[j], -1.0, 0.03);
  }
}

TEST(Peaking, ZeroSeparationIsChance) {
  const auto spec = peaking_spec(20, 0.0);
  Rng rng = make_rng(5);
  const auto train = generate(spec, 60, rng);
  const auto test = generate(spec, 20000, rng);
  const double err = empirical_error(fit_least_squares(train, 0.0), test);
  EXPECT_NEAR(err, 0.5, 0.03);
}

TEST(Sampling, StratifiedIsExactlyBalanced) {
  Rng rng = make_rng(3);
  for (Eigen::Index m : {2, 10, 40, 150}) {
    const auto data = generate_peaking(peaking_spec(3, 1.0), m, rng, Sampling::stratified);
    const auto counts = data.class_counts();
    EXPECT_EQ(counts[0], m / 2);
    EXPECT_EQ(counts[1], m / 2);
  }
  // Odd sizes split 1 apart, the extra row going to either class.
  int extra_to_one = 0;
  for (int k = 0; k < 200; ++k) {
    const auto counts = generate_peaking(peaking_spec(3, 1.0), 5, rng, Sampling::stratified)
                            .class_counts();
    EXPECT_EQ(std::abs(counts[0] - counts[1]), 1);
    extra_to_one += counts[1] == 3;
  }
  EXPECT_GT(extra_to_one, 60);
  EXPECT_LT(extra_to_one, 140);
}

TEST(Sampling, StratifiedCountsLargestRemainder) {
  Rng rng = make_rng(4);
  const auto counts = stratified_counts(10, {0.55, 0.3, 0.15}, rng);
  EXPECT_EQ(counts, (std::vector<Eigen::Index>{6, 3, 1}));
  const auto total = stratified_counts(7, {1, 1, 1, 1}, rng);
  EXPECT_EQ(std::accumulate(total.begin(), total.end(), Eigen::Index{0}), 7);
  EXPECT_THROW((void)stratified_counts(3, {}, rng), DataError);
}

TEST(Sampling, RandomLabelsVary) {
  Rng rng = make_rng(8);
  bool unbalanced = false;
  for (int k = 0; k < 50 && !unbalanced; ++k) {
    const auto counts = generate_peaking(peaking_spec(2, 1.0), 10, rng).class_counts();
    unbalanced = counts[0] != counts[1];
  }
  EXPECT_TRUE(unbalanced);
}

TEST(Dipping, ShapeAndStructure) {
  auto spec = dipping_spec();
  spec.dipping.noise_dims = 3;
  spec.d = 5;
  const auto data = generate(spec, 5000);
  EXPECT_EQ(data.dims(), 5);
  int outliers = 0;
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double y = data.labels()[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    const double u = y * data.features()(i, 0);
    if (u < -10.0) {
      ++outliers;
      EXPECT_NEAR(u, -49.0, 0.5);
    } else {
      EXPECT_NEAR(u, 1.0, 0.5);
    }
  }
  EXPECT_NEAR(outliers / 5000.0, 0.02, 0.01);
}

TEST(Dipping, InformativeDirectionIsNearlyPerfect) {
  const auto data = generate(dipping_spec(), 50000);
  Eigen::MatrixXd w(2, 1);
  w << 1, 0;
  const LinearModel direction(w, Eigen::VectorXd::Zero(1), 2);
  EXPECT_LE(empirical_error(direction, data), 0.05);
}

TEST(Dipping, LargeSampleLeastSquaresLosesTheDirection) {
  Rng rng = make_rng(11);
  const auto spec = dipping_spec();
  const auto test = generate(spec, 20000, rng);
  const auto small = generate(spec, 20000, rng);
  // Keep only majority points: small outlier-free samples find the direction.
  std::vector<Eigen::Index> clean;
  for (Eigen::Index i = 0; i < small.rows() && clean.size() < 10; ++i) {
    if (std::abs(small.features()(i, 0)) < 5.0) clean.push_back(i);
  }
  EXPECT_LE(empirical_error(fit_least_squares(small.subset(clean), 0.0), test), 0.05);
  EXPECT_GE(empirical_error(fit_least_squares(small, 0.0), test), 0.15);
}

TEST(Generators, Deterministic) {
  EXPECT_TRUE(same(generate(peaking_spec(7, 2.33, 42), 100), generate(peaking_spec(7, 2.33, 42), 100)));
  EXPECT_FALSE(same(generate(peaking_spec(7, 2.33, 42), 100), generate(peaking_spec(7, 2.33, 43), 100)));
  EXPECT_TRUE(same(generate(dipping_spec(9), 100), generate(dipping_spec(9), 100)));
}

TEST(Generators, Validation) {
  auto spec = dipping_spec();
  spec.d = 3;
  EXPECT_THROW(spec.validate(), DataError);
  spec = dipping_spec();
  spec.dipping.majority = 0.4;
  EXPECT_THROW(spec.validate(), DataError);
  spec = peaking_spec(0, 1.0);
  EXPECT_THROW(spec.validate(), DataError);
  spec = peaking_spec(3, 1.0);
  spec.kind = GeneratorKind::mnist;
  EXPECT_THROW((void)generate(spec, 3), DataError);
  EXPECT_THROW((void)parse_generator_kind("gauss"), DataError);
}

TEST(Batches, CountsAndDeterminism) {
  BatchPlan plan;
  plan.rounds = 6;
  plan.train_per_round = 4;
  plan.val_per_round = 16;
  const auto spec = peaking_spec(5, 2.33);
  const auto a = draw_batches(spec, plan, 77);
  const auto b = draw_batches(spec, plan, 77);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].train.rows(), 4);
    EXPECT_EQ(a[i].validation.rows(), 16);
    EXPECT_EQ(a[i].train.class_counts()[1], 2);
    EXPECT_EQ(a[i].whole().rows(), 20);
    EXPECT_TRUE(same(a[i].train, b[i].train));
    EXPECT_TRUE(same(a[i].validation, b[i].validation));
  }
  EXPECT_FALSE(same(draw_batches(spec, plan, 78)[0].train, a[0].train));
}

TEST(Batches, PoolRowsAreNeverReused) {
  Matrix x(200, 1);
  Labels y(200);
  for (int i = 0; i < 200; ++i) {
    x(i, 0) = i;
    y[static_cast<std::size_t>(i)] = i % 4 == 0 ? 1 : 0;
  }
  const LabeledDataset pool(x, y, 2);
  for (Sampling s : {Sampling::random, Sampling::stratified}) {
    BatchPlan plan;
    plan.rounds = 10;
    plan.train_per_round = 8;
    plan.val_per_round = 12;
    plan.sampling = s;
    const auto batches = draw_batches(pool, plan, 5);
    std::vector<int> seen(200, 0);
    for (const auto& batch : batches) {
      for (const auto* part : {&batch.train, &batch.validation}) {
        for (Eigen::Index i = 0; i < part->rows(); ++i) ++seen[static_cast<std::size_t>(part->features()(i, 0))];
      }
      if (s == Sampling::stratified) {
        EXPECT_EQ(batch.train.class_counts()[1], 2);
        EXPECT_EQ(batch.validation.class_counts()[1], 3);
      }
    }
    EXPECT_EQ(std::count(seen.begin(), seen.end(), 1), 200);
  }
}

TEST(Batches, InsufficientPoolNamesTheShortfall) {
  const LabeledDataset pool(Matrix::Zero(50, 2), Labels(50, 0), 2);
  BatchPlan plan;
  plan.rounds = 3;
  plan.train_per_round = 10;
  plan.val_per_round = 10;
  try {
    (void)draw_batches(pool, plan, 1);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient"), std::string::npos);
  }
  plan.rounds = 0;
  EXPECT_THROW((void)draw_batches(peaking_spec(2, 1), plan, 1), DataError);
}

TEST(FourierFeatures, ShapeBoundsDeterminism) {
  const auto data = generate(peaking_spec(6, 2.0), 30);
  const auto z = random_fourier_features(data, 50, 5.0, 123);
  EXPECT_EQ(z.rows(), 30);
  EXPECT_EQ(z.dims(), 50);
  EXPECT_EQ(z.labels(), data.labels());
  const double bound = std::sqrt(2.0 / 50.0);
  EXPECT_LE(z.features().cwiseAbs().maxCoeff(), bound + 1e-12);
  EXPECT_TRUE(same(z, random_fourier_features(data, 50, 5.0, 123)));
  EXPECT_FALSE(same(z, random_fourier_features(data, 50, 5.0, 124)));
  EXPECT_THROW((void)RandomFourierFeatures(6, 0, 5.0, 1), DataError);
  EXPECT_THROW((void)RandomFourierFeatures(6, 5, 0.0, 1), DataError);
  EXPECT_THROW((void)RandomFourierFeatures(5, 5, 1.0, 1).transform(data), DataError);
}

TEST(FourierFeatures, ApproximatesGaussianKernel) {
  Matrix x(2, 3);
  x << 0.0, 0.0, 0.0, 1.0, 2.0, 0.5;
  const LabeledDataset pair(x, {0, 1}, 2);
  const double bandwidth = 2.0;
  const auto z = random_fourier_features(pair, 20000, bandwidth, 9);
  const double approx = z.features().row(0).dot(z.features().row(1));
  const double exact = std::exp(-(x.row(0) - x.row(1)).squaredNorm() / (2 * bandwidth * bandwidth));
  EXPECT_NEAR(approx, exact, 0.03);
}
