#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "monotone/seeding.hpp"
#include "monotone/stats.hpp"
#include "oracles.hpp"

using namespace monotone;

namespace {

LabeledDataset column(std::vector<double> xs, Labels labels) {
  Matrix x(static_cast<Eigen::Index>(xs.size()), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) x(static_cast<Eigen::Index>(i), 0) = xs[i];
  return LabeledDataset(std::move(x), std::move(labels), 2);
}

// Predicts class 1 iff x >= threshold.
LinearModel threshold(double t) {
  return LinearModel(Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::VectorXd::Constant(1, -t), 2);
}

LinearModel constant(int label) {
  return LinearModel(Eigen::MatrixXd::Zero(1, 1),
                     Eigen::VectorXd::Constant(1, label == 1 ? 1.0 : -1.0), 2);
}

}  // namespace

TEST(PairedCounts, IdenticalModelsHaveNoDiscordance) {
  const auto s = column({-1, 0, 1, 2}, {0, 1, 1, 0});
  const auto counts = paired_counts(threshold(0.5), threshold(0.5), s);
  EXPECT_EQ(counts.b(), 0);
  EXPECT_EQ(counts.c(), 0);
  EXPECT_EQ(counts.total(), 4);
}

TEST(PairedCounts, CandidateRightEverywhere) {
  const auto s = column({1, 2, 3, 4, 5}, {1, 1, 1, 1, 1});
  const auto counts = paired_counts(constant(1), constant(0), s);
  EXPECT_EQ(counts.b(), 5);
  EXPECT_EQ(counts.c(), 0);
}

TEST(PairedCounts, SetDifferenceCounting) {
  // Ten rows of class 1. Feature 0 is negative where the candidate errs,
  // feature 1 where the incumbent errs; each model reads one feature.
  Matrix f = Matrix::Constant(10, 2, 1.0);
  for (int r : {1, 2}) f(r, 0) = -1.0;
  for (int r : {2, 3, 4}) f(r, 1) = -1.0;
  const LabeledDataset s(f, Labels(10, 1), 2);
  Eigen::MatrixXd wc(2, 1);
  wc << 1, 0;
  Eigen::MatrixXd wi(2, 1);
  wi << 0, 1;
  const LinearModel cand(wc, Eigen::VectorXd::Zero(1), 2);
  const LinearModel inc(wi, Eigen::VectorXd::Zero(1), 2);
  const auto counts = paired_counts(cand, inc, s);
  EXPECT_EQ(counts.b(), 2);
  EXPECT_EQ(counts.c(), 1);
  EXPECT_EQ(counts.discordant(), 3);
  EXPECT_EQ(counts.total(), 10);
}

TEST(PairedCounts, DimensionMismatchThrows) {
  Matrix f = Matrix::Zero(3, 2);
  const LabeledDataset s(f, {0, 1, 0}, 2);
  EXPECT_THROW((void)paired_counts(threshold(0), threshold(0), s), DataError);
}

TEST(McNemar, Examples) {
  EXPECT_DOUBLE_EQ(mcnemar_exact_one_tailed(PairedOutcomeCounts::from_discordant(0, 0)), 1.0);
  EXPECT_NEAR(mcnemar_exact_one_tailed(PairedOutcomeCounts::from_discordant(5, 0)), 1.0 / 32, 1e-15);
  EXPECT_NEAR(mcnemar_exact_one_tailed(PairedOutcomeCounts::from_discordant(8, 2)), 56.0 / 1024,
              1e-15);
}

TEST(McNemar, MatchesEnumerationOracle) {
  for (int n = 0; n <= 20; ++n) {
    for (int b = 0; b <= n; ++b) {
      const double p = mcnemar_exact_one_tailed(PairedOutcomeCounts::from_discordant(b, n - b));
      EXPECT_LE(std::abs(p - oracle::binomial_tail_by_enumeration(b, n - b)), 1e-12)
          << "b=" << b << " c=" << n - b;
    }
  }
}

TEST(McNemar, NonIncreasingInB) {
  for (int n : {1, 7, 50, 400, 1000}) {
    double previous = 1.0;
    for (int b = 0; b <= n; ++b) {
      const double p = mcnemar_exact_one_tailed(PairedOutcomeCounts::from_discordant(b, n - b));
      EXPECT_LE(p, previous + 1e-15);
      EXPECT_GE(p, 0.0);
      previous = p;
    }
  }
}

TEST(McNemar, LargeCountsStayFinite) {
  const double p = mcnemar_exact_one_tailed(PairedOutcomeCounts::from_discordant(600, 400));
  EXPECT_GT(p, 0.0);
  EXPECT_LT(p, 1e-9);
  EXPECT_NEAR(mcnemar_exact_one_tailed(PairedOutcomeCounts::from_discordant(500, 500)),
              0.5 + 0.5 * std::exp(std::lgamma(1001.0) - 2 * std::lgamma(501.0) - 1000 * std::log(2.0)),
              1e-12);
}

TEST(McNemar, FalsePositiveRateUnderNull) {
  Rng rng = make_rng(99);
  constexpr int kTrials = 10000;
  for (int nd : {1, 5, 20, 100}) {
    std::binomial_distribution<int> coins(nd, 0.5);
    std::vector<double> p(kTrials);
    for (auto& v : p) {
      const int b = coins(rng);
      v = mcnemar_exact_one_tailed(PairedOutcomeCounts::from_discordant(b, nd - b));
    }
    for (double alpha : {0.01, 0.05, 0.1, 0.5}) {
      const double rate =
          static_cast<double>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= alpha; })) /
          kTrials;
      EXPECT_LE(rate, alpha + 3.0 * std::sqrt(alpha * (1 - alpha) / kTrials))
          << "nd=" << nd << " alpha=" << alpha;
    }
  }
}

TEST(UpdateRules, Simple) {
  EXPECT_TRUE(update_simple(0.1, 0.2));
  EXPECT_FALSE(update_simple(0.3, 0.2));
  EXPECT_TRUE(update_simple(0.2, 0.2));
}

TEST(UpdateRules, HypothesisTest) {
  auto d = update_ht(PairedOutcomeCounts::from_discordant(5, 0), 0.05);
  EXPECT_NEAR(d.p_value, 0.03125, 1e-15);
  EXPECT_TRUE(d.update);
  EXPECT_EQ(d.b, 5);
  d = update_ht(PairedOutcomeCounts::from_discordant(0, 0), 0.05);
  EXPECT_DOUBLE_EQ(d.p_value, 1.0);
  EXPECT_FALSE(d.update);
  d = update_ht(PairedOutcomeCounts::from_discordant(8, 2), 0.05);
  EXPECT_NEAR(d.p_value, 0.0546875, 1e-15);
  EXPECT_FALSE(d.update);
  EXPECT_THROW((void)update_ht(PairedOutcomeCounts{}, 0.0), AlphaError);
  EXPECT_THROW((void)update_ht(PairedOutcomeCounts{}, 0.51), AlphaError);
  EXPECT_NO_THROW((void)update_ht(PairedOutcomeCounts{}, 0.5));
}

TEST(UpdateRules, HalfAlphaAgreesWithSimpleWhenDiscordanceUnbalanced) {
  // On one shared sample of size N: error(candidate) - error(incumbent) = (c - b) / N.
  for (int n = 1; n <= 40; ++n) {
    for (int b = 0; b <= n; ++b) {
      const int c = n - b;
      if (b == c) continue;
      const int shared_size = 60;
      const int both_wrong = 3;
      const double cand_err = static_cast<double>(c + both_wrong) / shared_size;
      const double inc_err = static_cast<double>(b + both_wrong) / shared_size;
      EXPECT_EQ(update_ht(PairedOutcomeCounts::from_discordant(b, c), 0.5).update,
                update_simple(cand_err, inc_err))
          << "b=" << b << " c=" << c;
    }
  }
}

TEST(RunBudget, Examples) {
  EXPECT_NEAR(alpha_for_run_budget(0.5, 1), 0.5, 1e-15);
  EXPECT_NEAR(alpha_for_run_budget(0.05, 150), 0.0197734381645, 1e-12);
  EXPECT_NEAR(alpha_for_run_budget(0.05, 1), 0.95, 1e-15);
  bool clamped = false;
  EXPECT_DOUBLE_EQ(clamp_alpha(alpha_for_run_budget(0.05, 1), &clamped), 0.5);
  EXPECT_TRUE(clamped);
  EXPECT_DOUBLE_EQ(clamp_alpha(0.02, &clamped), 0.02);
  EXPECT_FALSE(clamped);
  EXPECT_THROW((void)alpha_for_run_budget(0.0, 10), AlphaError);
  EXPECT_THROW((void)alpha_for_run_budget(1.0, 10), AlphaError);
  EXPECT_THROW((void)alpha_for_run_budget(0.5, 0), AlphaError);
}

TEST(RunBudget, Bound) {
  EXPECT_NEAR(monotone_run_probability_bound(0.5, 1), 0.5, 1e-15);
  EXPECT_NEAR(monotone_run_probability_bound(0.05, 150), std::pow(0.95, 150), 1e-15);
  EXPECT_NEAR(monotone_run_probability_bound(0.05, 150), 4.5555e-4, 1e-8);
  EXPECT_NEAR(monotone_run_probability_bound(1e-12, 150), 1.0, 1e-9);
}

TEST(RunBudget, MutualInverse) {
  for (double beta : {0.01, 0.05, 0.3, 0.9}) {
    for (std::int64_t n : {1, 10, 150, 10000}) {
      const double alpha = alpha_for_run_budget(beta, n);
      EXPECT_NEAR(std::pow(1.0 - alpha, static_cast<double>(n)), beta, 1e-12);
    }
  }
}
