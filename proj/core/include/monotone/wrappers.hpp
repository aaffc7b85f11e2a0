#pragma once

// Learners driven round by round: the standard learner, the two holdout
// wrappers (simple comparison and hypothesis-test gate), the cross-validation
// wrapper, and the validation-tuned ridge baseline.

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "monotone/data.hpp"
#include "monotone/models.hpp"
#include "monotone/seeding.hpp"
#include "monotone/stats.hpp"

namespace monotone {

enum class LearnerKind { standard, mt_simple, mt_ht, mt_cv, lambda_select };

/// Config/CSV name: SL, MT_SIMPLE, MT_HT, MT_CV, LAMBDA_S.
[[nodiscard]] std::string to_string(LearnerKind kind);
/// Row label used in the benchmark table.
[[nodiscard]] std::string table_label(LearnerKind kind);
[[nodiscard]] LearnerKind parse_learner_kind(const std::string& name);
[[nodiscard]] bool uses_holdout(LearnerKind kind) noexcept;

/// The supervised learner wrapped by every algorithm. Takes the training set
/// in sufficient-statistics form.
class BaseLearner {
 public:
  virtual ~BaseLearner() = default;
  virtual LinearModel fit(const SufficientStats& stats) = 0;
};

class LeastSquares final : public BaseLearner {
 public:
  explicit LeastSquares(double lambda = 0.0) : lambda_(lambda) {}
  LinearModel fit(const SufficientStats& stats) override { return fit_from_stats(stats, lambda_); }

 private:
  double lambda_;
};

/// Audit record of one round.
struct RoundDecision {
  int round = 0;
  bool update = false;
  int model_round = 0;  // round whose fit produced the returned model
  int model_fold = -1;  // fold index of the returned model, cross-validation only
  std::optional<double> p_value;
  std::optional<PairedOutcomeCounts> counts;
  std::optional<double> candidate_val_error;
  std::optional<double> incumbent_val_error;
  std::optional<std::vector<double>> candidate_fold_errors;
  std::optional<std::vector<double>> incumbent_fold_errors;
  std::optional<double> selected_lambda;

  friend bool operator==(const RoundDecision&, const RoundDecision&) = default;
};

/// Stateful learner fed one batch per round.
class Learner {
 public:
  virtual ~Learner() = default;
  [[nodiscard]] virtual LearnerKind kind() const = 0;
  virtual RoundDecision round(const Batch& batch) = 0;
  /// Model returned after the most recent round.
  [[nodiscard]] virtual const LinearModel& model() const = 0;
};

class StandardLearner final : public Learner {
 public:
  StandardLearner(Eigen::Index dims, int class_count, bool append_validation,
                  std::unique_ptr<BaseLearner> base = std::make_unique<LeastSquares>());

  [[nodiscard]] LearnerKind kind() const override { return LearnerKind::standard; }
  RoundDecision round(const Batch& batch) override;
  [[nodiscard]] const LinearModel& model() const override { return model_; }
  [[nodiscard]] const SufficientStats& training_stats() const noexcept { return stats_; }

 private:
  SufficientStats stats_;
  bool append_validation_;
  std::unique_ptr<BaseLearner> base_;
  LinearModel model_;
  int round_ = 0;
};

enum class HoldoutMode { simple, ht };

struct HoldoutWrapperState {
  SufficientStats accumulated_train;
  LinearModel incumbent;
  int incumbent_round = 0;
  int round = 0;
  HoldoutMode mode = HoldoutMode::simple;
  std::optional<double> alpha;
  bool append_validation = true;
};

/// Split each batch, grow the training set, and only switch to the new model
/// when it wins the comparison on this round's validation split.
class HoldoutWrapper final : public Learner {
 public:
  HoldoutWrapper(Eigen::Index dims, int class_count, HoldoutMode mode,
                 std::optional<double> alpha, bool append_validation,
                 std::unique_ptr<BaseLearner> base = std::make_unique<LeastSquares>());

  [[nodiscard]] LearnerKind kind() const override {
    return state_.mode == HoldoutMode::simple ? LearnerKind::mt_simple : LearnerKind::mt_ht;
  }
  RoundDecision round(const Batch& batch) override;
  [[nodiscard]] const LinearModel& model() const override { return state_.incumbent; }
  [[nodiscard]] const HoldoutWrapperState& state() const noexcept { return state_; }

 private:
  HoldoutWrapperState state_;
  std::unique_ptr<BaseLearner> base_;
};

/// Stratified fold ids in [0, folds): rows are grouped by class (shuffled
/// within class) and dealt round-robin from a random starting fold.
[[nodiscard]] std::vector<int> stratified_fold_ids(const Labels& labels, int class_count,
                                                   int folds, Rng& rng);

/// Strict improvement of the mean fold error.
[[nodiscard]] bool cv_update(std::span<const double> candidate, std::span<const double> incumbent);

/// Index of the smallest fold error, lowest index on ties.
[[nodiscard]] std::size_t best_fold(std::span<const double> fold_errors);

struct CvWrapperState {
  int folds = 5;
  int round = 0;
  int best_round = 0;
  std::vector<SufficientStats> fold_stats;
  std::vector<std::vector<LabeledDataset>> fold_rows;  // validation rows per fold, by batch
  std::vector<LinearModel> best_models;
  std::vector<double> best_fold_errors;
  std::vector<std::int64_t> best_fold_mistakes;  // running counts behind best_fold_errors
  std::vector<std::int64_t> fold_sizes;
  std::size_t returned_fold = 0;
};

/// Cross-validation wrapper. Keeps the K models of the best round and
/// re-scores them on the grown folds every round.
class CvWrapper final : public Learner {
 public:
  CvWrapper(Eigen::Index dims, int class_count, int folds, std::uint64_t fold_seed,
            std::unique_ptr<BaseLearner> base = std::make_unique<LeastSquares>());

  [[nodiscard]] LearnerKind kind() const override { return LearnerKind::mt_cv; }
  RoundDecision round(const Batch& batch) override;
  [[nodiscard]] const LinearModel& model() const override;
  [[nodiscard]] const CvWrapperState& state() const noexcept { return state_; }

 private:
  [[nodiscard]] std::int64_t fold_mistakes(const LinearModel& model, std::size_t fold) const;
  [[nodiscard]] double fold_rate(std::int64_t mistakes, std::size_t fold) const;

  CvWrapperState state_;
  int class_count_;
  Rng rng_;
  std::unique_ptr<BaseLearner> base_;
};

/// Ridge baseline: per round, pick the lambda with the lowest error on the
/// validation split (ties go to the larger lambda).
class LambdaSelectWrapper final : public Learner {
 public:
  LambdaSelectWrapper(Eigen::Index dims, int class_count, std::vector<double> lambda_grid,
                      bool append_validation);

  [[nodiscard]] LearnerKind kind() const override { return LearnerKind::lambda_select; }
  RoundDecision round(const Batch& batch) override;
  [[nodiscard]] const LinearModel& model() const override { return model_; }

 private:
  SufficientStats stats_;
  std::vector<double> grid_;
  bool append_validation_;
  LinearModel model_;
  int round_ = 0;
};

/// lambda = 10^e for e = lo, lo + step, ..., hi.
[[nodiscard]] std::vector<double> log10_grid(double lo_exponent, double hi_exponent, double step);

struct LearnerSettings {
  std::optional<double> alpha;
  int folds = 5;
  std::vector<double> lambda_grid;
  bool append_validation = true;
  double base_lambda = 0.0;
};

[[nodiscard]] std::unique_ptr<Learner> make_learner(LearnerKind kind,
                                                    const LearnerSettings& settings,
                                                    Eigen::Index dims, int class_count,
                                                    std::uint64_t seed);

}  // namespace monotone
