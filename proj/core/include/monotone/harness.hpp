#pragma once

// Multi-run learning-curve experiments: every learner sees the same batch
// sequence within a run, true error is measured on a test set the learners
// never see, and per-run curves are summarized by AULC and the fraction of
// non-monotone transitions.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "monotone/data.hpp"
#include "monotone/wrappers.hpp"

namespace monotone {

/// Invalid configuration; `key()` names the offending setting.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::invalid_argument(key + ": " + message), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct ExperimentConfig {
  std::string name = "experiment";
  GeneratorSpec generator;
  BatchPlan plan;
  std::vector<LearnerKind> learners;
  std::optional<double> alpha;
  int folds = 5;
  std::vector<double> lambda_grid;
  double base_lambda = 0.0;
  int runs = 25;
  Eigen::Index test_size = 10000;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string output_dir;  // default for the CLI's --out

  /// Cross-field checks; throws ConfigError.
  void validate() const;
  [[nodiscard]] LearnerSettings learner_settings() const;
  [[nodiscard]] bool has_learner(LearnerKind kind) const;
};

struct RoundRecord {
  int round = 0;
  double true_error = 0.0;
  RoundDecision decision;
};

struct RunResult {
  int run = 0;
  LearnerKind learner = LearnerKind::standard;
  std::vector<RoundRecord> rounds;
  double aulc = 0.0;
  double nonmonotone_fraction = 0.0;
  int last_update_round = 0;

  [[nodiscard]] std::vector<double> curve() const;
};

struct CurveStats {
  LearnerKind learner = LearnerKind::standard;
  int runs = 0;
  std::vector<double> mean_curve;
  std::vector<double> std_curve;
  double aulc_mean = 0.0;
  double aulc_std = 0.0;
  double fraction_mean = 0.0;
  double fraction_std = 0.0;
};

struct LearnerResults {
  LearnerKind learner = LearnerKind::standard;
  std::vector<RunResult> runs;
  CurveStats stats;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<LearnerResults> learners;

  [[nodiscard]] const LearnerResults& at(LearnerKind kind) const;
};

/// Mean of the per-round true errors. Throws on an empty curve.
[[nodiscard]] double aulc(std::span<const double> curve);

/// Share of transitions with eps_{i+1} > eps_i; ties count as monotone.
[[nodiscard]] double nonmonotone_fraction(std::span<const double> curve);

/// Sample mean and standard deviation (n - 1 denominator; 0 for one value).
[[nodiscard]] std::pair<double, double> mean_and_std(std::span<const double> values);

[[nodiscard]] CurveStats summarize(LearnerKind learner, std::span<const RunResult> runs);

[[nodiscard]] ExperimentResult run_experiment(const ExperimentConfig& config);

struct SweepCell {
  double alpha = 0.0;
  Eigen::Index nv = 0;
  ExperimentResult result;
};

/// Cartesian product of alpha and validation sizes, each cell run without
/// appending validation data to the training set.
[[nodiscard]] std::vector<SweepCell> sweep(const ExperimentConfig& config_template,
                                           std::span<const double> alphas,
                                           std::span<const Eigen::Index> nvs);

struct RunBoundReport {
  double alpha = 0.0;
  int rounds = 0;
  int runs = 0;
  double bound = 0.0;                  // (1 - alpha)^n
  double observed_monotone_fraction = 0.0;
  double tolerance = 0.0;              // 3 binomial standard deviations
  bool vacuous = false;                // bound indistinguishable from 0 at this run count
  std::int64_t nonmonotone_decisions = 0;
  std::int64_t decisions = 0;
  double per_decision_rate = 0.0;
  bool run_bound_holds = false;
  bool per_decision_holds = false;
  [[nodiscard]] bool passed() const noexcept { return run_bound_holds && per_decision_holds; }
};

/// Monte Carlo check of the run-level and per-decision guarantees for MT_HT.
[[nodiscard]] RunBoundReport verify_run_bound(const ExperimentResult& result);

struct ConsistencyEntry {
  LearnerKind learner = LearnerKind::standard;
  std::vector<int> last_update_rounds;
  double final_error_mean = 0.0;
  std::optional<double> gap_to_standard;  // final mean error minus SL's
  double frozen_fraction = 0.0;           // runs whose last update precedes round n/2
  bool flagged = false;
};

[[nodiscard]] std::vector<ConsistencyEntry> consistency_smoke(const ExperimentResult& result);

}  // namespace monotone
