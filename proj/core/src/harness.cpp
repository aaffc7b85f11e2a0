#include "monotone/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <numeric>
#include <thread>

#include "monotone/mnist.hpp"

namespace monotone {

namespace {

// Raw MNIST pool plus the projected test set, shared by every run.
struct MnistSource {
  LabeledDataset pool;
  LabeledDataset test;
  std::unique_ptr<RandomFourierFeatures> projection;
};

std::unique_ptr<MnistSource> load_mnist_source(const ExperimentConfig& config) {
  const MnistParams& p = config.generator.mnist;
  auto source = std::make_unique<MnistSource>();
  source->pool = load_mnist(p.train_images, p.train_labels);
  const LabeledDataset raw_test = load_mnist(p.test_images, p.test_labels);
  // One projection per experiment, reused for train and test.
  source->projection = std::make_unique<RandomFourierFeatures>(
      source->pool.dims(), p.features, p.bandwidth,
      stream_seed(splitmix64(config.seed), Stream::projection));
  source->test = source->projection->transform(raw_test);
  if (config.test_size < source->test.rows()) {
    std::vector<Eigen::Index> rows(static_cast<std::size_t>(config.test_size));
    std::iota(rows.begin(), rows.end(), Eigen::Index{0});
    source->test = source->test.subset(rows);
  }
  return source;
}

int class_count_of(const ExperimentConfig& config) {
  return config.generator.kind == GeneratorKind::mnist ? 10 : 2;
}

std::vector<RunResult> execute_run(const ExperimentConfig& config, int run,
                                   const MnistSource* mnist) {
  const std::uint64_t seed = run_seed(config.seed, static_cast<std::uint64_t>(run));
  std::vector<Batch> batches;
  LabeledDataset test;
  if (mnist != nullptr) {
    batches = draw_batches(mnist->pool, config.plan, stream_seed(seed, Stream::batches));
    for (auto& batch : batches) {
      batch.train = mnist->projection->transform(batch.train);
      batch.validation = mnist->projection->transform(batch.validation);
    }
    test = mnist->test;
  } else {
    batches = draw_batches(config.generator, config.plan, stream_seed(seed, Stream::batches));
    Rng test_rng = make_rng(stream_seed(seed, Stream::test_set));
    test = generate(config.generator, config.test_size, test_rng, Sampling::random);
  }

  const LearnerSettings settings = config.learner_settings();
  const Eigen::Index dims = test.dims();
  std::vector<RunResult> out;
  for (LearnerKind kind : config.learners) {
    auto learner = make_learner(kind, settings, dims, class_count_of(config),
                                stream_seed(seed, Stream::folds, to_string(kind)));
    RunResult result;
    result.run = run;
    result.learner = kind;
    result.rounds.reserve(batches.size());
    int previous_round = -1;
    int previous_fold = -2;
    double previous_error = 0.0;
    for (const Batch& batch : batches) {
      RoundRecord record;
      record.decision = learner->round(batch);
      record.round = record.decision.round;
      const bool same_model = !record.decision.update &&
                              record.decision.model_round == previous_round &&
                              record.decision.model_fold == previous_fold;
      record.true_error = same_model ? previous_error : empirical_error(learner->model(), test);
      previous_round = record.decision.model_round;
      previous_fold = record.decision.model_fold;
      previous_error = record.true_error;
      if (record.decision.update) {
        result.last_update_round = record.round;
      }
      result.rounds.push_back(std::move(record));
    }
    const auto curve = result.curve();
    result.aulc = aulc(curve);
    result.nonmonotone_fraction = curve.size() >= 2 ? nonmonotone_fraction(curve) : 0.0;
    out.push_back(std::move(result));
  }
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (runs < 1) throw ConfigError("runs", "must be >= 1");
  if (test_size < 1) throw ConfigError("test_size", "must be >= 1");
  if (threads < 1) throw ConfigError("threads", "must be >= 1");
  if (plan.rounds < 1) throw ConfigError("plan.rounds", "must be >= 1");
  if (plan.train_per_round < 1) throw ConfigError("plan.train_per_round", "must be >= 1");
  if (plan.val_per_round < 0) throw ConfigError("plan.val_per_round", "must be >= 0");
  if (learners.empty()) throw ConfigError("learners", "at least one learner is required");
  try {
    generator.validate();
  } catch (const DataError& e) {
    const std::string what = e.what();
    const auto dot = what.find(' ');
    throw ConfigError(what.substr(0, dot), what.substr(dot == std::string::npos ? 0 : dot + 1));
  }
  for (LearnerKind kind : learners) {
    if (uses_holdout(kind) && plan.val_per_round == 0) {
      throw ConfigError("plan.val_per_round",
                        "must be > 0 when " + to_string(kind) + " is selected");
    }
    if (kind == LearnerKind::mt_ht) {
      if (!alpha) throw ConfigError("alpha", "required when MT_HT is selected");
      if (!(*alpha > 0.0 && *alpha <= 0.5)) throw ConfigError("alpha", "must lie in (0, 0.5]");
    }
    if (kind == LearnerKind::mt_cv) {
      if (folds < 2) throw ConfigError("folds", "must be >= 2");
      if (plan.batch_size() < 2 * static_cast<Eigen::Index>(folds)) {
        throw ConfigError("folds", "batch size must provide at least two rows per fold");
      }
    }
    if (kind == LearnerKind::lambda_select) {
      if (lambda_grid.empty()) throw ConfigError("lambda_grid", "required when LAMBDA_S is selected");
      for (double lambda : lambda_grid) {
        if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
          throw ConfigError("lambda_grid", "entries must be finite and nonnegative");
        }
      }
    }
  }
  if (!(base_lambda >= 0.0)) throw ConfigError("base_lambda", "must be >= 0");
}

LearnerSettings ExperimentConfig::learner_settings() const {
  LearnerSettings settings;
  settings.alpha = alpha;
  settings.folds = folds;
  settings.lambda_grid = lambda_grid;
  settings.append_validation = plan.append_validation;
  settings.base_lambda = base_lambda;
  return settings;
}

bool ExperimentConfig::has_learner(LearnerKind kind) const {
  return std::find(learners.begin(), learners.end(), kind) != learners.end();
}

std::vector<double> RunResult::curve() const {
  std::vector<double> c;
  c.reserve(rounds.size());
  for (const auto& r : rounds) {
    c.push_back(r.true_error);
  }
  return c;
}

const LearnerResults& ExperimentResult::at(LearnerKind kind) const {
  for (const auto& l : learners) {
    if (l.learner == kind) {
      return l;
    }
  }
  throw ConfigError("learners", to_string(kind) + " was not part of this experiment");
}

double aulc(std::span<const double> curve) {
  if (curve.empty()) {
    throw DataError("AULC of an empty curve");
  }
  return std::accumulate(curve.begin(), curve.end(), 0.0) / static_cast<double>(curve.size());
}

double nonmonotone_fraction(std::span<const double> curve) {
  if (curve.size() < 2) {
    throw DataError("monotonicity needs a curve of at least two rounds");
  }
  std::size_t rises = 0;
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    rises += curve[i + 1] > curve[i] ? 1 : 0;
  }
  return static_cast<double>(rises) / static_cast<double>(curve.size() - 1);
}

std::pair<double, double> mean_and_std(std::span<const double> values) {
  if (values.empty()) {
    return {0.0, 0.0};
  }
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() == 1) {
    return {mean, 0.0};
  }
  double ss = 0.0;
  for (double v : values) {
    ss += (v - mean) * (v - mean);
  }
  return {mean, std::sqrt(ss / (n - 1.0))};
}

CurveStats summarize(LearnerKind learner, std::span<const RunResult> runs) {
  CurveStats stats;
  stats.learner = learner;
  stats.runs = static_cast<int>(runs.size());
  if (runs.empty()) {
    return stats;
  }
  const std::size_t n = runs.front().rounds.size();
  stats.mean_curve.resize(n);
  stats.std_curve.resize(n);
  std::vector<double> column(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t r = 0; r < runs.size(); ++r) {
      column[r] = runs[r].rounds.at(i).true_error;
    }
    std::tie(stats.mean_curve[i], stats.std_curve[i]) = mean_and_std(column);
  }
  std::vector<double> aulcs;
  std::vector<double> fractions;
  for (const auto& run : runs) {
    aulcs.push_back(run.aulc);
    fractions.push_back(run.nonmonotone_fraction);
  }
  std::tie(stats.aulc_mean, stats.aulc_std) = mean_and_std(aulcs);
  std::tie(stats.fraction_mean, stats.fraction_std) = mean_and_std(fractions);
  return stats;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  std::unique_ptr<MnistSource> mnist;
  if (config.generator.kind == GeneratorKind::mnist) {
    mnist = load_mnist_source(config);
  }

  std::vector<std::vector<RunResult>> per_run(static_cast<std::size_t>(config.runs));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int run = next++; run < config.runs; run = next++) {
      try {
        per_run[static_cast<std::size_t>(run)] = execute_run(config, run, mnist.get());
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min(config.threads, config.runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (failure) {
    std::rethrow_exception(failure);
  }

  ExperimentResult result;
  result.config = config;
  for (std::size_t l = 0; l < config.learners.size(); ++l) {
    LearnerResults lr;
    lr.learner = config.learners[l];
    for (auto& run : per_run) {
      lr.runs.push_back(std::move(run[l]));
    }
    lr.stats = summarize(lr.learner, lr.runs);
    result.learners.push_back(std::move(lr));
  }
  return result;
}

std::vector<SweepCell> sweep(const ExperimentConfig& config_template,
                             std::span<const double> alphas, std::span<const Eigen::Index> nvs) {
  if (alphas.empty() || nvs.empty()) {
    throw ConfigError("sweep", "alpha and N_v grids must be nonempty");
  }
  std::vector<SweepCell> cells;
  for (Eigen::Index nv : nvs) {
    for (double alpha : alphas) {
      ExperimentConfig config = config_template;
      config.alpha = alpha;
      config.plan.val_per_round = nv;
      config.plan.append_validation = false;
      cells.push_back(SweepCell{alpha, nv, run_experiment(config)});
    }
  }
  return cells;
}

RunBoundReport verify_run_bound(const ExperimentResult& result) {
  const ExperimentConfig& config = result.config;
  if (!config.has_learner(LearnerKind::mt_ht) || !config.alpha) {
    throw ConfigError("learners", "verification needs MT_HT with alpha");
  }
  const LearnerResults& ht = result.at(LearnerKind::mt_ht);
  RunBoundReport report;
  report.alpha = *config.alpha;
  report.rounds = config.plan.rounds;
  report.runs = static_cast<int>(ht.runs.size());
  report.bound = monotone_run_probability_bound(report.alpha, report.rounds);
  report.tolerance =
      3.0 * std::sqrt(report.bound * (1.0 - report.bound) / static_cast<double>(report.runs));
  report.vacuous = report.bound - report.tolerance <= 0.0;

  int monotone_runs = 0;
  for (const auto& run : ht.runs) {
    const auto curve = run.curve();
    std::int64_t rises = 0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
      rises += curve[i + 1] > curve[i] ? 1 : 0;
    }
    report.nonmonotone_decisions += rises;
    report.decisions += static_cast<std::int64_t>(curve.size()) - 1;
    monotone_runs += rises == 0 ? 1 : 0;
  }
  report.observed_monotone_fraction =
      static_cast<double>(monotone_runs) / static_cast<double>(report.runs);
  report.per_decision_rate = report.decisions > 0
                                 ? static_cast<double>(report.nonmonotone_decisions) /
                                       static_cast<double>(report.decisions)
                                 : 0.0;
  report.run_bound_holds = report.observed_monotone_fraction >= report.bound - report.tolerance;
  report.per_decision_holds = report.per_decision_rate <= report.alpha;
  return report;
}

std::vector<ConsistencyEntry> consistency_smoke(const ExperimentResult& result) {
  const int n = result.config.plan.rounds;
  std::optional<double> standard_final;
  for (const auto& l : result.learners) {
    if (l.learner == LearnerKind::standard && !l.stats.mean_curve.empty()) {
      standard_final = l.stats.mean_curve.back();
    }
  }
  std::vector<ConsistencyEntry> entries;
  for (const auto& l : result.learners) {
    ConsistencyEntry entry;
    entry.learner = l.learner;
    int frozen = 0;
    for (const auto& run : l.runs) {
      entry.last_update_rounds.push_back(run.last_update_round);
      frozen += 2 * run.last_update_round < n ? 1 : 0;
    }
    entry.final_error_mean = l.stats.mean_curve.empty() ? 0.0 : l.stats.mean_curve.back();
    if (standard_final) {
      entry.gap_to_standard = entry.final_error_mean - *standard_final;
    }
    entry.frozen_fraction =
        l.runs.empty() ? 0.0 : static_cast<double>(frozen) / static_cast<double>(l.runs.size());
    entry.flagged = entry.frozen_fraction >= 0.5;
    entries.push_back(std::move(entry));
  }
  return entries;
}

}  // namespace monotone
