#include "monotone/wrappers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace monotone {

std::string to_string(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::standard:
      return "SL";
    case LearnerKind::mt_simple:
      return "MT_SIMPLE";
    case LearnerKind::mt_ht:
      return "MT_HT";
    case LearnerKind::mt_cv:
      return "MT_CV";
    case LearnerKind::lambda_select:
      return "LAMBDA_S";
  }
  return "unknown";
}

std::string table_label(LearnerKind kind) {
  switch (kind) {
    case LearnerKind::standard:
      return "SL";
    case LearnerKind::mt_simple:
      return "M_S";
    case LearnerKind::mt_ht:
      return "M_HT";
    case LearnerKind::mt_cv:
      return "M_CV";
    case LearnerKind::lambda_select:
      return "\xCE\xBB_S";  // λ_S
  }
  return "unknown";
}

LearnerKind parse_learner_kind(const std::string& name) {
  for (auto kind : {LearnerKind::standard, LearnerKind::mt_simple, LearnerKind::mt_ht,
                    LearnerKind::mt_cv, LearnerKind::lambda_select}) {
    if (to_string(kind) == name) {
      return kind;
    }
  }
  throw DataError("unknown learner '" + name + "'");
}

bool uses_holdout(LearnerKind kind) noexcept {
  return kind == LearnerKind::mt_simple || kind == LearnerKind::mt_ht ||
         kind == LearnerKind::lambda_select;
}

// ---------------------------------------------------------------------------

StandardLearner::StandardLearner(Eigen::Index dims, int class_count, bool append_validation,
                                 std::unique_ptr<BaseLearner> base)
    : stats_(dims, class_count), append_validation_(append_validation), base_(std::move(base)) {}

RoundDecision StandardLearner::round(const Batch& batch) {
  ++round_;
  stats_.add(batch.train);
  if (append_validation_) {
    stats_.add(batch.validation);
  }
  model_ = base_->fit(stats_);
  RoundDecision decision;
  decision.round = round_;
  decision.update = true;
  decision.model_round = round_;
  return decision;
}

// ---------------------------------------------------------------------------

HoldoutWrapper::HoldoutWrapper(Eigen::Index dims, int class_count, HoldoutMode mode,
                               std::optional<double> alpha, bool append_validation,
                               std::unique_ptr<BaseLearner> base)
    : base_(std::move(base)) {
  if (mode == HoldoutMode::ht) {
    if (!alpha) {
      throw AlphaError("alpha is required for MT_HT");
    }
    validate_alpha(*alpha);
  }
  state_.accumulated_train = SufficientStats(dims, class_count);
  state_.mode = mode;
  state_.alpha = alpha;
  state_.append_validation = append_validation;
}

RoundDecision HoldoutWrapper::round(const Batch& batch) {
  if (batch.validation.empty()) {
    throw DataError("empty validation split");
  }
  const int i = ++state_.round;
  state_.accumulated_train.add(batch.train);
  LinearModel candidate = base_->fit(state_.accumulated_train);

  // Round 1 has no incumbent yet; compare the candidate with itself.
  const LinearModel& incumbent = i == 1 ? candidate : state_.incumbent;

  RoundDecision decision;
  decision.round = i;
  decision.candidate_val_error = empirical_error(candidate, batch.validation);
  decision.incumbent_val_error = empirical_error(incumbent, batch.validation);
  bool update = false;
  if (state_.mode == HoldoutMode::simple) {
    update = update_simple(*decision.candidate_val_error, *decision.incumbent_val_error);
  } else {
    const PairedOutcomeCounts counts = paired_counts(candidate, incumbent, batch.validation);
    const TestDecision test = update_ht(counts, *state_.alpha);
    decision.counts = counts;
    decision.p_value = test.p_value;
    update = test.update;
  }

  if (state_.append_validation) {
    state_.accumulated_train.add(batch.validation);
  }
  if (update || i == 1) {
    state_.incumbent = std::move(candidate);
    state_.incumbent_round = i;
  }
  decision.update = update || i == 1;
  decision.model_round = state_.incumbent_round;
  return decision;
}

// ---------------------------------------------------------------------------

std::vector<int> stratified_fold_ids(const Labels& labels, int class_count, int folds, Rng& rng) {
  if (folds < 2) {
    throw DataError("cross-validation needs at least 2 folds");
  }
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(class_count));
  for (std::size_t r = 0; r < labels.size(); ++r) {
    by_class[static_cast<std::size_t>(labels[r])].push_back(r);
  }
  std::uniform_int_distribution<int> start_dist(0, folds - 1);
  int next = start_dist(rng);
  std::vector<int> ids(labels.size(), 0);
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t r : rows) {
      ids[r] = next;
      next = (next + 1) % folds;
    }
  }
  return ids;
}

bool cv_update(std::span<const double> candidate, std::span<const double> incumbent) {
  const double cand = std::accumulate(candidate.begin(), candidate.end(), 0.0) /
                      static_cast<double>(candidate.size());
  const double inc = std::accumulate(incumbent.begin(), incumbent.end(), 0.0) /
                     static_cast<double>(incumbent.size());
  return cand < inc;
}

std::size_t best_fold(std::span<const double> fold_errors) {
  return static_cast<std::size_t>(std::min_element(fold_errors.begin(), fold_errors.end()) -
                                  fold_errors.begin());
}

CvWrapper::CvWrapper(Eigen::Index dims, int class_count, int folds, std::uint64_t fold_seed,
                     std::unique_ptr<BaseLearner> base)
    : class_count_(class_count), rng_(make_rng(fold_seed)), base_(std::move(base)) {
  if (folds < 2) {
    throw DataError("cross-validation needs at least 2 folds");
  }
  state_.folds = folds;
  state_.fold_stats.assign(static_cast<std::size_t>(folds), SufficientStats(dims, class_count));
  state_.fold_rows.resize(static_cast<std::size_t>(folds));
  state_.fold_sizes.assign(static_cast<std::size_t>(folds), 0);
}

const LinearModel& CvWrapper::model() const {
  if (state_.best_models.empty()) {
    throw DataError("cross-validation wrapper has not seen any data");
  }
  return state_.best_models[state_.returned_fold];
}

std::int64_t CvWrapper::fold_mistakes(const LinearModel& model, std::size_t fold) const {
  std::int64_t errors = 0;
  for (const auto& chunk : state_.fold_rows[fold]) {
    errors += count_errors(model, chunk);
  }
  return errors;
}

double CvWrapper::fold_rate(std::int64_t mistakes, std::size_t fold) const {
  const std::int64_t rows = state_.fold_sizes[fold];
  if (rows == 0) {
    throw DataError("validation fold " + std::to_string(fold + 1) + " is empty");
  }
  return static_cast<double>(mistakes) / static_cast<double>(rows);
}

RoundDecision CvWrapper::round(const Batch& batch) {
  const int i = ++state_.round;
  const auto k_count = static_cast<std::size_t>(state_.folds);
  const LabeledDataset incoming = batch.whole();
  const std::vector<int> ids = stratified_fold_ids(incoming.labels(), class_count_, state_.folds, rng_);

  std::vector<bool> grew(k_count, false);
  for (std::size_t k = 0; k < k_count; ++k) {
    std::vector<Eigen::Index> rows;
    for (std::size_t r = 0; r < ids.size(); ++r) {
      if (static_cast<std::size_t>(ids[r]) == k) {
        rows.push_back(static_cast<Eigen::Index>(r));
      }
    }
    if (rows.empty()) {
      continue;
    }
    LabeledDataset chunk = incoming.subset(rows);
    grew[k] = true;
    state_.fold_sizes[k] += chunk.rows();
    state_.fold_stats[k].add(chunk);
    state_.fold_rows[k].push_back(std::move(chunk));
  }

  std::vector<LinearModel> candidates;
  std::vector<double> candidate_errors(k_count);
  std::vector<std::int64_t> candidate_mistakes(k_count);
  candidates.reserve(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    SufficientStats train(state_.fold_stats[k].dims(), class_count_);
    for (std::size_t j = 0; j < k_count; ++j) {
      if (j != k) {
        train += state_.fold_stats[j];
      }
    }
    candidates.push_back(base_->fit(train));
    candidate_mistakes[k] = fold_mistakes(candidates.back(), k);
    candidate_errors[k] = fold_rate(candidate_mistakes[k], k);
  }

  RoundDecision decision;
  decision.round = i;
  bool update = false;
  if (i > 1) {
    // The kept models only need scoring on this round's new rows.
    for (std::size_t k = 0; k < k_count; ++k) {
      if (grew[k]) {
        state_.best_fold_mistakes[k] +=
            count_errors(state_.best_models[k], state_.fold_rows[k].back());
      }
      state_.best_fold_errors[k] = fold_rate(state_.best_fold_mistakes[k], k);
    }
    update = cv_update(candidate_errors, state_.best_fold_errors);
    decision.incumbent_fold_errors = state_.best_fold_errors;
  } else {
    decision.incumbent_fold_errors = candidate_errors;
  }
  decision.candidate_fold_errors = candidate_errors;

  if (update || i == 1) {
    state_.best_round = i;
    state_.best_models = std::move(candidates);
    state_.best_fold_errors = candidate_errors;
    state_.best_fold_mistakes = candidate_mistakes;
  }
  state_.returned_fold = best_fold(state_.best_fold_errors);

  decision.update = update || i == 1;
  decision.model_round = state_.best_round;
  decision.model_fold = static_cast<int>(state_.returned_fold);
  return decision;
}

// ---------------------------------------------------------------------------

LambdaSelectWrapper::LambdaSelectWrapper(Eigen::Index dims, int class_count,
                                         std::vector<double> lambda_grid, bool append_validation)
    : stats_(dims, class_count), grid_(std::move(lambda_grid)), append_validation_(append_validation) {
  if (grid_.empty()) {
    throw DataError("lambda grid must not be empty");
  }
  for (double lambda : grid_) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
      throw DataError("lambda grid entries must be finite and nonnegative");
    }
  }
  std::sort(grid_.begin(), grid_.end());
}

RoundDecision LambdaSelectWrapper::round(const Batch& batch) {
  if (batch.validation.empty()) {
    throw DataError("empty validation split");
  }
  ++round_;
  stats_.add(batch.train);
  const RidgePath path(stats_);

  double best_error = 2.0;
  double best_lambda = grid_.front();
  LinearModel best;
  for (double lambda : grid_) {
    LinearModel model = path.fit(lambda);
    const double error = empirical_error(model, batch.validation);
    if (error <= best_error) {  // ascending grid: ties go to the larger lambda
      best_error = error;
      best_lambda = lambda;
      best = std::move(model);
    }
  }
  model_ = std::move(best);
  if (append_validation_) {
    stats_.add(batch.validation);
  }

  RoundDecision decision;
  decision.round = round_;
  decision.update = true;
  decision.model_round = round_;
  decision.candidate_val_error = best_error;
  decision.selected_lambda = best_lambda;
  return decision;
}

std::vector<double> log10_grid(double lo_exponent, double hi_exponent, double step) {
  if (!(step > 0.0) || hi_exponent < lo_exponent) {
    throw DataError("invalid lambda grid exponents");
  }
  std::vector<double> grid;
  const auto count = static_cast<int>(std::llround((hi_exponent - lo_exponent) / step));
  for (int k = 0; k <= count; ++k) {
    grid.push_back(std::pow(10.0, lo_exponent + k * step));
  }
  return grid;
}

std::unique_ptr<Learner> make_learner(LearnerKind kind, const LearnerSettings& settings,
                                      Eigen::Index dims, int class_count, std::uint64_t seed) {
  switch (kind) {
    case LearnerKind::standard:
      return std::make_unique<StandardLearner>(dims, class_count, settings.append_validation,
                                               std::make_unique<LeastSquares>(settings.base_lambda));
    case LearnerKind::mt_simple:
      return std::make_unique<HoldoutWrapper>(dims, class_count, HoldoutMode::simple, std::nullopt,
                                              settings.append_validation,
                                              std::make_unique<LeastSquares>(settings.base_lambda));
    case LearnerKind::mt_ht:
      return std::make_unique<HoldoutWrapper>(dims, class_count, HoldoutMode::ht, settings.alpha,
                                              settings.append_validation,
                                              std::make_unique<LeastSquares>(settings.base_lambda));
    case LearnerKind::mt_cv:
      return std::make_unique<CvWrapper>(dims, class_count, settings.folds, seed,
                                         std::make_unique<LeastSquares>(settings.base_lambda));
    case LearnerKind::lambda_select:
      return std::make_unique<LambdaSelectWrapper>(dims, class_count, settings.lambda_grid,
                                                   settings.append_validation);
  }
  throw DataError("unknown learner kind");
}

}  // namespace monotone
