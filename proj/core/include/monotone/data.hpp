#pragma once

// Synthetic problems with non-monotone least-squares learning curves, random
// Fourier features, and the batch plan that feeds data to the learners.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "monotone/dataset.hpp"
#include "monotone/seeding.hpp"

namespace monotone {

enum class GeneratorKind { peaking, dipping, mnist };
enum class Sampling { stratified, random };

[[nodiscard]] std::string to_string(GeneratorKind kind);
[[nodiscard]] std::string to_string(Sampling sampling);
[[nodiscard]] GeneratorKind parse_generator_kind(const std::string& name);
[[nodiscard]] Sampling parse_sampling(const std::string& name);

/// Two unit-covariance Gaussians with means +/-(delta / sqrt(d)) * ones. The
/// Bayes error is Phi(-delta) whatever d is.
struct PeakingParams {
  double delta = 2.33;
};

/// Mirrored majority/outlier mixture. With y in {-1,+1}:
///   x1 = y*u, u = 1 w.p. majority, -outlier_magnitude otherwise
///   x2 = y*v, v = 0 w.p. majority,  outlier_height otherwise
/// plus isotropic jitter on (x1, x2) and `noise_dims` extra N(0,1) columns.
/// The default magnitude q/(1-q) zeroes E[x1*y], so large-sample least squares
/// loses the informative direction while small outlier-free samples find it.
struct DippingParams {
  double majority = 0.98;
  double outlier_magnitude = 49.0;
  double outlier_height = 0.0;
  int noise_dims = 0;
  double jitter = 0.05;
};

/// IDX file locations and the random-feature map applied to raw pixels.
struct MnistParams {
  std::string train_images;
  std::string train_labels;
  std::string test_images;
  std::string test_labels;
  Eigen::Index features = 500;
  double bandwidth = 5.0;
};

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::peaking;
  Eigen::Index d = 200;
  PeakingParams peaking;
  DippingParams dipping;
  MnistParams mnist;
  std::uint64_t seed = 0;

  /// Throws DataError naming the offending field.
  void validate() const;
};

[[nodiscard]] LabeledDataset generate_peaking(const GeneratorSpec& spec, Eigen::Index m, Rng& rng,
                                              Sampling sampling = Sampling::random);
[[nodiscard]] LabeledDataset generate_dipping(const GeneratorSpec& spec, Eigen::Index m, Rng& rng,
                                              Sampling sampling = Sampling::random);

/// Dispatch on spec.kind for synthetic generators.
[[nodiscard]] LabeledDataset generate(const GeneratorSpec& spec, Eigen::Index m, Rng& rng,
                                      Sampling sampling = Sampling::random);

/// Deterministic draw seeded from spec.seed.
[[nodiscard]] LabeledDataset generate(const GeneratorSpec& spec, Eigen::Index m,
                                      Sampling sampling = Sampling::random);

/// z_j(x) = sqrt(2/D) cos(w_j^T x + b_j), w_j ~ N(0, I / bandwidth^2), b_j ~ U[0, 2pi).
class RandomFourierFeatures {
 public:
  RandomFourierFeatures(Eigen::Index input_dims, Eigen::Index features, double bandwidth,
                        std::uint64_t seed);

  [[nodiscard]] LabeledDataset transform(const LabeledDataset& data) const;
  [[nodiscard]] Eigen::Index input_dims() const noexcept { return projection_.rows(); }
  [[nodiscard]] Eigen::Index features() const noexcept { return projection_.cols(); }

 private:
  Matrix projection_;
  Eigen::RowVectorXd phase_;
};

[[nodiscard]] LabeledDataset random_fourier_features(const LabeledDataset& data,
                                                     Eigen::Index features, double bandwidth,
                                                     std::uint64_t seed);

struct BatchPlan {
  int rounds = 150;
  Eigen::Index train_per_round = 10;
  Eigen::Index val_per_round = 40;
  Sampling sampling = Sampling::stratified;
  bool append_validation = true;

  [[nodiscard]] Eigen::Index batch_size() const noexcept { return train_per_round + val_per_round; }
  void validate() const;
};

/// One round's data, already split into the training and validation parts.
struct Batch {
  LabeledDataset train;
  LabeledDataset validation;

  [[nodiscard]] LabeledDataset whole() const { return LabeledDataset::concat(train, validation); }
};

/// Fresh i.i.d. draws from a synthetic generator for every round.
[[nodiscard]] std::vector<Batch> draw_batches(const GeneratorSpec& spec, const BatchPlan& plan,
                                              std::uint64_t seed);

/// Rows drawn without replacement from a finite pool.
[[nodiscard]] std::vector<Batch> draw_batches(const LabeledDataset& pool, const BatchPlan& plan,
                                              std::uint64_t seed);

/// Per-class counts for a split of `total` rows. Stratified mode allocates by
/// largest remainder against `proportions` with random tie-breaking.
[[nodiscard]] std::vector<Eigen::Index> stratified_counts(Eigen::Index total,
                                                          const std::vector<double>& proportions,
                                                          Rng& rng);

}  // namespace monotone
