#include "monotone/data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace monotone {

namespace {

// Labels for m rows, shuffled. Stratified draws use exact (largest-remainder)
// class counts, random draws are i.i.d. with the given proportions.
Labels draw_labels(Eigen::Index m, const std::vector<double>& proportions, Sampling sampling,
                   Rng& rng) {
  Labels labels;
  labels.reserve(static_cast<std::size_t>(m));
  if (sampling == Sampling::stratified) {
    const auto counts = stratified_counts(m, proportions, rng);
    for (std::size_t c = 0; c < counts.size(); ++c) {
      labels.insert(labels.end(), static_cast<std::size_t>(counts[c]), static_cast<int>(c));
    }
    std::shuffle(labels.begin(), labels.end(), rng);
  } else {
    std::discrete_distribution<int> pick(proportions.begin(), proportions.end());
    for (Eigen::Index i = 0; i < m; ++i) {
      labels.push_back(pick(rng));
    }
  }
  return labels;
}

const std::vector<double> kBalanced{0.5, 0.5};

}  // namespace

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::peaking:
      return "peaking";
    case GeneratorKind::dipping:
      return "dipping";
    case GeneratorKind::mnist:
      return "mnist";
  }
  return "unknown";
}

std::string to_string(Sampling sampling) {
  return sampling == Sampling::stratified ? "stratified" : "random";
}

GeneratorKind parse_generator_kind(const std::string& name) {
  if (name == "peaking") return GeneratorKind::peaking;
  if (name == "dipping") return GeneratorKind::dipping;
  if (name == "mnist") return GeneratorKind::mnist;
  throw DataError("unknown generator kind '" + name + "'");
}

Sampling parse_sampling(const std::string& name) {
  if (name == "stratified") return Sampling::stratified;
  if (name == "random") return Sampling::random;
  throw DataError("unknown sampling mode '" + name + "'");
}

void GeneratorSpec::validate() const {
  switch (kind) {
    case GeneratorKind::peaking:
      if (d < 1) throw DataError("generator.d must be >= 1");
      if (!(peaking.delta >= 0.0)) throw DataError("generator.delta must be >= 0");
      break;
    case GeneratorKind::dipping:
      if (!(dipping.majority > 0.5 && dipping.majority <= 1.0)) {
        throw DataError("generator.q must lie in (0.5, 1]");
      }
      if (!(dipping.outlier_magnitude > 0.0)) throw DataError("generator.G must be > 0");
      if (!(dipping.outlier_height >= 0.0)) throw DataError("generator.H must be >= 0");
      if (dipping.noise_dims < 0) throw DataError("generator.noise_dims must be >= 0");
      if (!(dipping.jitter >= 0.0)) throw DataError("generator.jitter must be >= 0");
      if (d != 2 + dipping.noise_dims) {
        throw DataError("generator.d must equal 2 + noise_dims for the dipping generator");
      }
      break;
    case GeneratorKind::mnist:
      if (mnist.features < 1) throw DataError("generator.features must be >= 1");
      if (!(mnist.bandwidth > 0.0)) throw DataError("generator.bandwidth must be > 0");
      if (d != mnist.features) throw DataError("generator.d must equal generator.features");
      break;
  }
}

std::vector<Eigen::Index> stratified_counts(Eigen::Index total,
                                            const std::vector<double>& proportions, Rng& rng) {
  const double mass = std::accumulate(proportions.begin(), proportions.end(), 0.0);
  if (proportions.empty() || !(mass > 0.0)) {
    throw DataError("class proportions must have positive mass");
  }
  std::vector<Eigen::Index> counts(proportions.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  Eigen::Index assigned = 0;
  for (std::size_t c = 0; c < proportions.size(); ++c) {
    const double exact = static_cast<double>(total) * proportions[c] / mass;
    counts[c] = static_cast<Eigen::Index>(std::floor(exact));
    assigned += counts[c];
    remainders.emplace_back(exact - std::floor(exact), c);
  }
  // Shuffle first so equal remainders are broken at random.
  std::shuffle(remainders.begin(), remainders.end(), rng);
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total; ++i) {
    ++counts[remainders[i % remainders.size()].second];
    ++assigned;
  }
  return counts;
}

LabeledDataset generate_peaking(const GeneratorSpec& spec, Eigen::Index m, Rng& rng,
                                Sampling sampling) {
  if (spec.kind != GeneratorKind::peaking) throw DataError("generator kind is not peaking");
  const Eigen::Index d = spec.d;
  const double shift = spec.peaking.delta / std::sqrt(static_cast<double>(d));
  Labels labels = draw_labels(m, kBalanced, sampling, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix x(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double sign = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
      x(i, j) = sign * shift + gauss(rng);
    }
  }
  return LabeledDataset(std::move(x), std::move(labels), 2);
}

LabeledDataset generate_dipping(const GeneratorSpec& spec, Eigen::Index m, Rng& rng,
                                Sampling sampling) {
  if (spec.kind != GeneratorKind::dipping) throw DataError("generator kind is not dipping");
  const DippingParams& p = spec.dipping;
  const Eigen::Index d = 2 + p.noise_dims;
  Labels labels = draw_labels(m, kBalanced, sampling, rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::bernoulli_distribution is_majority(p.majority);
  Matrix x(m, d);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double y = labels[static_cast<std::size_t>(i)] == 1 ? 1.0 : -1.0;
    const bool majority = is_majority(rng);
    const double u = majority ? 1.0 : -p.outlier_magnitude;
    const double v = majority ? 0.0 : p.outlier_height;
    x(i, 0) = y * u + p.jitter * gauss(rng);
    x(i, 1) = y * v + p.jitter * gauss(rng);
    for (Eigen::Index j = 2; j < d; ++j) {
      x(i, j) = gauss(rng);
    }
  }
  return LabeledDataset(std::move(x), std::move(labels), 2);
}

LabeledDataset generate(const GeneratorSpec& spec, Eigen::Index m, Rng& rng, Sampling sampling) {
  switch (spec.kind) {
    case GeneratorKind::peaking:
      return generate_peaking(spec, m, rng, sampling);
    case GeneratorKind::dipping:
      return generate_dipping(spec, m, rng, sampling);
    case GeneratorKind::mnist:
      break;
  }
  throw DataError("mnist is a file-backed source, not a generator");
}

LabeledDataset generate(const GeneratorSpec& spec, Eigen::Index m, Sampling sampling) {
  Rng rng = make_rng(spec.seed);
  return generate(spec, m, rng, sampling);
}

RandomFourierFeatures::RandomFourierFeatures(Eigen::Index input_dims, Eigen::Index features,
                                             double bandwidth, std::uint64_t seed) {
  if (input_dims < 1 || features < 1) {
    throw DataError("random Fourier features need positive input and output sizes");
  }
  if (!(bandwidth > 0.0)) {
    throw DataError("random Fourier bandwidth must be positive");
  }
  Rng rng = make_rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0 / bandwidth);
  std::uniform_real_distribution<double> uniform(0.0, 2.0 * std::numbers::pi);
  projection_.resize(input_dims, features);
  for (Eigen::Index i = 0; i < input_dims; ++i) {
    for (Eigen::Index j = 0; j < features; ++j) {
      projection_(i, j) = gauss(rng);
    }
  }
  phase_.resize(features);
  for (Eigen::Index j = 0; j < features; ++j) {
    phase_[j] = uniform(rng);
  }
}

LabeledDataset RandomFourierFeatures::transform(const LabeledDataset& data) const {
  if (data.dims() != input_dims()) {
    throw DataError("random Fourier features: dimension mismatch");
  }
  Matrix z = data.features() * projection_;
  z.rowwise() += phase_;
  const double scale = std::sqrt(2.0 / static_cast<double>(features()));
  z = (z.array().cos() * scale).matrix();
  return LabeledDataset(std::move(z), data.labels(), data.class_count());
}

LabeledDataset random_fourier_features(const LabeledDataset& data, Eigen::Index features,
                                       double bandwidth, std::uint64_t seed) {
  return RandomFourierFeatures(data.dims(), features, bandwidth, seed).transform(data);
}

void BatchPlan::validate() const {
  if (rounds < 1) throw DataError("plan.rounds must be >= 1");
  if (train_per_round < 1) throw DataError("plan.train_per_round must be >= 1");
  if (val_per_round < 0) throw DataError("plan.val_per_round must be >= 0");
}

std::vector<Batch> draw_batches(const GeneratorSpec& spec, const BatchPlan& plan,
                                std::uint64_t seed) {
  plan.validate();
  Rng rng = make_rng(seed);
  std::vector<Batch> batches;
  batches.reserve(static_cast<std::size_t>(plan.rounds));
  for (int i = 0; i < plan.rounds; ++i) {
    Batch batch;
    batch.train = generate(spec, plan.train_per_round, rng, plan.sampling);
    batch.validation = generate(spec, plan.val_per_round, rng, plan.sampling);
    batches.push_back(std::move(batch));
  }
  return batches;
}

std::vector<Batch> draw_batches(const LabeledDataset& pool, const BatchPlan& plan,
                                std::uint64_t seed) {
  plan.validate();
  const Eigen::Index needed = static_cast<Eigen::Index>(plan.rounds) * plan.batch_size();
  if (needed > pool.rows()) {
    throw DataError("insufficient source rows: plan needs " + std::to_string(needed) +
                    ", pool has " + std::to_string(pool.rows()));
  }
  Rng rng = make_rng(seed);
  const auto pool_counts = pool.class_counts();

  // Per-class queues of unused rows, shuffled once.
  std::vector<std::vector<Eigen::Index>> by_class(pool_counts.size());
  for (Eigen::Index r = 0; r < pool.rows(); ++r) {
    by_class[static_cast<std::size_t>(pool.labels()[static_cast<std::size_t>(r)])].push_back(r);
  }
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
  }
  std::vector<Eigen::Index> all(static_cast<std::size_t>(pool.rows()));
  std::iota(all.begin(), all.end(), Eigen::Index{0});
  std::shuffle(all.begin(), all.end(), rng);

  std::vector<double> proportions(pool_counts.begin(), pool_counts.end());
  std::vector<bool> used(static_cast<std::size_t>(pool.rows()), false);
  std::vector<std::size_t> class_cursor(by_class.size(), 0);
  std::size_t cursor = 0;

  auto take_random = [&](Eigen::Index count) {
    std::vector<Eigen::Index> rows;
    while (static_cast<Eigen::Index>(rows.size()) < count) {
      const Eigen::Index r = all.at(cursor++);
      if (!used[static_cast<std::size_t>(r)]) {
        used[static_cast<std::size_t>(r)] = true;
        rows.push_back(r);
      }
    }
    return rows;
  };
  auto take_stratified = [&](Eigen::Index count) {
    const auto counts = stratified_counts(count, proportions, rng);
    std::vector<Eigen::Index> rows;
    for (std::size_t c = 0; c < counts.size(); ++c) {
      for (Eigen::Index k = 0; k < counts[c]; ++k) {
        auto& queue = by_class[c];
        while (class_cursor[c] < queue.size() && used[static_cast<std::size_t>(queue[class_cursor[c]])]) {
          ++class_cursor[c];
        }
        if (class_cursor[c] >= queue.size()) {
          throw DataError("insufficient source rows for stratified sampling of class " +
                          std::to_string(c));
        }
        const Eigen::Index r = queue[class_cursor[c]++];
        used[static_cast<std::size_t>(r)] = true;
        rows.push_back(r);
      }
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    return rows;
  };

  std::vector<Batch> batches;
  batches.reserve(static_cast<std::size_t>(plan.rounds));
  for (int i = 0; i < plan.rounds; ++i) {
    const bool strat = plan.sampling == Sampling::stratified;
    const auto train_rows = strat ? take_stratified(plan.train_per_round)
                                  : take_random(plan.train_per_round);
    const auto val_rows = strat ? take_stratified(plan.val_per_round)
                                : take_random(plan.val_per_round);
    batches.push_back(Batch{pool.subset(train_rows), pool.subset(val_rows)});
  }
  return batches;
}

}  // namespace monotone
