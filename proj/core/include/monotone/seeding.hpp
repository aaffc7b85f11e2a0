#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace monotone {

using Rng = std::mt19937_64;

/// Independent random streams inside one run.
enum class Stream : std::uint64_t {
  batches = 1,
  test_set = 2,
  folds = 3,
  projection = 4,
};

[[nodiscard]] std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for run `run_index` of an experiment seeded with `master`.
[[nodiscard]] std::uint64_t run_seed(std::uint64_t master, std::uint64_t run_index) noexcept;

/// Seed for one purpose-specific stream of a run.
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t run, Stream stream) noexcept;

/// Further split of a stream, e.g. per learner or per fold generator.
[[nodiscard]] std::uint64_t stream_seed(std::uint64_t run, Stream stream,
                                        std::string_view tag) noexcept;

[[nodiscard]] inline Rng make_rng(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  return Rng(seq);
}

}  // namespace monotone
