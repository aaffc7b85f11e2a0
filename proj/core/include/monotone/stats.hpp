#pragma once

// Paired model comparison: McNemar's exact conditional test (one-tailed), the
// two update rules used by the holdout wrappers, and the arithmetic linking the
// per-round confidence level to the whole-run monotonicity guarantee.

#include <cstdint>
#include <stdexcept>

#include "monotone/dataset.hpp"
#include "monotone/models.hpp"

namespace monotone {

/// Joint correctness counts on one shared sample. First index: candidate
/// correct (1) or wrong (0); second index: incumbent.
struct PairedOutcomeCounts {
  std::int64_t n00 = 0;
  std::int64_t n01 = 0;  // candidate wrong, incumbent right (c)
  std::int64_t n10 = 0;  // candidate right, incumbent wrong (b)
  std::int64_t n11 = 0;

  [[nodiscard]] std::int64_t b() const noexcept { return n10; }
  [[nodiscard]] std::int64_t c() const noexcept { return n01; }
  [[nodiscard]] std::int64_t discordant() const noexcept { return n10 + n01; }
  [[nodiscard]] std::int64_t total() const noexcept { return n00 + n01 + n10 + n11; }

  /// Counts with only the discordant cells filled; enough for the test.
  [[nodiscard]] static PairedOutcomeCounts from_discordant(std::int64_t b, std::int64_t c);

  friend bool operator==(const PairedOutcomeCounts&, const PairedOutcomeCounts&) = default;
};

struct TestDecision {
  double p_value = 1.0;
  double alpha = 0.05;
  bool update = false;
  std::int64_t b = 0;
  std::int64_t c = 0;
};

class AlphaError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

[[nodiscard]] PairedOutcomeCounts paired_counts(const LinearModel& candidate,
                                                const LinearModel& incumbent,
                                                const LabeledDataset& sample);

/// P(X >= b) for X ~ Binomial(b + c, 1/2); 1 when there are no discordant pairs.
[[nodiscard]] double mcnemar_exact_one_tailed(const PairedOutcomeCounts& counts);

/// Holdout comparison: switch when the candidate is at least as good.
[[nodiscard]] bool update_simple(double p_current, double p_best);

/// Hypothesis-test gate: switch when p <= alpha. alpha must lie in (0, 0.5].
[[nodiscard]] TestDecision update_ht(const PairedOutcomeCounts& counts, double alpha);

/// 1 - beta^(1/n). May exceed 0.5 for small n; see clamp_alpha.
[[nodiscard]] double alpha_for_run_budget(double beta, std::int64_t n);

/// Clamp to the admissible (0, 0.5] range. Sets *clamped when it had to.
[[nodiscard]] double clamp_alpha(double alpha, bool* clamped = nullptr);

/// (1 - alpha)^n: lower bound on the probability that a whole run is monotone.
[[nodiscard]] double monotone_run_probability_bound(double alpha, std::int64_t n);

void validate_alpha(double alpha);

}  // namespace monotone
