#include "monotone/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace monotone {

PairedOutcomeCounts PairedOutcomeCounts::from_discordant(std::int64_t b, std::int64_t c) {
  PairedOutcomeCounts counts;
  counts.n10 = b;
  counts.n01 = c;
  return counts;
}

PairedOutcomeCounts paired_counts(const LinearModel& candidate, const LinearModel& incumbent,
                                  const LabeledDataset& sample) {
  if (sample.empty()) {
    throw DataError("empty evaluation set");
  }
  const std::vector<bool> cand = correctness(candidate, sample);
  const std::vector<bool> inc = correctness(incumbent, sample);
  PairedOutcomeCounts counts;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (cand[i]) {
      (inc[i] ? counts.n11 : counts.n10) += 1;
    } else {
      (inc[i] ? counts.n01 : counts.n00) += 1;
    }
  }
  return counts;
}

double mcnemar_exact_one_tailed(const PairedOutcomeCounts& counts) {
  const std::int64_t n = counts.discordant();
  const std::int64_t b = counts.b();
  if (n == 0 || b <= 0) {
    return 1.0;
  }
  if (b > n) {
    return 0.0;
  }
  // First tail term C(n, b) / 2^n in log space, then the ratio recurrence
  // t_{k+1} = t_k (n - k) / (k + 1) over the rest of the upper tail.
  const long double log_first = std::lgamma(static_cast<long double>(n) + 1) -
                                std::lgamma(static_cast<long double>(b) + 1) -
                                std::lgamma(static_cast<long double>(n - b) + 1) -
                                static_cast<long double>(n) * std::log(2.0L);
  long double term = std::exp(log_first);
  long double tail = term;
  for (std::int64_t k = b; k < n; ++k) {
    term *= static_cast<long double>(n - k) / static_cast<long double>(k + 1);
    tail += term;
  }
  return std::clamp(static_cast<double>(tail), 0.0, 1.0);
}

bool update_simple(double p_current, double p_best) { return p_current <= p_best; }

void validate_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 0.5)) {
    throw AlphaError("alpha must lie in (0, 0.5], got " + std::to_string(alpha));
  }
}

TestDecision update_ht(const PairedOutcomeCounts& counts, double alpha) {
  validate_alpha(alpha);
  TestDecision decision;
  decision.alpha = alpha;
  decision.b = counts.b();
  decision.c = counts.c();
  decision.p_value = mcnemar_exact_one_tailed(counts);
  decision.update = decision.p_value <= alpha;
  return decision;
}

double alpha_for_run_budget(double beta, std::int64_t n) {
  if (!(beta > 0.0 && beta < 1.0) || n < 1) {
    throw AlphaError("alpha_for_run_budget needs 0 < beta < 1 and n >= 1");
  }
  return -std::expm1(std::log(beta) / static_cast<double>(n));
}

double clamp_alpha(double alpha, bool* clamped) {
  const bool over = alpha > 0.5;
  if (clamped != nullptr) {
    *clamped = over;
  }
  return over ? 0.5 : alpha;
}

double monotone_run_probability_bound(double alpha, std::int64_t n) {
  validate_alpha(alpha);
  if (n < 1) {
    throw AlphaError("round count must be positive");
  }
  return std::exp(static_cast<double>(n) * std::log1p(-alpha));
}

}  // namespace monotone
