#include "rse/metrics.h"

#include <cmath>
#include <string>

namespace rse {

double AttackSuccessRate(double shift, double no_attack) {
  if (no_attack == 0.0) {
    throw UndefinedMetricError(
        "attack success rate undefined when no-attack accuracy is 0");
  }
  if (!(0.0 <= shift && shift <= no_attack && no_attack <= 1.0)) {
    throw std::invalid_argument("need 0 <= shift <= no_attack <= 1");
  }
  return shift / no_attack;
}

double SubstitutionRate(const AttackResult& result) {
  if (!result.success) {
    throw UndefinedMetricError(
        "substitution rate is defined for successful attacks only");
  }
  if (result.original_tokens.empty()) {
    throw UndefinedMetricError("substitution rate of an empty sentence");
  }
  return static_cast<double>(result.substituted_count) /
         static_cast<double>(result.original_tokens.size());
}

double MeanSubstitutionRate(std::span<const AttackResult> results) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : results) {
    if (!r.success) continue;
    sum += SubstitutionRate(r);
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

MetricsRecord MakeMetricsRecord(std::size_t n, std::size_t correct_before,
                                std::size_t correct_after,
                                double mean_substitution_rate) {
  if (n == 0 || correct_after > correct_before || correct_before > n) {
    throw std::invalid_argument("need 0 <= after <= before <= n, n > 0");
  }
  MetricsRecord r;
  const double dn = static_cast<double>(n);
  r.n_examples = n;
  r.n_attempted = correct_before;
  r.n_succeeded = correct_before - correct_after;
  r.no_attack_accuracy = static_cast<double>(correct_before) / dn;
  r.after_attack_accuracy = static_cast<double>(correct_after) / dn;
  r.accuracy_shift = r.no_attack_accuracy - r.after_attack_accuracy;
  r.attack_success_rate =
      correct_before == 0
          ? 0.0
          : AttackSuccessRate(r.accuracy_shift, r.no_attack_accuracy);
  r.mean_substitution_rate = mean_substitution_rate;
  return r;
}

void CheckMetricsRecord(const MetricsRecord& r) {
  auto fail = [](const std::string& what) {
    throw std::logic_error("metrics record violates " + what);
  };
  constexpr double kTol = 1e-9;
  for (double f : {r.no_attack_accuracy, r.after_attack_accuracy,
                   r.accuracy_shift, r.attack_success_rate,
                   r.mean_substitution_rate}) {
    if (!(f >= -kTol && f <= 1.0 + kTol)) fail("fraction bounds");
  }
  if (std::abs(r.accuracy_shift -
               (r.no_attack_accuracy - r.after_attack_accuracy)) > kTol) {
    fail("shift = no_attack - after_attack");
  }
  if (r.no_attack_accuracy > 0.0 &&
      std::abs(r.attack_success_rate -
               r.accuracy_shift / r.no_attack_accuracy) > kTol) {
    fail("success rate = shift / no_attack");
  }
  if (r.n_succeeded > r.n_attempted || r.n_attempted > r.n_examples) {
    fail("count ordering");
  }
}

}  // namespace rse
