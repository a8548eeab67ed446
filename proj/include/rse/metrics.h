#ifndef RSE_METRICS_H_
#define RSE_METRICS_H_

#include <cstddef>
#include <span>
#include <stdexcept>

#include "rse/attacks.h"

namespace rse {

class UndefinedMetricError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct MetricsRecord {
  double no_attack_accuracy = 0.0;
  double after_attack_accuracy = 0.0;
  double accuracy_shift = 0.0;
  double attack_success_rate = 0.0;
  double mean_substitution_rate = 0.0;
  std::size_t n_examples = 0;
  std::size_t n_attempted = 0;  // correctly classified before the attack
  std::size_t n_succeeded = 0;
};

// Accuracy shift over clean accuracy. Throws UndefinedMetricError when
// no_attack is 0, std::invalid_argument unless 0 <= shift <= no_attack <= 1.
double AttackSuccessRate(double shift, double no_attack);

// substituted_count / sentence length of a successful attack.
double SubstitutionRate(const AttackResult& result);

// Mean substitution rate over the successful results; 0 when none succeeded.
double MeanSubstitutionRate(std::span<const AttackResult> results);

// Builds a record from counts: n examples, `correct_before` of which were
// classified correctly, `correct_after` of which still are after the attack.
MetricsRecord MakeMetricsRecord(std::size_t n, std::size_t correct_before,
                                std::size_t correct_after,
                                double mean_substitution_rate);

// Throws std::logic_error if a record violates the metric identities.
void CheckMetricsRecord(const MetricsRecord& record);

}  // namespace rse

#endif  // RSE_METRICS_H_
