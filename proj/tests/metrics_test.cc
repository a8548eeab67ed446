#include "rse/metrics.h"

#include <gtest/gtest.h>

#include <cmath>

#include "table3.h"

namespace rse {
namespace {

TEST(AttackSuccessRate, ReferenceExamples) {
  EXPECT_NEAR(AttackSuccessRate(0.048, 0.870), 0.0552, 5e-5);
  EXPECT_NEAR(AttackSuccessRate(0.625, 0.888), 0.7038, 5e-5);
  EXPECT_EQ(AttackSuccessRate(0.0, 0.5), 0.0);
}

TEST(AttackSuccessRate, ReproducesEveryTable3Row) {
  for (const auto& row : testing::kTable3) {
    SCOPED_TRACE(std::string(row.dataset) + "/" + row.model + "/" + row.defense);
    EXPECT_NEAR(row.before - row.after, row.shift, 1e-9);
    double pct = 100.0 * AttackSuccessRate(row.shift / 100.0, row.before / 100.0);
    EXPECT_LE(std::abs(pct - row.success_rate), 0.01);
  }
}

TEST(AttackSuccessRate, Errors) {
  EXPECT_THROW(AttackSuccessRate(0.0, 0.0), UndefinedMetricError);
  EXPECT_THROW(AttackSuccessRate(0.6, 0.5), std::invalid_argument);
  EXPECT_THROW(AttackSuccessRate(-0.1, 0.5), std::invalid_argument);
}

AttackResult Result(bool success, int substituted, int length) {
  AttackResult r;
  r.success = success;
  r.substituted_count = substituted;
  r.original_tokens.assign(length, "w");
  r.adversarial_tokens = r.original_tokens;
  return r;
}

TEST(SubstitutionRate, SuccessfulAndFailedAttacks) {
  EXPECT_DOUBLE_EQ(SubstitutionRate(Result(true, 2, 10)), 0.2);
  EXPECT_THROW(SubstitutionRate(Result(false, 2, 10)), UndefinedMetricError);
}

TEST(MeanSubstitutionRate, MatchesHandComputedAverage) {
  std::vector<AttackResult> batch = {Result(true, 1, 4), Result(false, 3, 10),
                                     Result(true, 3, 20), Result(true, 2, 5)};
  double expect = (0.25 + 0.15 + 0.4) / 3.0;
  EXPECT_DOUBLE_EQ(MeanSubstitutionRate(batch), expect);
  EXPECT_EQ(MeanSubstitutionRate(std::vector<AttackResult>{}), 0.0);
}

TEST(MakeMetricsRecord, IdentitiesHold) {
  MetricsRecord r = MakeMetricsRecord(200, 190, 60, 0.14);
  EXPECT_DOUBLE_EQ(r.no_attack_accuracy, 0.95);
  EXPECT_DOUBLE_EQ(r.after_attack_accuracy, 0.30);
  EXPECT_DOUBLE_EQ(r.accuracy_shift, r.no_attack_accuracy - r.after_attack_accuracy);
  EXPECT_DOUBLE_EQ(r.attack_success_rate, 130.0 / 190.0);
  EXPECT_EQ(r.n_attempted, 190u);
  EXPECT_EQ(r.n_succeeded, 130u);
  EXPECT_NO_THROW(CheckMetricsRecord(r));
}

TEST(MakeMetricsRecord, ZeroCleanAccuracyHasZeroSuccessRate) {
  MetricsRecord r = MakeMetricsRecord(10, 0, 0, 0.0);
  EXPECT_EQ(r.attack_success_rate, 0.0);
  EXPECT_NO_THROW(CheckMetricsRecord(r));
}

TEST(CheckMetricsRecord, DetectsViolations) {
  MetricsRecord r = MakeMetricsRecord(100, 90, 45, 0.1);
  r.accuracy_shift += 0.01;
  EXPECT_THROW(CheckMetricsRecord(r), std::logic_error);
  r = MakeMetricsRecord(100, 90, 45, 0.1);
  r.attack_success_rate = 0.4;
  EXPECT_THROW(CheckMetricsRecord(r), std::logic_error);
  r = MakeMetricsRecord(100, 90, 45, 0.1);
  r.mean_substitution_rate = 1.5;
  EXPECT_THROW(CheckMetricsRecord(r), std::logic_error);
  EXPECT_THROW(MakeMetricsRecord(10, 5, 6, 0.0), std::invalid_argument);
}

}  // namespace
}  // namespace rse
