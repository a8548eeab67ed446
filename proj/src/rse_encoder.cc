#include "rse/rse_encoder.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rse {

void RseConfig::Validate() const {
  if (!(0.0 <= r_min && r_min <= r_max && r_max <= 1.0)) {
    throw std::invalid_argument("rse config: need 0 <= r_min <= r_max <= 1");
  }
}

double SampleRate(const RseConfig& config, Rng& rng) {
  config.Validate();
  if (config.r_min == config.r_max) return config.r_min;
  std::uniform_real_distribution<double> dist(config.r_min, config.r_max);
  return dist(rng);
}

std::vector<int> SubstitutablePositions(std::span<const std::string> tokens,
                                        const SynonymTable& table) {
  std::vector<int> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] == kPadToken || tokens[i] == kUnkToken) continue;
    if (table.has_synonyms(tokens[i])) out.push_back(static_cast<int>(i));
  }
  return out;
}

int SubstitutionCount(double rate, int substitutable) {
  return static_cast<int>(std::floor(rate * substitutable + 0.5));
}

SubstitutionPlan PlanSubstitutionAtRate(std::span<const std::string> tokens,
                                        const SynonymTable& table, double rate,
                                        Rng& rng) {
  SubstitutionPlan plan;
  plan.rate = rate;
  std::vector<int> pool = SubstitutablePositions(tokens, table);
  const int m = static_cast<int>(pool.size());
  const int k = std::min(m, SubstitutionCount(rate, m));
  // Partial Fisher-Yates: the first k slots become a uniform k-subset.
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, m - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  plan.positions.assign(pool.begin(), pool.begin() + k);
  std::sort(plan.positions.begin(), plan.positions.end());
  for (int pos : plan.positions) {
    const auto& syns = table.synonyms_of(tokens[pos]);
    std::uniform_int_distribution<std::size_t> pick(0, syns.size() - 1);
    plan.replacements.emplace(pos, syns[pick(rng)]);
  }
  return plan;
}

SubstitutionPlan PlanSubstitution(std::span<const std::string> tokens,
                                  const SynonymTable& table,
                                  const RseConfig& config, Rng& rng) {
  double rate = SampleRate(config, rng);
  return PlanSubstitutionAtRate(tokens, table, rate, rng);
}

Tokens ApplyPlan(std::span<const std::string> tokens,
                 const SubstitutionPlan& plan) {
  Tokens out(tokens.begin(), tokens.end());
  for (const auto& [pos, word] : plan.replacements) {
    if (pos < 0 || static_cast<std::size_t>(pos) >= out.size()) {
      throw std::out_of_range("plan position " + std::to_string(pos) +
                              " outside token list of length " +
                              std::to_string(out.size()));
    }
    out[pos] = word;
  }
  return out;
}

Tokens RseEncodeTokens(std::span<const std::string> tokens,
                       const SynonymTable& table, const RseConfig& config,
                       Rng& rng) {
  return ApplyPlan(tokens, PlanSubstitution(tokens, table, config, rng));
}

LabeledExample RseEncode(const LabeledExample& example,
                         const SynonymTable& table, const RseConfig& config,
                         Rng& rng) {
  return {RseEncodeTokens(example.tokens, table, config, rng), example.label};
}

}  // namespace rse
