#ifndef RSE_RSE_ENCODER_H_
#define RSE_RSE_ENCODER_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rse/corpus.h"
#include "rse/lexicon.h"
#include "rse/random.h"

namespace rse {

// Bounds of the per-example substitution rate. `seed` is the base of every
// stream the encoder is driven with in training and evaluation.
struct RseConfig {
  double r_min = 0.1;
  double r_max = 0.25;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument unless 0 <= r_min <= r_max <= 1.
  void Validate() const;
};

struct SubstitutionPlan {
  double rate = 0.0;
  std::vector<int> positions;              // sorted
  std::map<int, std::string> replacements;  // position -> synonym
};

// Uniform in [r_min, r_max].
double SampleRate(const RseConfig& config, Rng& rng);

// Positions holding a word with a non-empty synonym set. PAD/UNK never count.
std::vector<int> SubstitutablePositions(std::span<const std::string> tokens,
                                        const SynonymTable& table);

// round_half_up(rate * m) for m substitutable tokens.
int SubstitutionCount(double rate, int substitutable);

// Samples a rate, then round(rate * m) positions without replacement among
// the m substitutable ones, then one synonym per position.
SubstitutionPlan PlanSubstitution(std::span<const std::string> tokens,
                                  const SynonymTable& table,
                                  const RseConfig& config, Rng& rng);
// Same, with the rate already chosen.
SubstitutionPlan PlanSubstitutionAtRate(std::span<const std::string> tokens,
                                        const SynonymTable& table, double rate,
                                        Rng& rng);

// Throws std::out_of_range when a plan position lies outside `tokens`.
Tokens ApplyPlan(std::span<const std::string> tokens,
                 const SubstitutionPlan& plan);

Tokens RseEncodeTokens(std::span<const std::string> tokens,
                       const SynonymTable& table, const RseConfig& config,
                       Rng& rng);

// The neighborhood example x' of x; the label is carried over untouched.
LabeledExample RseEncode(const LabeledExample& example,
                         const SynonymTable& table, const RseConfig& config,
                         Rng& rng);

}  // namespace rse

#endif  // RSE_RSE_ENCODER_H_
