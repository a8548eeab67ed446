#ifndef RSE_ATTACKS_H_
#define RSE_ATTACKS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rse/corpus.h"
#include "rse/lexicon.h"
#include "rse/random.h"

namespace rse {

// Black-box access to a classifier: tokens in, class distribution out.
class ProbabilityOracle {
 public:
  virtual ~ProbabilityOracle() = default;
  virtual std::vector<double> Query(std::span<const std::string> tokens) = 0;
};

// Forwards to another oracle and counts calls.
class CountingOracle : public ProbabilityOracle {
 public:
  explicit CountingOracle(ProbabilityOracle& inner) : inner_(inner) {}
  std::vector<double> Query(std::span<const std::string> tokens) override {
    ++count_;
    return inner_.Query(tokens);
  }
  std::size_t count() const { return count_; }

 private:
  ProbabilityOracle& inner_;
  std::size_t count_ = 0;
};

int ArgMax(std::span<const double> probs);

struct AttackResult {
  Tokens original_tokens;
  Tokens adversarial_tokens;
  int label = 0;
  bool success = false;
  int substituted_count = 0;
  int query_count = 0;
  double original_prob = 0.0;  // P(label | original)
  double final_prob = 0.0;     // P(label | adversarial)
  // True-class probability after each accepted substitution.
  std::vector<double> prob_trace;
};

// Largest number of substitutions an attack may make on `num_tokens` words:
// floor(max_rate * num_tokens), but at least one.
int SubstitutionBudget(std::size_t num_tokens, double max_rate);

// Substitutes random synonyms at randomly ordered substitutable positions
// until the prediction flips or the budget is spent.
AttackResult RandomAttack(ProbabilityOracle& oracle,
                          const LabeledExample& example,
                          const SynonymTable& table, Rng& rng,
                          double max_rate);

// Greedy similarity-ranked substitution. Candidates of each word are ranked
// by cosine similarity under `vectors` (lexicon order when vectors are absent
// or missing a word); words are visited by the similarity of their best
// candidate. A substitution is kept only if it lowers the true-class
// probability.
AttackResult TextfoolAttack(ProbabilityOracle& oracle,
                            const LabeledExample& example,
                            const SynonymTable& table,
                            const WordVectors* vectors, double max_rate);

// P(label | x) - P(label | x with tokens[position] replaced by UNK).
// Throws std::out_of_range when position >= tokens.size().
double WordSaliency(ProbabilityOracle& oracle,
                    std::span<const std::string> tokens, int label,
                    std::size_t position);

// Probability weighted word saliency. For each substitutable position the
// best synonym maximizes the drop in true-class probability (dP); positions
// are ranked by dP * softmax(saliency) (ties to the lower index) and
// substituted greedily until the prediction flips or the budget is spent.
AttackResult PwwsAttack(ProbabilityOracle& oracle,
                        const LabeledExample& example,
                        const SynonymTable& table, double max_rate);

struct PwwsCandidate {
  int position = 0;
  std::string replacement;
  double delta_p = 0.0;
  double saliency = 0.0;
  double score = 0.0;
};

// The ranked substitution list PwwsAttack walks through (best first).
std::vector<PwwsCandidate> PwwsRanking(ProbabilityOracle& oracle,
                                       std::span<const std::string> tokens,
                                       int label, const SynonymTable& table);

}  // namespace rse

#endif  // RSE_ATTACKS_H_
