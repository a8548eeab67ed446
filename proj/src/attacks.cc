#include "rse/attacks.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rse/rse_encoder.h"

namespace rse {

int ArgMax(std::span<const double> probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                          probs.begin());
}

int SubstitutionBudget(std::size_t num_tokens, double max_rate) {
  int budget = static_cast<int>(
      std::floor(max_rate * static_cast<double>(num_tokens) + 1e-9));
  return std::max(1, budget);
}

namespace {

// Shared bookkeeping of one attack run.
class AttackRun {
 public:
  AttackRun(ProbabilityOracle& oracle, const LabeledExample& example)
      : counter_(oracle), label_(example.label) {
    result_.original_tokens = example.tokens;
    result_.adversarial_tokens = example.tokens;
    result_.label = example.label;
    std::vector<double> p = counter_.Query(example.tokens);
    if (ArgMax(p) != label_) {
      throw std::invalid_argument(
          "attack precondition: the example must be classified correctly");
    }
    result_.original_prob = p[label_];
    result_.final_prob = p[label_];
  }

  std::vector<double> Query(std::span<const std::string> tokens) {
    return counter_.Query(tokens);
  }

  ProbabilityOracle& oracle() { return counter_; }
  int label() const { return label_; }
  Tokens& current() { return result_.adversarial_tokens; }
  double current_prob() const { return result_.final_prob; }

  // Records `tokens` (already queried with result `p`) as the new state.
  // Returns true once the prediction has flipped.
  bool Accept(Tokens tokens, const std::vector<double>& p) {
    result_.adversarial_tokens = std::move(tokens);
    result_.final_prob = p[label_];
    result_.prob_trace.push_back(p[label_]);
    result_.success = ArgMax(p) != label_;
    return result_.success;
  }

  AttackResult Finish() {
    int changed = 0;
    for (std::size_t i = 0; i < result_.original_tokens.size(); ++i) {
      if (result_.original_tokens[i] != result_.adversarial_tokens[i]) {
        ++changed;
      }
    }
    result_.substituted_count = changed;
    result_.query_count = static_cast<int>(counter_.count());
    return std::move(result_);
  }

 private:
  CountingOracle counter_;
  int label_;
  AttackResult result_;
};

double Cosine(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return -std::numeric_limits<double>::infinity();
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

}  // namespace

AttackResult RandomAttack(ProbabilityOracle& oracle,
                          const LabeledExample& example,
                          const SynonymTable& table, Rng& rng,
                          double max_rate) {
  AttackRun run(oracle, example);
  std::vector<int> positions = SubstitutablePositions(example.tokens, table);
  std::shuffle(positions.begin(), positions.end(), rng);
  const int budget = SubstitutionBudget(example.tokens.size(), max_rate);
  int used = 0;
  for (int pos : positions) {
    if (used >= budget) break;
    const auto& syns = table.synonyms_of(example.tokens[pos]);
    std::uniform_int_distribution<std::size_t> pick(0, syns.size() - 1);
    Tokens trial = run.current();
    trial[pos] = syns[pick(rng)];
    auto p = run.Query(trial);
    ++used;
    if (run.Accept(std::move(trial), p)) break;
  }
  return run.Finish();
}

AttackResult TextfoolAttack(ProbabilityOracle& oracle,
                            const LabeledExample& example,
                            const SynonymTable& table,
                            const WordVectors* vectors, double max_rate) {
  constexpr double kNoSim = -std::numeric_limits<double>::infinity();
  AttackRun run(oracle, example);

  struct Word {
    int position;
    std::vector<std::string> candidates;  // best first
    double best_sim;
  };
  std::vector<Word> words;
  for (int pos : SubstitutablePositions(example.tokens, table)) {
    const auto& syns = table.synonyms_of(example.tokens[pos]);
    std::vector<std::pair<double, std::string>> ranked;
    const std::vector<double>* base = nullptr;
    if (vectors != nullptr) {
      auto it = vectors->find(example.tokens[pos]);
      if (it != vectors->end()) base = &it->second;
    }
    for (const auto& s : syns) {
      double sim = kNoSim;
      if (base != nullptr) {
        auto it = vectors->find(s);
        if (it != vectors->end()) sim = Cosine(*base, it->second);
      }
      ranked.emplace_back(sim, s);
    }
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) {
                       return a.first > b.first;
                     });
    Word w{pos, {}, ranked.front().first};
    for (auto& r : ranked) w.candidates.push_back(std::move(r.second));
    words.push_back(std::move(w));
  }
  std::stable_sort(words.begin(), words.end(),
                   [](const Word& a, const Word& b) {
                     return a.best_sim > b.best_sim;
                   });

  const int budget = SubstitutionBudget(example.tokens.size(), max_rate);
  int used = 0;
  for (const auto& w : words) {
    if (used >= budget) break;
    for (const auto& cand : w.candidates) {
      Tokens trial = run.current();
      trial[w.position] = cand;
      auto p = run.Query(trial);
      if (p[run.label()] < run.current_prob()) {
        ++used;
        if (run.Accept(std::move(trial), p)) return run.Finish();
        break;
      }
    }
  }
  return run.Finish();
}

double WordSaliency(ProbabilityOracle& oracle,
                    std::span<const std::string> tokens, int label,
                    std::size_t position) {
  if (position >= tokens.size()) {
    throw std::out_of_range("saliency position " + std::to_string(position) +
                            " beyond text length " +
                            std::to_string(tokens.size()));
  }
  double p = oracle.Query(tokens)[label];
  Tokens masked(tokens.begin(), tokens.end());
  masked[position] = std::string(kUnkToken);
  return p - oracle.Query(masked)[label];
}

namespace {

std::vector<PwwsCandidate> RankWithBase(ProbabilityOracle& oracle,
                                        std::span<const std::string> tokens,
                                        int label, const SynonymTable& table,
                                        double base_prob) {
  std::vector<PwwsCandidate> out;
  Tokens work(tokens.begin(), tokens.end());
  for (int pos : SubstitutablePositions(tokens, table)) {
    PwwsCandidate c;
    c.position = pos;
    const std::string original = work[pos];
    work[pos] = std::string(kUnkToken);
    c.saliency = base_prob - oracle.Query(work)[label];
    c.delta_p = -std::numeric_limits<double>::infinity();
    for (const auto& s : table.synonyms_of(original)) {
      work[pos] = s;
      double dp = base_prob - oracle.Query(work)[label];
      if (dp > c.delta_p) {
        c.delta_p = dp;
        c.replacement = s;
      }
    }
    work[pos] = original;
    out.push_back(std::move(c));
  }
  if (out.empty()) return out;
  double max_sal = out.front().saliency;
  for (const auto& c : out) max_sal = std::max(max_sal, c.saliency);
  double z = 0.0;
  for (const auto& c : out) z += std::exp(c.saliency - max_sal);
  for (auto& c : out) c.score = c.delta_p * std::exp(c.saliency - max_sal) / z;
  // Positions are ascending already, so a stable sort keeps the lower index
  // first among equal scores.
  std::stable_sort(out.begin(), out.end(),
                   [](const PwwsCandidate& a, const PwwsCandidate& b) {
                     return a.score > b.score;
                   });
  return out;
}

}  // namespace

std::vector<PwwsCandidate> PwwsRanking(ProbabilityOracle& oracle,
                                       std::span<const std::string> tokens,
                                       int label, const SynonymTable& table) {
  double base = oracle.Query(tokens)[label];
  return RankWithBase(oracle, tokens, label, table, base);
}

AttackResult PwwsAttack(ProbabilityOracle& oracle,
                        const LabeledExample& example,
                        const SynonymTable& table, double max_rate) {
  AttackRun run(oracle, example);
  auto ranking = RankWithBase(run.oracle(), example.tokens, example.label,
                              table, run.current_prob());
  const int budget = SubstitutionBudget(example.tokens.size(), max_rate);
  int used = 0;
  for (const auto& c : ranking) {
    if (used >= budget) break;
    Tokens trial = run.current();
    trial[c.position] = c.replacement;
    auto p = run.Query(trial);
    ++used;
    if (run.Accept(std::move(trial), p)) break;
  }
  return run.Finish();
}

}  // namespace rse
