#ifndef RSE_DEFENSES_H_
#define RSE_DEFENSES_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rse/attacks.h"
#include "rse/corpus.h"
#include "rse/lexicon.h"
#include "rse/model.h"
#include "rse/rse_encoder.h"
#include "rse/train.h"

namespace rse {

enum class DefenseKind { kNt, kAt, kSem, kRse };

std::string_view DefenseName(DefenseKind kind);
DefenseKind ParseDefense(std::string_view name);

// Collapses every connected synonym component onto its lexicographically
// smallest member. Words outside the lexicon map to themselves.
class SemEncoding {
 public:
  SemEncoding() = default;
  explicit SemEncoding(std::map<std::string, std::string> representative)
      : representative_(std::move(representative)) {}

  const std::string& Map(const std::string& word) const;
  Tokens Apply(std::span<const std::string> tokens) const;
  const std::map<std::string, std::string>& representatives() const {
    return representative_;
  }

 private:
  std::map<std::string, std::string> representative_;
};

SemEncoding BuildSemEncoding(const SynonymTable& table);

// A training regime plus the input transform its model must be queried
// through.
struct DefenseSpec {
  DefenseKind kind = DefenseKind::kNt;
  // kRse
  RseConfig rse;
  int rse_test_samples = 1;
  std::shared_ptr<const SynonymTable> lexicon;
  // kSem
  std::shared_ptr<const SemEncoding> sem;
  // kAt
  double at_fraction = 0.1;

  ExampleTransform TrainTransform() const;
  // Test-time transform; `stream` selects the randomness of RSE.
  ExampleTransform TestTransform() const;
  bool randomized() const { return kind == DefenseKind::kRse; }
};

// A classifier bundled with its vocabulary and mandatory test transform.
// Prediction is only exposed through the transform.
class DefendedModel {
 public:
  DefendedModel(std::shared_ptr<const Vocabulary> vocab,
                std::shared_ptr<const Classifier> model, DefenseSpec defense);

  // Applies the test transform (randomness drawn from `stream`) and returns
  // the class distribution. With rse_test_samples > 1 the result is the vote
  // share of each class over that many independent encodings.
  std::vector<double> PredictProba(std::span<const std::string> tokens,
                                   std::uint64_t stream) const;
  int Predict(std::span<const std::string> tokens, std::uint64_t stream) const;

  // Model input after the test transform; exposed for invariance checks.
  EncodedExample EncodeInput(std::span<const std::string> tokens, int label,
                             std::uint64_t stream) const;

  const Vocabulary& vocab() const { return *vocab_; }
  const Classifier& classifier() const { return *model_; }
  const DefenseSpec& defense() const { return defense_; }
  std::shared_ptr<const Vocabulary> vocab_ptr() const { return vocab_; }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::shared_ptr<const Classifier> model_;
  DefenseSpec defense_;
  ExampleTransform transform_;
};

// Stable 64-bit hash of a token sequence.
std::uint64_t HashTokens(std::span<const std::string> tokens);

// Black-box view of a defended model. Each distinct input text is encoded
// with randomness derived from (seed, text), so a test example gets one
// encoding sample and repeated queries of the same text agree.
class DefendedOracle : public ProbabilityOracle {
 public:
  DefendedOracle(const DefendedModel& model, std::uint64_t seed)
      : model_(model), seed_(seed) {}
  std::vector<double> Query(std::span<const std::string> tokens) override;
  int Predict(std::span<const std::string> tokens);

 private:
  const DefendedModel& model_;
  std::uint64_t seed_;
};

struct TrainSetup {
  ModelConfig model;
  TrainConfig train;
};

DefendedModel TrainNt(std::shared_ptr<const Vocabulary> vocab,
                      std::span<const LabeledExample> data,
                      const TrainSetup& setup, std::ostream* log = nullptr);

struct AtAugmentation {
  std::size_t requested = 0;   // ceil(fraction * N)
  std::size_t produced = 0;    // successful, verified adversarial examples
  std::size_t attempted = 0;
  std::vector<LabeledExample> examples;
  std::size_t shortfall() const { return requested - produced; }
};

// Crafts up to ceil(fraction * N) PWWS adversarial examples against `nt`,
// keeping only those re-verified as misclassified. Training examples are
// attacked in a seeded random order.
AtAugmentation CraftAdversarialExamples(const DefendedModel& nt,
                                        std::span<const LabeledExample> data,
                                        const SynonymTable& table,
                                        double fraction, double max_rate,
                                        std::uint64_t seed);

// Retrains from scratch on data plus the adversarial examples crafted
// against `nt`.
DefendedModel TrainAt(std::shared_ptr<const Vocabulary> vocab,
                      std::span<const LabeledExample> data,
                      const TrainSetup& setup, const DefendedModel& nt,
                      const SynonymTable& table, double fraction,
                      double max_rate, AtAugmentation* augmentation = nullptr,
                      std::ostream* log = nullptr);

DefendedModel TrainSem(std::shared_ptr<const Vocabulary> vocab,
                       std::span<const LabeledExample> data,
                       const TrainSetup& setup,
                       std::shared_ptr<const SemEncoding> encoding,
                       std::ostream* log = nullptr);

DefendedModel TrainRse(std::shared_ptr<const Vocabulary> vocab,
                       std::span<const LabeledExample> data,
                       const TrainSetup& setup,
                       std::shared_ptr<const SynonymTable> table,
                       const RseConfig& rse, int test_samples = 1,
                       std::ostream* log = nullptr);

// Self-describing JSON archive: architecture, dimensions, vocabulary (and its
// hash), defense spec including its lexicon or SEM map, and all tensors.
void SaveCheckpoint(const DefendedModel& model,
                    const std::filesystem::path& path);
DefendedModel LoadCheckpoint(const std::filesystem::path& path);

}  // namespace rse

#endif  // RSE_DEFENSES_H_
