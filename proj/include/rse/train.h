#ifndef RSE_TRAIN_H_
#define RSE_TRAIN_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "rse/corpus.h"
#include "rse/model.h"

namespace rse {

// Rewrites an example's tokens before encoding. `stream` identifies the
// (epoch, example) or (example, query) slot, so a randomized transform can
// seed itself deterministically from it.
using ExampleTransform =
    std::function<Tokens(std::span<const std::string> tokens,
                         std::uint64_t stream)>;

enum class Optimizer { kSgd, kAdam };

struct TrainConfig {
  int epochs = 10;
  int batch_size = 32;
  double learning_rate = 0.5;
  Optimizer optimizer = Optimizer::kSgd;
  // Rescales the batch gradient when its norm exceeds this; 0 disables.
  double clip_norm = 5.0;
  std::uint64_t seed = 0;
  ExampleTransform encoder_hook;

  void Validate() const;
};

class NonFiniteLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpochStats {
  int epoch = 0;
  double mean_loss = 0.0;
  double train_accuracy = 0.0;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
};

// Mini-batch training on the negative log-likelihood. Each epoch shuffles the
// data; when an encoder hook is set, every batch example is replaced by the
// hook's output before encoding.
TrainReport Train(Classifier& model, const Vocabulary& vocab,
                  std::span<const LabeledExample> data,
                  const TrainConfig& config, std::ostream* log = nullptr);

std::uint64_t TrainStream(int epoch, std::size_t example_index);

// Fraction of `data` whose argmax prediction equals the label, after the
// optional transform (stream = example index).
double EvaluateAccuracy(const Classifier& model, const Vocabulary& vocab,
                        std::span<const LabeledExample> data,
                        const ExampleTransform& transform = {});

}  // namespace rse

#endif  // RSE_TRAIN_H_
