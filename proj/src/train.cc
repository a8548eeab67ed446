#include "rse/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "rse/random.h"

namespace rse {

void TrainConfig::Validate() const {
  if (epochs < 0 || batch_size < 1 || learning_rate < 0.0 || clip_norm < 0.0) {
    throw std::invalid_argument("train config: invalid epochs/batch/lr/clip");
  }
}

std::uint64_t TrainStream(int epoch, std::size_t example_index) {
  return DeriveSeed(static_cast<std::uint64_t>(epoch), {example_index});
}

namespace {

class AdamState {
 public:
  explicit AdamState(const ParameterSet& params)
      : m_(params.ZerosLike()), v_(params.ZerosLike()) {}

  void Step(ParameterSet& params, const ParameterSet& grads, double lr) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, t_);
    const double c2 = 1.0 - std::pow(kBeta2, t_);
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (!params.at(i).trainable) continue;
      auto& m = m_.at(i).value;
      auto& v = v_.at(i).value;
      const auto& g = grads.at(i).value;
      m = kBeta1 * m + (1.0 - kBeta1) * g;
      v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
      params.at(i).value.array() -=
          lr * (m.array() / c1) / ((v.array() / c2).sqrt() + 1e-8);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  ParameterSet m_, v_;
  int t_ = 0;
};

}  // namespace

TrainReport Train(Classifier& model, const Vocabulary& vocab,
                  std::span<const LabeledExample> data,
                  const TrainConfig& config, std::ostream* log) {
  config.Validate();
  if (data.empty()) throw std::invalid_argument("train: empty data");
  const auto& mc = model.config();
  if (static_cast<int>(vocab.size()) != mc.vocab_size) {
    throw std::invalid_argument("train: vocabulary size mismatch");
  }
  for (const auto& ex : data) {
    if (ex.label < 0 || ex.label >= mc.num_classes) {
      throw std::invalid_argument("train: label outside model classes");
    }
  }

  TrainReport report;
  ParameterSet grads = model.params().ZerosLike();
  AdamState adam(model.params());
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(DeriveSeed(config.seed, {0x5f1e}));

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size();
         start += static_cast<std::size_t>(config.batch_size)) {
      std::size_t end = std::min(order.size(),
                                 start + static_cast<std::size_t>(config.batch_size));
      grads.SetZero();
      for (std::size_t k = start; k < end; ++k) {
        std::size_t idx = order[k];
        const LabeledExample& ex = data[idx];
        EncodedExample enc =
            config.encoder_hook
                ? Encode(config.encoder_hook(ex.tokens, TrainStream(epoch, idx)),
                         ex.label, vocab, mc.padding_length)
                : Encode(ex, vocab, mc.padding_length);
        double loss = model.LossAndGradient(enc, grads);
        if (!std::isfinite(loss)) {
          throw NonFiniteLossError("non-finite loss at epoch " +
                                   std::to_string(epoch) + ", example " +
                                   std::to_string(idx));
        }
        loss_sum += loss;
        // Cheap accuracy proxy: the loss is below log(2) only when the label
        // has probability > 1/2, which implies it is the argmax.
        if (loss < std::log(2.0)) ++correct;
      }
      const double scale = 1.0 / static_cast<double>(end - start);
      for (auto& t : grads.tensors()) t.value *= scale;
      if (config.clip_norm > 0.0) {
        double norm = grads.trainable_norm();
        if (!std::isfinite(norm)) {
          throw NonFiniteLossError("non-finite gradient at epoch " +
                                   std::to_string(epoch));
        }
        if (norm > config.clip_norm) {
          for (auto& t : grads.tensors()) t.value *= config.clip_norm / norm;
        }
      }
      if (config.optimizer == Optimizer::kAdam) {
        adam.Step(model.params(), grads, config.learning_rate);
      } else {
        for (std::size_t i = 0; i < grads.size(); ++i) {
          if (model.params().at(i).trainable) {
            model.params().at(i).value -=
                config.learning_rate * grads.at(i).value;
          }
        }
      }
    }
    EpochStats stats{epoch, loss_sum / static_cast<double>(data.size()),
                     static_cast<double>(correct) /
                         static_cast<double>(data.size())};
    report.epochs.push_back(stats);
    if (log != nullptr) {
      *log << "  epoch " << epoch << "  nll " << stats.mean_loss
           << "  train_acc(p>0.5) " << stats.train_accuracy << '\n';
    }
  }
  return report;
}

double EvaluateAccuracy(const Classifier& model, const Vocabulary& vocab,
                        std::span<const LabeledExample> data,
                        const ExampleTransform& transform) {
  if (data.empty()) throw std::invalid_argument("evaluate: empty data");
  std::size_t correct = 0;
  const int pad = model.config().padding_length;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto& ex = data[i];
    EncodedExample enc = transform ? Encode(transform(ex.tokens, i), ex.label,
                                            vocab, pad)
                                   : Encode(ex, vocab, pad);
    if (model.Predict(enc) == ex.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace rse
