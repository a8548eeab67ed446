#ifndef RSE_MODEL_H_
#define RSE_MODEL_H_

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rse/corpus.h"

namespace rse {

enum class Arch { kLstm, kBiLstm, kWordCnn };

std::string_view ArchName(Arch arch);
Arch ParseArch(std::string_view name);

// Dimensions of a reference architecture. The defaults are the full-size
// shapes (100-dim embeddings, two 100-unit LSTM layers, 3/4/5-wide filters);
// every field can be scaled down for desk runs.
struct ModelConfig {
  Arch arch = Arch::kLstm;
  int vocab_size = 2;
  int num_classes = 2;
  int padding_length = 50;
  int embedding_dim = 100;
  int hidden_dim = 100;  // per direction
  int num_layers = 2;
  int num_filters = 100;  // per filter width
  std::vector<int> filter_widths = {3, 4, 5};
  double init_scale = 0.1;
  std::uint64_t seed = 0;

  void Validate() const;
};

struct Tensor {
  std::string name;
  Eigen::MatrixXd value;
  bool trainable = true;
};

// Named parameter tensors in a fixed order. Gradients use the same layout.
class ParameterSet {
 public:
  Tensor& Add(std::string name, int rows, int cols, bool trainable = true);
  Tensor& at(std::size_t i) { return tensors_[i]; }
  const Tensor& at(std::size_t i) const { return tensors_[i]; }
  std::size_t size() const { return tensors_.size(); }
  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  const Tensor& find(std::string_view name) const;

  ParameterSet ZerosLike() const;
  void SetZero();

  // Flat view over the trainable tensors, in order.
  std::size_t num_trainable() const;
  double& trainable_coord(std::size_t flat_index);
  double trainable_norm() const;

 private:
  std::vector<Tensor> tensors_;
};

// Softmax of `logits`, shifted by the max for stability.
Eigen::VectorXd Softmax(const Eigen::VectorXd& logits);

// A trainable text classifier: ids -> P(y | x; theta).
class Classifier {
 public:
  explicit Classifier(ModelConfig config) : config_(std::move(config)) {}
  virtual ~Classifier() = default;

  const ModelConfig& config() const { return config_; }
  Arch arch() const { return config_.arch; }
  ParameterSet& params() { return params_; }
  const ParameterSet& params() const { return params_; }

  // Throws std::invalid_argument when the example does not match the model's
  // padding length or vocabulary size.
  Eigen::VectorXd Logits(const EncodedExample& example) const;
  std::vector<double> PredictProba(const EncodedExample& example) const;
  int Predict(const EncodedExample& example) const;

  // Returns -log P(label | x) and adds its gradient into `grads`, which must
  // share this model's parameter layout.
  double LossAndGradient(const EncodedExample& example,
                         ParameterSet& grads) const;

  virtual std::unique_ptr<Classifier> Clone() const = 0;

 protected:
  struct Cache {
    virtual ~Cache() = default;
  };

  // `cache`, when non-null, receives whatever Backward needs.
  virtual Eigen::VectorXd Forward(std::span<const int> ids, int true_length,
                                  std::unique_ptr<Cache>* cache) const = 0;
  virtual void Backward(std::span<const int> ids, int true_length,
                        const Cache& cache, const Eigen::VectorXd& dlogits,
                        ParameterSet& grads) const = 0;

  void CheckShape(const EncodedExample& example) const;

  ModelConfig config_;
  ParameterSet params_;
};

// Randomly initialized model of the configured architecture. The output layer
// starts at zero, so an untrained model predicts the uniform distribution.
std::unique_ptr<Classifier> MakeClassifier(const ModelConfig& config);

// Replaces the Word-CNN static channel with vectors from `vectors` where the
// vocabulary has them. No-op for other architectures.
void LoadStaticEmbeddings(Classifier& model, const Vocabulary& vocab,
                          const WordVectors& vectors);

}  // namespace rse

#endif  // RSE_MODEL_H_
