#include "rse/model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "rse/random.h"

namespace rse {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string_view ArchName(Arch arch) {
  switch (arch) {
    case Arch::kLstm:
      return "lstm";
    case Arch::kBiLstm:
      return "bilstm";
    case Arch::kWordCnn:
      return "word_cnn";
  }
  return "?";
}

Arch ParseArch(std::string_view name) {
  if (name == "lstm") return Arch::kLstm;
  if (name == "bilstm") return Arch::kBiLstm;
  if (name == "word_cnn") return Arch::kWordCnn;
  throw std::invalid_argument("unknown architecture: " + std::string(name));
}

void ModelConfig::Validate() const {
  if (vocab_size < 2 || num_classes < 2 || padding_length < 1 ||
      embedding_dim < 1) {
    throw std::invalid_argument("model config: non-positive dimension");
  }
  if (arch == Arch::kWordCnn) {
    if (num_filters < 1 || filter_widths.empty()) {
      throw std::invalid_argument("model config: word_cnn needs filters");
    }
    for (int w : filter_widths) {
      if (w < 1 || w > padding_length) {
        throw std::invalid_argument(
            "model config: filter width must lie in [1, padding_length]");
      }
    }
  } else if (hidden_dim < 1 || num_layers < 1) {
    throw std::invalid_argument("model config: recurrent dims must be >= 1");
  }
}

// ---------------------------------------------------------------------------
// ParameterSet

Tensor& ParameterSet::Add(std::string name, int rows, int cols,
                          bool trainable) {
  tensors_.push_back(
      Tensor{std::move(name), MatrixXd::Zero(rows, cols), trainable});
  return tensors_.back();
}

const Tensor& ParameterSet::find(std::string_view name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t;
  }
  throw std::out_of_range("no tensor named " + std::string(name));
}

ParameterSet ParameterSet::ZerosLike() const {
  ParameterSet out;
  for (const auto& t : tensors_) {
    out.Add(t.name, static_cast<int>(t.value.rows()),
            static_cast<int>(t.value.cols()), t.trainable);
  }
  return out;
}

void ParameterSet::SetZero() {
  for (auto& t : tensors_) t.value.setZero();
}

std::size_t ParameterSet::num_trainable() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) {
    if (t.trainable) n += static_cast<std::size_t>(t.value.size());
  }
  return n;
}

double& ParameterSet::trainable_coord(std::size_t flat_index) {
  for (auto& t : tensors_) {
    if (!t.trainable) continue;
    auto n = static_cast<std::size_t>(t.value.size());
    if (flat_index < n) return t.value.data()[flat_index];
    flat_index -= n;
  }
  throw std::out_of_range("trainable coordinate out of range");
}

double ParameterSet::trainable_norm() const {
  double sq = 0.0;
  for (const auto& t : tensors_) {
    if (t.trainable) sq += t.value.squaredNorm();
  }
  return std::sqrt(sq);
}

VectorXd Softmax(const VectorXd& logits) {
  VectorXd p = (logits.array() - logits.maxCoeff()).exp();
  return p / p.sum();
}

// ---------------------------------------------------------------------------
// Classifier

void Classifier::CheckShape(const EncodedExample& example) const {
  if (static_cast<int>(example.ids.size()) != config_.padding_length) {
    throw std::invalid_argument("example length " +
                                std::to_string(example.ids.size()) +
                                " != padding length " +
                                std::to_string(config_.padding_length));
  }
  if (example.true_length < 0 ||
      example.true_length > config_.padding_length) {
    throw std::invalid_argument("true_length out of range");
  }
  for (int id : example.ids) {
    if (id < 0 || id >= config_.vocab_size) {
      throw std::invalid_argument("token id " + std::to_string(id) +
                                  " outside vocabulary");
    }
  }
}

VectorXd Classifier::Logits(const EncodedExample& example) const {
  CheckShape(example);
  return Forward(example.ids, example.true_length, nullptr);
}

std::vector<double> Classifier::PredictProba(
    const EncodedExample& example) const {
  VectorXd p = Softmax(Logits(example));
  return {p.data(), p.data() + p.size()};
}

int Classifier::Predict(const EncodedExample& example) const {
  VectorXd logits = Logits(example);
  Eigen::Index best = 0;
  logits.maxCoeff(&best);
  return static_cast<int>(best);
}

double Classifier::LossAndGradient(const EncodedExample& example,
                                   ParameterSet& grads) const {
  CheckShape(example);
  if (example.label < 0 || example.label >= config_.num_classes) {
    throw std::invalid_argument("label out of range");
  }
  std::unique_ptr<Cache> cache;
  VectorXd logits = Forward(example.ids, example.true_length, &cache);
  double max = logits.maxCoeff();
  double lse = max + std::log((logits.array() - max).exp().sum());
  VectorXd dlogits = (logits.array() - lse).exp();
  dlogits(example.label) -= 1.0;
  Backward(example.ids, example.true_length, *cache, dlogits, grads);
  return lse - logits(example.label);
}

namespace {

double Sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void FillUniform(MatrixXd& m, double scale, Rng& rng) {
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
}

// Per-position activations of one LSTM direction.
struct LstmTrace {
  std::vector<VectorXd> i, f, g, o, c, tanh_c, h;
};

struct LstmWeights {
  const MatrixXd& w;  // 4H x In
  const MatrixXd& u;  // 4H x H
  const MatrixXd& b;  // 4H x 1
};

LstmTrace RunLstm(const LstmWeights& p, const std::vector<VectorXd>& xs,
                  bool reverse) {
  const int T = static_cast<int>(xs.size());
  const int H = static_cast<int>(p.u.cols());
  LstmTrace tr;
  for (auto* v : {&tr.i, &tr.f, &tr.g, &tr.o, &tr.c, &tr.tanh_c, &tr.h}) {
    v->resize(T);
  }
  VectorXd h = VectorXd::Zero(H);
  VectorXd c = VectorXd::Zero(H);
  for (int k = 0; k < T; ++k) {
    int t = reverse ? T - 1 - k : k;
    VectorXd z = p.w * xs[t] + p.u * h + p.b.col(0);
    tr.i[t] = z.segment(0, H).unaryExpr(&Sigmoid);
    tr.f[t] = z.segment(H, H).unaryExpr(&Sigmoid);
    tr.g[t] = z.segment(2 * H, H).array().tanh();
    tr.o[t] = z.segment(3 * H, H).unaryExpr(&Sigmoid);
    c = tr.f[t].cwiseProduct(c) + tr.i[t].cwiseProduct(tr.g[t]);
    tr.c[t] = c;
    tr.tanh_c[t] = c.array().tanh();
    h = tr.o[t].cwiseProduct(tr.tanh_c[t]);
    tr.h[t] = h;
  }
  return tr;
}

// Backprop through time. `dh` holds dLoss/dh_t per position from above;
// returns dLoss/dx_t per position.
std::vector<VectorXd> BackpropLstm(const LstmWeights& p,
                                   const std::vector<VectorXd>& xs,
                                   const LstmTrace& tr, bool reverse,
                                   const std::vector<VectorXd>& dh,
                                   MatrixXd& dw, MatrixXd& du, MatrixXd& db) {
  const int T = static_cast<int>(xs.size());
  const int H = static_cast<int>(p.u.cols());
  std::vector<VectorXd> dxs(T);
  VectorXd dh_next = VectorXd::Zero(H);
  VectorXd dc_next = VectorXd::Zero(H);
  VectorXd zero = VectorXd::Zero(H);
  VectorXd dz(4 * H);
  for (int k = T - 1; k >= 0; --k) {
    int t = reverse ? T - 1 - k : k;
    int prev = reverse ? t + 1 : t - 1;
    bool has_prev = k > 0;
    const VectorXd& c_prev = has_prev ? tr.c[prev] : zero;
    const VectorXd& h_prev = has_prev ? tr.h[prev] : zero;

    VectorXd dht = dh[t] + dh_next;
    VectorXd d_o = dht.cwiseProduct(tr.tanh_c[t]);
    VectorXd dc = dht.cwiseProduct(tr.o[t])
                      .cwiseProduct((1.0 - tr.tanh_c[t].array().square())
                                        .matrix()) +
                  dc_next;
    VectorXd di = dc.cwiseProduct(tr.g[t]);
    VectorXd dg = dc.cwiseProduct(tr.i[t]);
    VectorXd df = dc.cwiseProduct(c_prev);
    dc_next = dc.cwiseProduct(tr.f[t]);

    dz.segment(0, H) =
        di.array() * tr.i[t].array() * (1.0 - tr.i[t].array());
    dz.segment(H, H) =
        df.array() * tr.f[t].array() * (1.0 - tr.f[t].array());
    dz.segment(2 * H, H) = dg.array() * (1.0 - tr.g[t].array().square());
    dz.segment(3 * H, H) =
        d_o.array() * tr.o[t].array() * (1.0 - tr.o[t].array());

    dw.noalias() += dz * xs[t].transpose();
    if (has_prev) du.noalias() += dz * h_prev.transpose();
    db.col(0) += dz;
    dxs[t] = p.w.transpose() * dz;
    dh_next = p.u.transpose() * dz;
  }
  return dxs;
}

// Stacked (bi)directional LSTM over the first true_length tokens; the last
// state of each top-layer direction feeds a dense softmax layer.
class RecurrentClassifier : public Classifier {
 public:
  explicit RecurrentClassifier(ModelConfig config)
      : Classifier(std::move(config)) {
    const int D = config_.embedding_dim;
    const int H = config_.hidden_dim;
    const int dirs = directions();
    params_.Add("embedding", D, config_.vocab_size);
    for (int l = 0; l < config_.num_layers; ++l) {
      int in = l == 0 ? D : dirs * H;
      for (int d = 0; d < dirs; ++d) {
        std::string prefix =
            "lstm" + std::to_string(l) + (d == 0 ? ".fw" : ".bw");
        params_.Add(prefix + ".w", 4 * H, in);
        params_.Add(prefix + ".u", 4 * H, H);
        params_.Add(prefix + ".b", 4 * H, 1);
      }
    }
    params_.Add("output.w", config_.num_classes, dirs * H);
    params_.Add("output.b", config_.num_classes, 1);
  }

  void Initialize(Rng& rng) {
    const int H = config_.hidden_dim;
    for (auto& t : params_.tensors()) {
      if (t.name.starts_with("output")) continue;
      FillUniform(t.value, config_.init_scale, rng);
      if (t.name.ends_with(".b")) {
        t.value.setZero();
        t.value.block(H, 0, H, 1).setOnes();  // forget gate
      }
    }
    params_.tensors()[0].value.col(kPadId).setZero();
  }

  std::unique_ptr<Classifier> Clone() const override {
    return std::make_unique<RecurrentClassifier>(*this);
  }

 protected:
  struct RecurrentCache : Cache {
    // layer_inputs[l] are the inputs of layer l; traces[l][d] per direction.
    std::vector<std::vector<VectorXd>> layer_inputs;
    std::vector<std::vector<LstmTrace>> traces;
    VectorXd features;
  };

  VectorXd Forward(std::span<const int> ids, int true_length,
                   std::unique_ptr<Cache>* cache) const override {
    const int H = config_.hidden_dim;
    const int dirs = directions();
    const int T = true_length;
    const MatrixXd& emb = params_.at(0).value;

    auto rc = std::make_unique<RecurrentCache>();
    std::vector<VectorXd> xs(T);
    for (int t = 0; t < T; ++t) xs[t] = emb.col(ids[t]);

    VectorXd features = VectorXd::Zero(dirs * H);
    for (int l = 0; l < config_.num_layers; ++l) {
      std::vector<LstmTrace> traces;
      for (int d = 0; d < dirs; ++d) {
        traces.push_back(RunLstm(weights(l, d), xs, d == 1));
      }
      std::vector<VectorXd> next(T);
      for (int t = 0; t < T; ++t) {
        next[t].resize(dirs * H);
        for (int d = 0; d < dirs; ++d) {
          next[t].segment(d * H, H) = traces[d].h[t];
        }
      }
      rc->layer_inputs.push_back(std::move(xs));
      rc->traces.push_back(std::move(traces));
      xs = std::move(next);
    }
    if (T > 0) {
      const auto& top = rc->traces.back();
      features.segment(0, H) = top[0].h[T - 1];
      if (dirs == 2) features.segment(H, H) = top[1].h[0];
    }
    VectorXd logits = output_w() * features + output_b();
    if (cache != nullptr) {
      rc->features = std::move(features);
      *cache = std::move(rc);
    }
    return logits;
  }

  void Backward(std::span<const int> ids, int true_length, const Cache& cache,
                const VectorXd& dlogits, ParameterSet& grads) const override {
    const auto& rc = static_cast<const RecurrentCache&>(cache);
    const int H = config_.hidden_dim;
    const int dirs = directions();
    const int T = true_length;
    const std::size_t out_w = params_.size() - 2;

    grads.at(out_w).value.noalias() += dlogits * rc.features.transpose();
    grads.at(out_w + 1).value.col(0) += dlogits;
    if (T == 0) return;
    VectorXd dfeatures = output_w().transpose() * dlogits;

    // Gradient w.r.t. the outputs of the current layer, per position.
    std::vector<VectorXd> dout(T, VectorXd::Zero(dirs * H));
    dout[T - 1].segment(0, H) += dfeatures.segment(0, H);
    if (dirs == 2) dout[0].segment(H, H) += dfeatures.segment(H, H);

    for (int l = config_.num_layers - 1; l >= 0; --l) {
      const auto& xs = rc.layer_inputs[l];
      std::vector<VectorXd> din(T, VectorXd::Zero(xs.empty() ? 0 : xs[0].size()));
      for (int d = 0; d < dirs; ++d) {
        std::vector<VectorXd> dh(T);
        for (int t = 0; t < T; ++t) dh[t] = dout[t].segment(d * H, H);
        std::size_t base = tensor_index(l, d);
        auto dxs = BackpropLstm(weights(l, d), xs, rc.traces[l][d], d == 1, dh,
                                grads.at(base).value, grads.at(base + 1).value,
                                grads.at(base + 2).value);
        for (int t = 0; t < T; ++t) din[t] += dxs[t];
      }
      dout = std::move(din);
    }
    MatrixXd& demb = grads.at(0).value;
    for (int t = 0; t < T; ++t) {
      if (ids[t] != kPadId) demb.col(ids[t]) += dout[t];
    }
  }

 private:
  int directions() const { return config_.arch == Arch::kBiLstm ? 2 : 1; }

  std::size_t tensor_index(int layer, int dir) const {
    return 1 + 3 * static_cast<std::size_t>(layer * directions() + dir);
  }

  LstmWeights weights(int layer, int dir) const {
    std::size_t base = tensor_index(layer, dir);
    return {params_.at(base).value, params_.at(base + 1).value,
            params_.at(base + 2).value};
  }

  const MatrixXd& output_w() const {
    return params_.at(params_.size() - 2).value;
  }
  VectorXd output_b() const { return params_.at(params_.size() - 1).value.col(0); }
};

// Two embedding channels (frozen "static" and trainable), one convolution per
// filter width over the padded sequence, ReLU, max-over-time pooling, dense
// softmax layer.
class WordCnnClassifier : public Classifier {
 public:
  explicit WordCnnClassifier(ModelConfig config)
      : Classifier(std::move(config)) {
    const int D = config_.embedding_dim;
    const int F = config_.num_filters;
    params_.Add("embedding", D, config_.vocab_size);
    params_.Add("static_embedding", D, config_.vocab_size, false);
    for (int w : config_.filter_widths) {
      std::string prefix = "conv" + std::to_string(w);
      params_.Add(prefix + ".w_dynamic", F, w * D);
      params_.Add(prefix + ".w_static", F, w * D);
      params_.Add(prefix + ".b", F, 1);
    }
    params_.Add("output.w", config_.num_classes,
                F * static_cast<int>(config_.filter_widths.size()));
    params_.Add("output.b", config_.num_classes, 1);
  }

  void Initialize(Rng& rng) {
    for (auto& t : params_.tensors()) {
      if (t.name.starts_with("output") || t.name.ends_with(".b") ||
          t.name == "static_embedding") {
        continue;
      }
      FillUniform(t.value, config_.init_scale, rng);
    }
    params_.at(0).value.col(kPadId).setZero();
    params_.at(1).value = params_.at(0).value;
  }

  std::unique_ptr<Classifier> Clone() const override {
    return std::make_unique<WordCnnClassifier>(*this);
  }

 protected:
  struct CnnCache : Cache {
    std::vector<std::vector<int>> argmax;  // per width, per filter
    std::vector<VectorXd> pooled;          // per width
    VectorXd features;
  };

  VectorXd Forward(std::span<const int> ids, int /*true_length*/,
                   std::unique_ptr<Cache>* cache) const override {
    const int D = config_.embedding_dim;
    const int F = config_.num_filters;
    const int L = config_.padding_length;
    const MatrixXd& dyn = params_.at(0).value;
    const MatrixXd& stat = params_.at(1).value;

    auto cc = std::make_unique<CnnCache>();
    VectorXd features(F * static_cast<int>(config_.filter_widths.size()));
    for (std::size_t k = 0; k < config_.filter_widths.size(); ++k) {
      const int w = config_.filter_widths[k];
      const MatrixXd& wd = params_.at(2 + 3 * k).value;
      const MatrixXd& ws = params_.at(3 + 3 * k).value;
      const VectorXd b = params_.at(4 + 3 * k).value.col(0);
      VectorXd best = VectorXd::Constant(F, 0.0);
      std::vector<int> arg(F, -1);
      VectorXd window_d(w * D), window_s(w * D);
      for (int t = 0; t + w <= L; ++t) {
        for (int j = 0; j < w; ++j) {
          window_d.segment(j * D, D) = dyn.col(ids[t + j]);
          window_s.segment(j * D, D) = stat.col(ids[t + j]);
        }
        VectorXd a = wd * window_d + ws * window_s + b;
        for (int f = 0; f < F; ++f) {
          // ReLU then max: a position only wins while its activation is > 0.
          if (a(f) > best(f)) {
            best(f) = a(f);
            arg[f] = t;
          }
        }
      }
      features.segment(static_cast<Eigen::Index>(k) * F, F) = best;
      cc->argmax.push_back(std::move(arg));
    }
    VectorXd logits = params_.at(params_.size() - 2).value * features +
                      params_.at(params_.size() - 1).value.col(0);
    if (cache != nullptr) {
      cc->features = std::move(features);
      *cache = std::move(cc);
    }
    return logits;
  }

  void Backward(std::span<const int> ids, int /*true_length*/,
                const Cache& cache, const VectorXd& dlogits,
                ParameterSet& grads) const override {
    const auto& cc = static_cast<const CnnCache&>(cache);
    const int D = config_.embedding_dim;
    const int F = config_.num_filters;
    const std::size_t out_w = params_.size() - 2;
    const MatrixXd& dyn = params_.at(0).value;
    const MatrixXd& stat = params_.at(1).value;

    grads.at(out_w).value.noalias() += dlogits * cc.features.transpose();
    grads.at(out_w + 1).value.col(0) += dlogits;
    VectorXd dfeatures = params_.at(out_w).value.transpose() * dlogits;

    MatrixXd& demb = grads.at(0).value;
    for (std::size_t k = 0; k < config_.filter_widths.size(); ++k) {
      const int w = config_.filter_widths[k];
      const MatrixXd& wd = params_.at(2 + 3 * k).value;
      MatrixXd& dwd = grads.at(2 + 3 * k).value;
      MatrixXd& dws = grads.at(3 + 3 * k).value;
      MatrixXd& db = grads.at(4 + 3 * k).value;
      for (int f = 0; f < F; ++f) {
        int t = cc.argmax[k][f];
        if (t < 0) continue;  // pooled value is the ReLU floor
        double g = dfeatures(static_cast<Eigen::Index>(k) * F + f);
        db(f, 0) += g;
        for (int j = 0; j < w; ++j) {
          int id = ids[t + j];
          dwd.block(f, j * D, 1, D) += g * dyn.col(id).transpose();
          dws.block(f, j * D, 1, D) += g * stat.col(id).transpose();
          if (id != kPadId) {
            demb.col(id) += g * wd.block(f, j * D, 1, D).transpose();
          }
        }
      }
    }
  }
};

}  // namespace

std::unique_ptr<Classifier> MakeClassifier(const ModelConfig& config) {
  config.Validate();
  Rng rng(DeriveSeed(config.seed, {0x1d17}));
  if (config.arch == Arch::kWordCnn) {
    auto model = std::make_unique<WordCnnClassifier>(config);
    model->Initialize(rng);
    return model;
  }
  auto model = std::make_unique<RecurrentClassifier>(config);
  model->Initialize(rng);
  return model;
}

void LoadStaticEmbeddings(Classifier& model, const Vocabulary& vocab,
                          const WordVectors& vectors) {
  if (model.arch() != Arch::kWordCnn) return;
  auto& stat = model.params().tensors()[1].value;
  for (std::size_t id = 2; id < vocab.size(); ++id) {
    auto it = vectors.find(vocab.word_of(static_cast<int>(id)));
    if (it == vectors.end()) continue;
    if (static_cast<Eigen::Index>(it->second.size()) != stat.rows()) {
      throw std::invalid_argument("word vector dimension " +
                                  std::to_string(it->second.size()) +
                                  " != embedding dim");
    }
    stat.col(static_cast<Eigen::Index>(id)) =
        Eigen::Map<const VectorXd>(it->second.data(), stat.rows());
  }
}

}  // namespace rse
