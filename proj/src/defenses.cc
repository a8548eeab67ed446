#include "rse/defenses.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "rse/hash.h"

namespace rse {

std::string_view DefenseName(DefenseKind kind) {
  switch (kind) {
    case DefenseKind::kNt:
      return "nt";
    case DefenseKind::kAt:
      return "at";
    case DefenseKind::kSem:
      return "sem";
    case DefenseKind::kRse:
      return "rse";
  }
  return "?";
}

DefenseKind ParseDefense(std::string_view name) {
  if (name == "nt") return DefenseKind::kNt;
  if (name == "at") return DefenseKind::kAt;
  if (name == "sem") return DefenseKind::kSem;
  if (name == "rse") return DefenseKind::kRse;
  throw std::invalid_argument("unknown defense: " + std::string(name));
}

// ---------------------------------------------------------------------------
// SEM

const std::string& SemEncoding::Map(const std::string& word) const {
  auto it = representative_.find(word);
  return it == representative_.end() ? word : it->second;
}

Tokens SemEncoding::Apply(std::span<const std::string> tokens) const {
  Tokens out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(Map(t));
  return out;
}

SemEncoding BuildSemEncoding(const SynonymTable& table) {
  std::map<std::string, std::size_t> index;
  std::vector<std::string> words;
  auto id_of = [&](const std::string& w) {
    auto [it, inserted] = index.emplace(w, words.size());
    if (inserted) words.push_back(w);
    return it->second;
  };
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const auto& [w, syns] : table.entries()) {
    std::size_t a = id_of(w);
    for (const auto& s : syns) edges.emplace_back(a, id_of(s));
  }
  std::vector<std::size_t> parent(words.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (auto [a, b] : edges) {
    std::size_t ra = find(a), rb = find(b);
    if (ra == rb) continue;
    // Keep the lexicographically smaller word as the root.
    if (words[rb] < words[ra]) std::swap(ra, rb);
    parent[rb] = ra;
  }
  std::map<std::string, std::string> rep;
  for (std::size_t i = 0; i < words.size(); ++i) rep[words[i]] = words[find(i)];
  return SemEncoding(std::move(rep));
}

// ---------------------------------------------------------------------------
// DefenseSpec / DefendedModel

ExampleTransform DefenseSpec::TrainTransform() const {
  switch (kind) {
    case DefenseKind::kNt:
    case DefenseKind::kAt:
      return {};
    case DefenseKind::kSem:
    case DefenseKind::kRse:
      return TestTransform();
  }
  return {};
}

ExampleTransform DefenseSpec::TestTransform() const {
  if (kind == DefenseKind::kSem) {
    if (!sem) throw std::invalid_argument("sem defense without encoding");
    auto enc = sem;
    return [enc](std::span<const std::string> tokens, std::uint64_t) {
      return enc->Apply(tokens);
    };
  }
  if (kind == DefenseKind::kRse) {
    if (!lexicon) throw std::invalid_argument("rse defense without lexicon");
    rse.Validate();
    auto table = lexicon;
    RseConfig cfg = rse;
    return [table, cfg](std::span<const std::string> tokens,
                        std::uint64_t stream) {
      Rng rng(DeriveSeed(cfg.seed, {stream}));
      return RseEncodeTokens(tokens, *table, cfg, rng);
    };
  }
  return {};
}

DefendedModel::DefendedModel(std::shared_ptr<const Vocabulary> vocab,
                             std::shared_ptr<const Classifier> model,
                             DefenseSpec defense)
    : vocab_(std::move(vocab)),
      model_(std::move(model)),
      defense_(std::move(defense)),
      transform_(defense_.TestTransform()) {
  if (!vocab_ || !model_) {
    throw std::invalid_argument("defended model needs vocabulary and model");
  }
  if (static_cast<int>(vocab_->size()) != model_->config().vocab_size) {
    throw std::invalid_argument("vocabulary does not match model");
  }
  if (defense_.rse_test_samples < 1) {
    throw std::invalid_argument("rse_test_samples must be >= 1");
  }
}

EncodedExample DefendedModel::EncodeInput(std::span<const std::string> tokens,
                                          int label,
                                          std::uint64_t stream) const {
  const int pad = model_->config().padding_length;
  if (!transform_) return Encode(tokens, label, *vocab_, pad);
  return Encode(transform_(tokens, stream), label, *vocab_, pad);
}

std::vector<double> DefendedModel::PredictProba(
    std::span<const std::string> tokens, std::uint64_t stream) const {
  const int samples =
      defense_.randomized() ? defense_.rse_test_samples : 1;
  if (samples == 1) return model_->PredictProba(EncodeInput(tokens, 0, stream));
  std::vector<double> votes(model_->config().num_classes, 0.0);
  for (int s = 0; s < samples; ++s) {
    int c = model_->Predict(EncodeInput(
        tokens, 0, DeriveSeed(stream, {static_cast<std::uint64_t>(s)})));
    votes[c] += 1.0 / samples;
  }
  return votes;
}

int DefendedModel::Predict(std::span<const std::string> tokens,
                           std::uint64_t stream) const {
  return ArgMax(PredictProba(tokens, stream));
}

std::uint64_t HashTokens(std::span<const std::string> tokens) {
  // FNV-1a with a separator byte between tokens.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto feed = [&h](unsigned char c) {
    h ^= c;
    h *= 0x100000001b3ULL;
  };
  for (const auto& t : tokens) {
    for (char c : t) feed(static_cast<unsigned char>(c));
    feed(0x1f);
  }
  return h;
}

std::vector<double> DefendedOracle::Query(std::span<const std::string> tokens) {
  return model_.PredictProba(tokens, DeriveSeed(seed_, {HashTokens(tokens)}));
}

int DefendedOracle::Predict(std::span<const std::string> tokens) {
  return ArgMax(Query(tokens));
}

// ---------------------------------------------------------------------------
// Training regimes

namespace {

DefendedModel TrainWith(std::shared_ptr<const Vocabulary> vocab,
                        std::span<const LabeledExample> data,
                        const TrainSetup& setup, DefenseSpec defense,
                        std::ostream* log) {
  ModelConfig mc = setup.model;
  mc.vocab_size = static_cast<int>(vocab->size());
  std::unique_ptr<Classifier> model = MakeClassifier(mc);
  TrainConfig tc = setup.train;
  tc.encoder_hook = defense.TrainTransform();
  Train(*model, *vocab, data, tc, log);
  return DefendedModel(std::move(vocab), std::move(model), std::move(defense));
}

}  // namespace

DefendedModel TrainNt(std::shared_ptr<const Vocabulary> vocab,
                      std::span<const LabeledExample> data,
                      const TrainSetup& setup, std::ostream* log) {
  return TrainWith(std::move(vocab), data, setup, DefenseSpec{}, log);
}

AtAugmentation CraftAdversarialExamples(const DefendedModel& nt,
                                        std::span<const LabeledExample> data,
                                        const SynonymTable& table,
                                        double fraction, double max_rate,
                                        std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("attack fraction must lie in (0, 1]");
  }
  AtAugmentation aug;
  aug.requested = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(data.size()) - 1e-9));
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(DeriveSeed(seed, {0xa7}));
  std::shuffle(order.begin(), order.end(), rng);

  DefendedOracle oracle(nt, DeriveSeed(seed, {0xa7, 1}));
  const int pad = nt.classifier().config().padding_length;
  for (std::size_t idx : order) {
    if (aug.produced >= aug.requested) break;
    LabeledExample ex = data[idx];
    if (static_cast<int>(ex.tokens.size()) > pad) ex.tokens.resize(pad);
    if (oracle.Predict(ex.tokens) != ex.label) continue;
    ++aug.attempted;
    AttackResult r = PwwsAttack(oracle, ex, table, max_rate);
    if (!r.success || oracle.Predict(r.adversarial_tokens) == ex.label) {
      continue;
    }
    aug.examples.push_back({std::move(r.adversarial_tokens), ex.label});
    ++aug.produced;
  }
  return aug;
}

DefendedModel TrainAt(std::shared_ptr<const Vocabulary> vocab,
                      std::span<const LabeledExample> data,
                      const TrainSetup& setup, const DefendedModel& nt,
                      const SynonymTable& table, double fraction,
                      double max_rate, AtAugmentation* augmentation,
                      std::ostream* log) {
  AtAugmentation aug = CraftAdversarialExamples(nt, data, table, fraction,
                                                max_rate, setup.train.seed);
  if (log != nullptr) {
    *log << "  at: crafted " << aug.produced << "/" << aug.requested
         << " adversarial examples (" << aug.attempted << " attacked, shortfall "
         << aug.shortfall() << ")\n";
  }
  std::vector<LabeledExample> mixed(data.begin(), data.end());
  mixed.insert(mixed.end(), aug.examples.begin(), aug.examples.end());
  DefenseSpec spec;
  spec.kind = DefenseKind::kAt;
  spec.at_fraction = fraction;
  DefendedModel out = TrainWith(std::move(vocab), mixed, setup, spec, log);
  if (augmentation != nullptr) *augmentation = std::move(aug);
  return out;
}

DefendedModel TrainSem(std::shared_ptr<const Vocabulary> vocab,
                       std::span<const LabeledExample> data,
                       const TrainSetup& setup,
                       std::shared_ptr<const SemEncoding> encoding,
                       std::ostream* log) {
  DefenseSpec spec;
  spec.kind = DefenseKind::kSem;
  spec.sem = std::move(encoding);
  return TrainWith(std::move(vocab), data, setup, std::move(spec), log);
}

DefendedModel TrainRse(std::shared_ptr<const Vocabulary> vocab,
                       std::span<const LabeledExample> data,
                       const TrainSetup& setup,
                       std::shared_ptr<const SynonymTable> table,
                       const RseConfig& rse, int test_samples,
                       std::ostream* log) {
  DefenseSpec spec;
  spec.kind = DefenseKind::kRse;
  spec.rse = rse;
  spec.rse_test_samples = test_samples;
  spec.lexicon = std::move(table);
  return TrainWith(std::move(vocab), data, setup, std::move(spec), log);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

using nlohmann::json;

constexpr std::string_view kCheckpointFormat = "rse-checkpoint/1";

std::string VocabHash(const Vocabulary& vocab) {
  std::string joined;
  for (const auto& w : vocab.words()) joined += w + '\n';
  return Sha256Hex(joined);
}

}  // namespace

void SaveCheckpoint(const DefendedModel& model,
                    const std::filesystem::path& path) {
  const auto& mc = model.classifier().config();
  json j;
  j["format"] = kCheckpointFormat;
  j["arch"] = ArchName(mc.arch);
  j["dims"] = {{"vocab_size", mc.vocab_size},
               {"num_classes", mc.num_classes},
               {"padding_length", mc.padding_length},
               {"embedding_dim", mc.embedding_dim},
               {"hidden_dim", mc.hidden_dim},
               {"num_layers", mc.num_layers},
               {"num_filters", mc.num_filters},
               {"filter_widths", mc.filter_widths},
               {"init_scale", mc.init_scale},
               {"seed", mc.seed}};
  j["vocab"] = model.vocab().words();
  j["vocab_hash"] = VocabHash(model.vocab());

  const DefenseSpec& d = model.defense();
  json dj;
  dj["kind"] = DefenseName(d.kind);
  if (d.kind == DefenseKind::kAt) dj["at_fraction"] = d.at_fraction;
  if (d.kind == DefenseKind::kRse) {
    dj["rse"] = {{"r_min", d.rse.r_min},
                 {"r_max", d.rse.r_max},
                 {"seed", d.rse.seed},
                 {"test_samples", d.rse_test_samples}};
    dj["lexicon"] = d.lexicon->entries();
    dj["lexicon_source"] = d.lexicon->source_name();
  }
  if (d.kind == DefenseKind::kSem) dj["sem"] = d.sem->representatives();
  j["defense"] = std::move(dj);

  json tensors = json::array();
  for (const auto& t : model.classifier().params().tensors()) {
    tensors.push_back({{"name", t.name},
                       {"rows", t.value.rows()},
                       {"cols", t.value.cols()},
                       {"trainable", t.trainable},
                       {"data", std::vector<double>(
                                    t.value.data(),
                                    t.value.data() + t.value.size())}});
  }
  j["tensors"] = std::move(tensors);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump() << '\n';
}

DefendedModel LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open checkpoint " + path.string());
  json j = json::parse(in);
  if (j.at("format") != kCheckpointFormat) {
    throw std::runtime_error(path.string() + ": not an rse checkpoint");
  }
  ModelConfig mc;
  mc.arch = ParseArch(j.at("arch").get<std::string>());
  const json& dims = j.at("dims");
  mc.vocab_size = dims.at("vocab_size");
  mc.num_classes = dims.at("num_classes");
  mc.padding_length = dims.at("padding_length");
  mc.embedding_dim = dims.at("embedding_dim");
  mc.hidden_dim = dims.at("hidden_dim");
  mc.num_layers = dims.at("num_layers");
  mc.num_filters = dims.at("num_filters");
  mc.filter_widths = dims.at("filter_widths").get<std::vector<int>>();
  mc.init_scale = dims.at("init_scale");
  mc.seed = dims.at("seed");

  auto words = j.at("vocab").get<std::vector<std::string>>();
  if (words.size() < 2) throw std::runtime_error("checkpoint vocab too small");
  auto vocab = std::make_shared<Vocabulary>(
      std::vector<std::string>(words.begin() + 2, words.end()));
  if (VocabHash(*vocab) != j.at("vocab_hash")) {
    throw std::runtime_error(path.string() + ": vocabulary hash mismatch");
  }

  std::unique_ptr<Classifier> model = MakeClassifier(mc);
  const json& tensors = j.at("tensors");
  auto& params = model->params();
  if (tensors.size() != params.size()) {
    throw std::runtime_error(path.string() + ": tensor count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const json& tj = tensors[i];
    auto& t = params.at(i);
    if (tj.at("name") != t.name || tj.at("rows") != t.value.rows() ||
        tj.at("cols") != t.value.cols()) {
      throw std::runtime_error(path.string() + ": tensor " + t.name +
                               " does not match the architecture");
    }
    auto data = tj.at("data").get<std::vector<double>>();
    std::copy(data.begin(), data.end(), t.value.data());
  }

  DefenseSpec spec;
  const json& dj = j.at("defense");
  spec.kind = ParseDefense(dj.at("kind").get<std::string>());
  if (spec.kind == DefenseKind::kAt) spec.at_fraction = dj.at("at_fraction");
  if (spec.kind == DefenseKind::kRse) {
    const json& r = dj.at("rse");
    spec.rse.r_min = r.at("r_min");
    spec.rse.r_max = r.at("r_max");
    spec.rse.seed = r.at("seed");
    spec.rse_test_samples = r.at("test_samples");
    spec.lexicon = std::make_shared<SynonymTable>(
        dj.at("lexicon").get<SynonymTable::Entries>(),
        dj.value("lexicon_source", std::string()));
  }
  if (spec.kind == DefenseKind::kSem) {
    spec.sem = std::make_shared<SemEncoding>(
        dj.at("sem").get<std::map<std::string, std::string>>());
  }
  return DefendedModel(std::move(vocab), std::move(model), std::move(spec));
}

}  // namespace rse
