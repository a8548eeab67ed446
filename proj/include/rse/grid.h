#ifndef RSE_GRID_H_
#define RSE_GRID_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "rse/attacks.h"
#include "rse/config.h"
#include "rse/corpus.h"
#include "rse/defenses.h"
#include "rse/metrics.h"

namespace rse {

enum class AttackKind { kNone, kRandom, kTextfool, kPwws };

std::string_view AttackName(AttackKind kind);
AttackKind ParseAttack(std::string_view name);

struct DatasetSpec {
  std::string name;
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  DatasetOptions options;
  int padding_length = 50;
  std::size_t train_size = 2000;
  std::size_t eval_size = 200;
  std::size_t vocab_size = 80000;
};

// Everything a grid run depends on. Built from a flat Config; relative paths
// resolve against `base_dir`.
struct GridConfig {
  std::vector<DatasetSpec> datasets;
  std::vector<Arch> architectures;
  std::vector<DefenseKind> defenses;
  std::vector<AttackKind> attacks;

  ModelConfig model;
  TrainConfig train;
  RseConfig rse;
  int rse_test_samples = 1;
  double at_fraction = 0.1;
  double max_rate = 0.25;

  std::filesystem::path lexicon_path;
  bool lexicon_closure = true;
  std::filesystem::path vectors_path;  // optional

  std::uint64_t seed = 0;
  std::uint64_t eval_seed = 0;
  bool train_missing = true;  // train checkpoints that do not exist yet
  std::string config_hash;

  static GridConfig FromConfig(const Config& config,
                               const std::filesystem::path& base_dir);
};

// A prepared dataset: balanced train/eval samples and their vocabulary.
struct PreparedData {
  DatasetSpec spec;
  int num_classes = 0;
  std::vector<LabeledExample> train;
  std::vector<LabeledExample> eval;  // truncated to the padding length
  std::shared_ptr<const Vocabulary> vocab;
};

PreparedData PrepareDataset(const DatasetSpec& spec, std::uint64_t seed);

std::shared_ptr<const SynonymTable> LoadGridLexicon(const GridConfig& config);

// Model and training settings for one (dataset, architecture) pair. All
// defenses of the pair share the initialization and shuffling seed.
TrainSetup MakeTrainSetup(const GridConfig& config, const PreparedData& data,
                          Arch arch);

// Outcome of attacking every correctly classified example of a set.
struct AttackEvaluation {
  MetricsRecord metrics;
  std::vector<AttackResult> results;
};

// Clean accuracy through the defense's test transform, then `attack` on every
// correctly classified example, then accuracy of the perturbed set under the
// same oracle.
AttackEvaluation EvaluateUnderAttack(const DefendedModel& model,
                                     std::span<const LabeledExample> data,
                                     AttackKind attack,
                                     const SynonymTable& table,
                                     const WordVectors* vectors,
                                     double max_rate, std::uint64_t seed);

struct GridCell {
  std::string dataset;
  Arch arch = Arch::kLstm;
  DefenseKind defense = DefenseKind::kNt;
  AttackKind attack = AttackKind::kNone;
  MetricsRecord metrics;
  nlohmann::ordered_json provenance;

  nlohmann::ordered_json ToJson() const;
  static GridCell FromJson(const nlohmann::ordered_json& j);
};

// Trains (or loads) every (dataset, architecture, defense) checkpoint under
// out_dir/checkpoints and evaluates every attack. Completed cells are
// appended to out_dir/state.jsonl and skipped on a rerun. Writes
// out_dir/results.json and out_dir/report.txt.
std::vector<GridCell> RunGrid(const GridConfig& config,
                              const std::filesystem::path& out_dir,
                              std::ostream* log = nullptr);

// Parses results.json, checking the metric identities of every record.
std::vector<GridCell> LoadResults(const std::filesystem::path& path);
std::string ResultsJson(const std::vector<GridCell>& cells);
// Aligned text tables: accuracy per attack, success-rate summary and
// substitution rates.
std::string FormatReport(const std::vector<GridCell>& cells);

}  // namespace rse

#endif  // RSE_GRID_H_
