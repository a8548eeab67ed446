// Command-line front end: lexicon preparation, training with a defense,
// attacking a checkpoint, running the evaluation grid, and printing reports.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rse/attacks.h"
#include "rse/config.h"
#include "rse/corpus.h"
#include "rse/defenses.h"
#include "rse/grid.h"
#include "rse/hash.h"
#include "rse/lexicon.h"
#include "rse/metrics.h"
#include "rse/random.h"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
};

rse::GridConfig LoadGridConfig(const GlobalOptions& g) {
  if (g.config_path.empty()) {
    throw std::invalid_argument("--config is required for this command");
  }
  rse::Config cfg = rse::Config::Load(g.config_path);
  if (g.seed) cfg.Set("seed", std::to_string(*g.seed));
  return rse::GridConfig::FromConfig(
      cfg, fs::absolute(g.config_path).parent_path());
}

const rse::DatasetSpec& PickDataset(const rse::GridConfig& grid,
                                    const std::string& name) {
  if (name.empty()) return grid.datasets.front();
  for (const auto& d : grid.datasets) {
    if (d.name == name) return d;
  }
  throw std::invalid_argument("dataset '" + name + "' not in config");
}

int BuildLexicon(const std::string& input, const std::string& output,
                 bool closure, const std::string& vocab_path) {
  rse::SynonymTable table = rse::LoadLexicon(input);
  if (!vocab_path.empty()) {
    rse::Vocabulary vocab = rse::Vocabulary::Load(vocab_path);
    table = rse::FilterLexicon(
        table, [&](const std::string& w) { return vocab.contains(w); });
  }
  if (closure) table = rse::SymmetricClosure(table);
  rse::SaveLexicon(table, output);
  std::size_t pairs = 0;
  for (const auto& [w, s] : table.entries()) pairs += s.size();
  std::cerr << "wrote " << table.size() << " entries (" << pairs
            << " synonym pairs) to " << output << '\n';
  return 0;
}

int TrainCommand(const GlobalOptions& g, const std::string& defense_name,
                 const std::string& arch_name, const std::string& dataset,
                 std::string output, const std::string& nt_checkpoint) {
  rse::GridConfig grid = LoadGridConfig(g);
  const rse::DatasetSpec& spec = PickDataset(grid, dataset);
  rse::DefenseKind defense = rse::ParseDefense(defense_name);
  rse::Arch arch = rse::ParseArch(arch_name);
  auto lexicon = rse::LoadGridLexicon(grid);
  rse::PreparedData data = rse::PrepareDataset(spec, grid.seed);

  rse::TrainSetup setup = rse::MakeTrainSetup(grid, data, arch);

  std::optional<rse::DefendedModel> model;
  switch (defense) {
    case rse::DefenseKind::kNt:
      model = rse::TrainNt(data.vocab, data.train, setup, &std::cerr);
      break;
    case rse::DefenseKind::kAt: {
      std::optional<rse::DefendedModel> nt;
      if (!nt_checkpoint.empty()) {
        nt = rse::LoadCheckpoint(nt_checkpoint);
      } else {
        std::cerr << "no --nt-checkpoint; training the NT model first\n";
        nt = rse::TrainNt(data.vocab, data.train, setup, &std::cerr);
      }
      rse::AtAugmentation aug;
      model = rse::TrainAt(nt->vocab_ptr(), data.train, setup, *nt, *lexicon,
                           grid.at_fraction, grid.max_rate, &aug, &std::cerr);
      break;
    }
    case rse::DefenseKind::kSem:
      model = rse::TrainSem(
          data.vocab, data.train, setup,
          std::make_shared<rse::SemEncoding>(rse::BuildSemEncoding(*lexicon)),
          &std::cerr);
      break;
    case rse::DefenseKind::kRse:
      model = rse::TrainRse(data.vocab, data.train, setup, lexicon, grid.rse,
                            grid.rse_test_samples, &std::cerr);
      break;
  }
  if (output.empty()) {
    fs::create_directories(fs::path(g.out_dir) / "checkpoints");
    output = (fs::path(g.out_dir) / "checkpoints" /
              (spec.name + "_" + arch_name + "_" + defense_name + ".json"))
                 .string();
  }
  rse::SaveCheckpoint(*model, output);
  double acc = rse::EvaluateUnderAttack(*model, data.eval, rse::AttackKind::kNone,
                                        *lexicon, nullptr, grid.max_rate,
                                        grid.eval_seed)
                   .metrics.no_attack_accuracy;
  std::cerr << "clean accuracy " << acc << " on " << data.eval.size()
            << " examples; checkpoint " << output << '\n';
  return 0;
}

ordered_json ResultJson(const rse::AttackResult& r) {
  return ordered_json{{"label", r.label},
                      {"success", r.success},
                      {"substituted_count", r.substituted_count},
                      {"query_count", r.query_count},
                      {"original_prob", r.original_prob},
                      {"final_prob", r.final_prob},
                      {"original", rse::JoinTokens(r.original_tokens)},
                      {"adversarial", rse::JoinTokens(r.adversarial_tokens)}};
}

int AttackCommand(const GlobalOptions& g, const std::string& checkpoint,
                  const std::string& attack_name, const std::string& dataset,
                  const std::string& output) {
  rse::GridConfig grid = LoadGridConfig(g);
  const rse::DatasetSpec& spec = PickDataset(grid, dataset);
  rse::AttackKind attack = rse::ParseAttack(attack_name);
  auto lexicon = rse::LoadGridLexicon(grid);
  std::optional<rse::WordVectors> vectors;
  if (!grid.vectors_path.empty()) vectors = rse::LoadWordVectors(grid.vectors_path);
  rse::DefendedModel model = rse::LoadCheckpoint(checkpoint);
  rse::PreparedData data = rse::PrepareDataset(spec, grid.seed);

  rse::AttackEvaluation ev = rse::EvaluateUnderAttack(
      model, data.eval, attack, *lexicon, vectors ? &*vectors : nullptr,
      grid.max_rate, grid.eval_seed);

  std::ofstream file;
  std::ostream* out = &std::cout;
  if (!output.empty()) {
    file.open(output, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + output);
    out = &file;
  }
  for (const auto& r : ev.results) *out << ResultJson(r).dump() << '\n';
  const auto& m = ev.metrics;
  *out << ordered_json{{"summary",
                        {{"attack", attack_name},
                         {"checkpoint_hash", rse::Sha256File(checkpoint)},
                         {"no_attack_accuracy", m.no_attack_accuracy},
                         {"after_attack_accuracy", m.after_attack_accuracy},
                         {"accuracy_shift", m.accuracy_shift},
                         {"attack_success_rate", m.attack_success_rate},
                         {"mean_substitution_rate", m.mean_substitution_rate},
                         {"n_examples", m.n_examples},
                         {"n_attempted", m.n_attempted},
                         {"n_succeeded", m.n_succeeded}}}}
              .dump()
       << '\n';
  return 0;
}

int EvaluateCommand(const GlobalOptions& g) {
  rse::GridConfig grid = LoadGridConfig(g);
  auto cells = rse::RunGrid(grid, g.out_dir, &std::cerr);
  std::cout << rse::FormatReport(cells);
  return 0;
}

int ReportCommand(const GlobalOptions& g, std::string results) {
  if (results.empty()) results = (fs::path(g.out_dir) / "results.json").string();
  auto cells = rse::LoadResults(results);
  std::cout << rse::FormatReport(cells);
  std::cerr << cells.size() << " cells, metric identities verified\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random substitution encoding: train, attack and evaluate"};
  app.require_subcommand(1);
  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "flat key=value experiment config");
  auto* seed_opt = app.add_option("--seed", seed, "override the global seed");
  app.add_option("--out-dir", g.out_dir, "output directory")->capture_default_str();

  auto* lex = app.add_subcommand("build-lexicon",
                                 "normalize a TSV thesaurus export");
  std::string lex_in, lex_out, lex_vocab;
  bool no_closure = false;
  lex->add_option("--input", lex_in)->required();
  lex->add_option("--output", lex_out)->required();
  lex->add_option("--vocab", lex_vocab, "keep only words in this vocabulary");
  lex->add_flag("--no-closure", no_closure, "skip symmetric closure");

  auto* train = app.add_subcommand("train", "train one defended model");
  std::string defense = "nt", arch = "lstm", dataset, ckpt_out, nt_ckpt;
  train->add_option("--defense", defense)
      ->check(CLI::IsMember({"nt", "at", "sem", "rse"}))
      ->capture_default_str();
  train->add_option("--arch", arch)
      ->check(CLI::IsMember({"lstm", "bilstm", "word_cnn"}))
      ->capture_default_str();
  train->add_option("--dataset", dataset, "dataset name (default: first)");
  train->add_option("--output", ckpt_out, "checkpoint path");
  train->add_option("--nt-checkpoint", nt_ckpt, "NT model to attack for AT");

  auto* attack = app.add_subcommand("attack", "attack a checkpoint");
  std::string attack_ckpt, attack_name = "pwws", attack_out, attack_ds;
  attack->add_option("--checkpoint", attack_ckpt)->required();
  attack->add_option("--attack", attack_name)
      ->check(CLI::IsMember({"none", "random", "textfool", "pwws"}))
      ->capture_default_str();
  attack->add_option("--dataset", attack_ds);
  attack->add_option("--output", attack_out, "JSON-lines file (default stdout)");

  app.add_subcommand("evaluate", "run the defense x attack grid");

  auto* report = app.add_subcommand("report", "print tables from results");
  std::string results;
  report->add_option("--results", results, "results.json path");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*lex) return BuildLexicon(lex_in, lex_out, !no_closure, lex_vocab);
    if (*train) return TrainCommand(g, defense, arch, dataset, ckpt_out, nt_ckpt);
    if (*attack) {
      return AttackCommand(g, attack_ckpt, attack_name, attack_ds, attack_out);
    }
    if (app.got_subcommand("evaluate")) return EvaluateCommand(g);
    if (*report) return ReportCommand(g, results);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
