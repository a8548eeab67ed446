#include "rse/grid.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rse/hash.h"
#include "rse/random.h"

namespace rse {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string_view AttackName(AttackKind kind) {
  switch (kind) {
    case AttackKind::kNone:
      return "none";
    case AttackKind::kRandom:
      return "random";
    case AttackKind::kTextfool:
      return "textfool";
    case AttackKind::kPwws:
      return "pwws";
  }
  return "?";
}

AttackKind ParseAttack(std::string_view name) {
  if (name == "none") return AttackKind::kNone;
  if (name == "random") return AttackKind::kRandom;
  if (name == "textfool") return AttackKind::kTextfool;
  if (name == "pwws") return AttackKind::kPwws;
  throw std::invalid_argument("unknown attack: " + std::string(name));
}

namespace {

fs::path Resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::uint64_t NameKey(std::string_view name) {
  std::string s(name);
  return HashTokens(std::span<const std::string>(&s, 1));
}

}  // namespace

GridConfig GridConfig::FromConfig(const Config& c, const fs::path& base_dir) {
  GridConfig g;
  g.seed = c.GetUint("seed", 1);
  g.eval_seed = c.GetUint("eval.seed", DeriveSeed(g.seed, {0xe7a1}));
  g.config_hash = Sha256Hex(c.Canonical());

  for (const auto& name : c.GetList("datasets", {})) {
    const std::string p = "dataset." + name + ".";
    DatasetSpec d;
    d.name = name;
    d.train_path = Resolve(base_dir, c.RequireString(p + "train"));
    d.test_path = Resolve(base_dir, c.RequireString(p + "test"));
    d.options.has_header = c.GetBool(p + "has_header", false);
    if (c.Has(p + "labels")) d.options.label_names = c.GetList(p + "labels", {});
    d.padding_length = c.GetInt(p + "padding_length", 50);
    d.train_size = static_cast<std::size_t>(c.GetInt(p + "train_size", 2000));
    d.eval_size = static_cast<std::size_t>(c.GetInt(p + "eval_size", 200));
    d.vocab_size = static_cast<std::size_t>(c.GetInt(p + "vocab_size", 80000));
    g.datasets.push_back(std::move(d));
  }
  if (g.datasets.empty()) throw std::invalid_argument("config: no datasets");

  for (const auto& a : c.GetList("grid.architectures", {"lstm"})) {
    g.architectures.push_back(ParseArch(a));
  }
  for (const auto& d : c.GetList("grid.defenses", {"nt", "rse"})) {
    g.defenses.push_back(ParseDefense(d));
  }
  for (const auto& a : c.GetList("grid.attacks", {"none", "pwws"})) {
    g.attacks.push_back(ParseAttack(a));
  }

  g.model.embedding_dim = c.GetInt("model.embedding_dim", 100);
  g.model.hidden_dim = c.GetInt("model.hidden_dim", 100);
  g.model.num_layers = c.GetInt("model.num_layers", 2);
  g.model.num_filters = c.GetInt("model.num_filters", 100);
  g.model.filter_widths.clear();
  for (const auto& w : c.GetList("model.filter_widths", {"3", "4", "5"})) {
    g.model.filter_widths.push_back(std::stoi(w));
  }
  g.model.init_scale = c.GetDouble("model.init_scale", 0.1);

  g.train.epochs = c.GetInt("train.epochs", 10);
  g.train.batch_size = c.GetInt("train.batch_size", 32);
  g.train.learning_rate = c.GetDouble("train.learning_rate", 0.5);
  g.train.clip_norm = c.GetDouble("train.clip_norm", 5.0);
  std::string opt = c.GetString("train.optimizer", "sgd");
  if (opt == "sgd") {
    g.train.optimizer = Optimizer::kSgd;
  } else if (opt == "adam") {
    g.train.optimizer = Optimizer::kAdam;
  } else {
    throw std::invalid_argument("config: unknown optimizer " + opt);
  }
  g.train.Validate();

  g.rse.r_min = c.GetDouble("rse.r_min", 0.1);
  g.rse.r_max = c.GetDouble("rse.r_max", 0.25);
  g.rse.seed = c.GetUint("rse.seed", g.seed);
  g.rse.Validate();
  g.rse_test_samples = c.GetInt("rse.test_samples", 1);
  g.at_fraction = c.GetDouble("at.fraction", 0.1);
  g.max_rate = c.GetDouble("attack.max_rate", 0.25);

  g.lexicon_path = Resolve(base_dir, c.RequireString("lexicon.path"));
  g.lexicon_closure = c.GetBool("lexicon.symmetric_closure", true);
  g.vectors_path = Resolve(base_dir, c.GetString("vectors.path", ""));
  g.train_missing = c.GetBool("grid.train_missing", true);
  return g;
}

PreparedData PrepareDataset(const DatasetSpec& spec, std::uint64_t seed) {
  PreparedData out;
  out.spec = spec;
  Dataset train = LoadDataset(spec.train_path, spec.options);
  Dataset test = LoadDataset(spec.test_path, spec.options);
  out.num_classes = std::max(train.num_classes(), test.num_classes());
  const std::uint64_t key = NameKey(spec.name);
  out.train = SampleBalanced(train.examples, out.num_classes, spec.train_size,
                             DeriveSeed(seed, {key, 1}));
  out.eval = SampleBalanced(test.examples, out.num_classes, spec.eval_size,
                            DeriveSeed(seed, {key, 2}));
  for (auto& ex : out.eval) {
    if (static_cast<int>(ex.tokens.size()) > spec.padding_length) {
      ex.tokens.resize(static_cast<std::size_t>(spec.padding_length));
    }
  }
  out.vocab = std::make_shared<Vocabulary>(BuildVocab(out.train, spec.vocab_size));
  return out;
}

std::shared_ptr<const SynonymTable> LoadGridLexicon(const GridConfig& config) {
  SynonymTable table = LoadLexicon(config.lexicon_path);
  if (config.lexicon_closure) table = SymmetricClosure(table);
  return std::make_shared<SynonymTable>(std::move(table));
}

TrainSetup MakeTrainSetup(const GridConfig& config, const PreparedData& data,
                          Arch arch) {
  TrainSetup setup;
  setup.model = config.model;
  setup.model.arch = arch;
  setup.model.num_classes = data.num_classes;
  setup.model.padding_length = data.spec.padding_length;
  setup.model.seed = DeriveSeed(
      config.seed, {NameKey(data.spec.name), static_cast<std::uint64_t>(arch)});
  setup.train = config.train;
  setup.train.seed = setup.model.seed;
  return setup;
}

AttackEvaluation EvaluateUnderAttack(const DefendedModel& model,
                                     std::span<const LabeledExample> data,
                                     AttackKind attack,
                                     const SynonymTable& table,
                                     const WordVectors* vectors,
                                     double max_rate, std::uint64_t seed) {
  DefendedOracle oracle(model, seed);
  AttackEvaluation out;
  std::size_t correct_before = 0, correct_after = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const LabeledExample& ex = data[i];
    if (oracle.Predict(ex.tokens) != ex.label) continue;
    ++correct_before;
    if (attack == AttackKind::kNone) {
      ++correct_after;
      continue;
    }
    AttackResult r;
    switch (attack) {
      case AttackKind::kRandom: {
        Rng rng(DeriveSeed(seed, {0x7a, i}));
        r = RandomAttack(oracle, ex, table, rng, max_rate);
        break;
      }
      case AttackKind::kTextfool:
        r = TextfoolAttack(oracle, ex, table, vectors, max_rate);
        break;
      case AttackKind::kPwws:
        r = PwwsAttack(oracle, ex, table, max_rate);
        break;
      case AttackKind::kNone:
        break;
    }
    if (oracle.Predict(r.adversarial_tokens) == ex.label) ++correct_after;
    out.results.push_back(std::move(r));
  }
  out.metrics = MakeMetricsRecord(data.size(), correct_before, correct_after,
                                  MeanSubstitutionRate(out.results));
  return out;
}

// ---------------------------------------------------------------------------
// Cells and reports

namespace {

ordered_json MetricsJson(const MetricsRecord& m) {
  return ordered_json{{"no_attack_accuracy", m.no_attack_accuracy},
                      {"after_attack_accuracy", m.after_attack_accuracy},
                      {"accuracy_shift", m.accuracy_shift},
                      {"attack_success_rate", m.attack_success_rate},
                      {"mean_substitution_rate", m.mean_substitution_rate},
                      {"n_examples", m.n_examples},
                      {"n_attempted", m.n_attempted},
                      {"n_succeeded", m.n_succeeded}};
}

MetricsRecord MetricsFromJson(const ordered_json& j) {
  MetricsRecord m;
  m.no_attack_accuracy = j.at("no_attack_accuracy");
  m.after_attack_accuracy = j.at("after_attack_accuracy");
  m.accuracy_shift = j.at("accuracy_shift");
  m.attack_success_rate = j.at("attack_success_rate");
  m.mean_substitution_rate = j.at("mean_substitution_rate");
  m.n_examples = j.at("n_examples");
  m.n_attempted = j.at("n_attempted");
  m.n_succeeded = j.at("n_succeeded");
  return m;
}

std::string CellKey(const std::string& ds, Arch arch, DefenseKind d,
                    AttackKind a) {
  return ds + "/" + std::string(ArchName(arch)) + "/" +
         std::string(DefenseName(d)) + "/" + std::string(AttackName(a));
}

std::string Percent(double f) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * f);
  return buf;
}

std::string Pad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

}  // namespace

ordered_json GridCell::ToJson() const {
  ordered_json j;
  j["dataset"] = dataset;
  j["architecture"] = ArchName(arch);
  j["defense"] = DefenseName(defense);
  j["attack"] = AttackName(attack);
  j["metrics"] = MetricsJson(metrics);
  j["provenance"] = provenance;
  return j;
}

GridCell GridCell::FromJson(const ordered_json& j) {
  GridCell c;
  c.dataset = j.at("dataset");
  c.arch = ParseArch(j.at("architecture").get<std::string>());
  c.defense = ParseDefense(j.at("defense").get<std::string>());
  c.attack = ParseAttack(j.at("attack").get<std::string>());
  c.metrics = MetricsFromJson(j.at("metrics"));
  c.provenance = j.at("provenance");
  return c;
}

std::string ResultsJson(const std::vector<GridCell>& cells) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : cells) arr.push_back(c.ToJson());
  return arr.dump(2) + "\n";
}

std::vector<GridCell> LoadResults(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open results " + path.string());
  ordered_json arr = ordered_json::parse(in);
  std::vector<GridCell> out;
  for (const auto& j : arr) {
    GridCell c = GridCell::FromJson(j);
    CheckMetricsRecord(c.metrics);
    out.push_back(std::move(c));
  }
  return out;
}

std::string FormatReport(const std::vector<GridCell>& cells) {
  std::ostringstream out;
  std::vector<std::string> datasets;
  std::vector<Arch> archs;
  std::vector<DefenseKind> defenses;
  std::vector<AttackKind> attacks;
  std::map<std::string, const GridCell*> by_key;
  auto add = [](auto& v, const auto& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const auto& c : cells) {
    add(datasets, c.dataset);
    add(archs, c.arch);
    add(defenses, c.defense);
    add(attacks, c.attack);
    by_key[CellKey(c.dataset, c.arch, c.defense, c.attack)] = &c;
  }
  auto lookup = [&](const std::string& ds, Arch a, DefenseKind d,
                    AttackKind k) -> const GridCell* {
    auto it = by_key.find(CellKey(ds, a, d, k));
    return it == by_key.end() ? nullptr : it->second;
  };

  constexpr std::size_t kCol = 9;
  auto header = [&](std::ostringstream& o, const std::string& first) {
    o << std::string(first.size() < 12 ? 12 - first.size() : 0, ' ') << first;
    for (Arch a : archs) {
      for (DefenseKind d : defenses) {
        o << Pad(std::string(ArchName(a)).substr(0, 4) + "/" +
                     std::string(DefenseName(d)),
                 kCol);
      }
    }
    o << '\n';
  };

  out << "Accuracy (%) by attack\n";
  for (const auto& ds : datasets) {
    out << "[" << ds << "]\n";
    header(out, "attack");
    for (AttackKind k : attacks) {
      out << Pad(std::string(AttackName(k)), 12);
      for (Arch a : archs) {
        for (DefenseKind d : defenses) {
          const GridCell* c = lookup(ds, a, d, k);
          out << Pad(c ? Percent(c->metrics.after_attack_accuracy) : "-", kCol);
        }
      }
      out << '\n';
    }
  }

  out << "\nAttack summary (%): before / after / shift / success rate\n";
  for (const auto& ds : datasets) {
    for (AttackKind k : attacks) {
      if (k == AttackKind::kNone) continue;
      out << "[" << ds << ", " << AttackName(k) << "]\n";
      header(out, "metric");
      const char* names[] = {"before", "after", "shift", "success"};
      for (int m = 0; m < 4; ++m) {
        out << Pad(names[m], 12);
        for (Arch a : archs) {
          for (DefenseKind d : defenses) {
            const GridCell* c = lookup(ds, a, d, k);
            std::string v = "-";
            if (c != nullptr) {
              const auto& r = c->metrics;
              double x = m == 0   ? r.no_attack_accuracy
                         : m == 1 ? r.after_attack_accuracy
                         : m == 2 ? r.accuracy_shift
                                  : r.attack_success_rate;
              v = Percent(x);
            }
            out << Pad(v, kCol);
          }
        }
        out << '\n';
      }
    }
  }

  out << "\nSubstitution rate (%) of successful attacks\n";
  for (const auto& ds : datasets) {
    out << "[" << ds << "]\n";
    header(out, "attack");
    for (AttackKind k : attacks) {
      if (k == AttackKind::kNone) continue;
      out << Pad(std::string(AttackName(k)), 12);
      for (Arch a : archs) {
        for (DefenseKind d : defenses) {
          const GridCell* c = lookup(ds, a, d, k);
          out << Pad(c ? Percent(c->metrics.mean_substitution_rate) : "-",
                     kCol);
        }
      }
      out << '\n';
    }
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// Grid runner

std::vector<GridCell> RunGrid(const GridConfig& config, const fs::path& out_dir,
                              std::ostream* log) {
  fs::create_directories(out_dir / "checkpoints");
  const fs::path state_path = out_dir / "state.jsonl";

  std::map<std::string, GridCell> done;
  if (fs::exists(state_path)) {
    std::ifstream in(state_path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      GridCell c = GridCell::FromJson(ordered_json::parse(line));
      CheckMetricsRecord(c.metrics);
      done[CellKey(c.dataset, c.arch, c.defense, c.attack)] = std::move(c);
    }
  }
  std::ofstream state(state_path, std::ios::app);

  auto lexicon = LoadGridLexicon(config);
  const std::string lexicon_hash = Sha256Hex(FormatLexicon(*lexicon));
  std::optional<WordVectors> vectors;
  if (!config.vectors_path.empty()) vectors = LoadWordVectors(config.vectors_path);
  const WordVectors* vec = vectors ? &*vectors : nullptr;

  std::vector<GridCell> cells;
  for (const auto& spec : config.datasets) {
    const std::uint64_t ds_key = NameKey(spec.name);
    std::optional<PreparedData> data;
    auto prepared = [&]() -> PreparedData& {
      if (!data) data = PrepareDataset(spec, config.seed);
      return *data;
    };

    for (Arch arch : config.architectures) {
      const auto arch_key = static_cast<std::uint64_t>(arch);
      std::optional<DefendedModel> nt_model;

      auto checkpoint_path = [&](DefenseKind d) {
        return out_dir / "checkpoints" /
               (spec.name + "_" + std::string(ArchName(arch)) + "_" +
                std::string(DefenseName(d)) + ".json");
      };

      std::function<DefendedModel(DefenseKind)> obtain =
          [&](DefenseKind kind) -> DefendedModel {
        fs::path ckpt = checkpoint_path(kind);
        if (fs::exists(ckpt)) return LoadCheckpoint(ckpt);
        if (!config.train_missing) {
          throw std::runtime_error("missing checkpoint " + ckpt.string());
        }
        PreparedData& d = prepared();
        TrainSetup setup = MakeTrainSetup(config, d, arch);
        if (log) {
          *log << "training " << spec.name << "/" << ArchName(arch) << "/"
               << DefenseName(kind) << '\n';
        }
        std::optional<DefendedModel> model;
        switch (kind) {
          case DefenseKind::kNt:
            model = TrainNt(d.vocab, d.train, setup, log);
            break;
          case DefenseKind::kAt: {
            if (!nt_model) nt_model = obtain(DefenseKind::kNt);
            model = TrainAt(d.vocab, d.train, setup, *nt_model, *lexicon,
                            config.at_fraction, config.max_rate, nullptr, log);
            break;
          }
          case DefenseKind::kSem:
            model = TrainSem(d.vocab, d.train, setup,
                             std::make_shared<SemEncoding>(
                                 BuildSemEncoding(*lexicon)),
                             log);
            break;
          case DefenseKind::kRse:
            model = TrainRse(d.vocab, d.train, setup, lexicon, config.rse,
                             config.rse_test_samples, log);
            break;
        }
        SaveCheckpoint(*model, ckpt);
        // Evaluate the reloaded copy so fresh and resumed runs agree.
        return LoadCheckpoint(ckpt);
      };

      for (DefenseKind defense : config.defenses) {
        std::optional<DefendedModel> model;
        for (AttackKind attack : config.attacks) {
          const std::string key = CellKey(spec.name, arch, defense, attack);
          if (auto it = done.find(key); it != done.end()) {
            cells.push_back(it->second);
            continue;
          }
          if (!model) {
            model = obtain(defense);
            if (defense == DefenseKind::kNt) nt_model = model;
          }
          const std::uint64_t cell_seed = DeriveSeed(
              config.eval_seed,
              {ds_key, arch_key, static_cast<std::uint64_t>(defense)});
          if (log) *log << "evaluating " << key << '\n';
          AttackEvaluation ev =
              EvaluateUnderAttack(*model, prepared().eval, attack, *lexicon,
                                  vec, config.max_rate, cell_seed);
          CheckMetricsRecord(ev.metrics);
          GridCell cell;
          cell.dataset = spec.name;
          cell.arch = arch;
          cell.defense = defense;
          cell.attack = attack;
          cell.metrics = ev.metrics;
          cell.provenance = ordered_json{
              {"seed", config.seed},
              {"eval_seed", config.eval_seed},
              {"train_seed", model->classifier().config().seed},
              {"rse_seed", defense == DefenseKind::kRse
                               ? ordered_json(config.rse.seed)
                               : ordered_json(nullptr)},
              {"max_rate", config.max_rate},
              {"config_hash", config.config_hash},
              {"checkpoint_hash", Sha256File(checkpoint_path(defense))},
              {"lexicon_hash", lexicon_hash}};
          state << cell.ToJson().dump() << '\n' << std::flush;
          cells.push_back(std::move(cell));
        }
      }
    }
  }

  std::ofstream(out_dir / "results.json", std::ios::binary) << ResultsJson(cells);
  std::ofstream(out_dir / "report.txt", std::ios::binary) << FormatReport(cells);
  return cells;
}

}  // namespace rse
