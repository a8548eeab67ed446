// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gradient_check.h"
#include "pwws_bruteforce.h"
#include "rse/config.h"
#include "rse/grid.h"
#include "rse/metrics.h"
#include "rse/rse_encoder.h"
#include "sem_invariance.h"
#include "table3.h"
#include "test_util.h"

namespace rse {
namespace {

namespace fs = std::filesystem;

int failures = 0;

void Report(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string Fmt(const char* f, double a, double b = 0.0, double c = 0.0,
                double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void Table3Arithmetic() {
  double worst = 0.0;
  for (const auto& row : testing::kTable3) {
    double pct =
        100.0 * AttackSuccessRate(row.shift / 100.0, row.before / 100.0);
    worst = std::max(worst, std::abs(pct - row.success_rate));
    worst = std::max(worst, std::abs(row.before - row.after - row.shift));
  }
  Report(1, worst <= 0.01,
         Fmt("%.0f rows, max deviation %.4f pp", static_cast<double>(testing::kTable3.size()), worst));
}

void EncoderInvariants() {
  Rng rng(101);
  std::uniform_int_distribution<int> nwords(1, 12), nsyn(0, 3), len(0, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int cases = 0, violations = 0;
  for (; cases < 10000; ++cases) {
    SynonymTable::Entries e;
    int w = nwords(rng);
    for (int i = 0; i < w; ++i) {
      std::vector<std::string> syns;
      int s = nsyn(rng);
      for (int k = 0; k < s; ++k) {
        syns.push_back("s" + std::to_string(i) + "_" + std::to_string(k));
      }
      e["w" + std::to_string(i)] = syns;
    }
    e["<unk>"] = {"never"};
    SynonymTable table(e);
    Tokens x;
    int n = len(rng);
    std::uniform_int_distribution<int> pick(0, w + 1);
    for (int i = 0; i < n; ++i) {
      int p = pick(rng);
      x.push_back(p == w ? "plain" : p == w + 1 ? "<unk>" : "w" + std::to_string(p));
    }
    double a = unit(rng), b = unit(rng);
    RseConfig cfg{std::min(a, b), std::max(a, b), 0};
    std::uint64_t seed = rng();
    Rng r1(seed), r2(seed);
    SubstitutionPlan plan = PlanSubstitution(x, table, cfg, r1);
    Tokens y = ApplyPlan(x, plan);
    Tokens z = RseEncodeTokens(x, table, cfg, r2);

    std::vector<int> subst = SubstitutablePositions(x, table);
    bool ok = y.size() == x.size() && z == y;
    ok = ok && plan.rate >= cfg.r_min && plan.rate <= cfg.r_max;
    ok = ok && static_cast<int>(plan.positions.size()) ==
                   SubstitutionCount(plan.rate, static_cast<int>(subst.size()));
    ok = ok && std::is_sorted(plan.positions.begin(), plan.positions.end()) &&
         std::adjacent_find(plan.positions.begin(), plan.positions.end()) ==
             plan.positions.end();
    std::set<int> chosen(plan.positions.begin(), plan.positions.end());
    for (int i = 0; ok && i < static_cast<int>(x.size()); ++i) {
      if (!chosen.count(i)) {
        ok = y[i] == x[i];
        continue;
      }
      const auto& syns = table.synonyms_of(x[i]);
      ok = std::binary_search(subst.begin(), subst.end(), i) &&
           std::find(syns.begin(), syns.end(), y[i]) != syns.end() &&
           x[i] != "<unk>";
    }
    if (!ok) ++violations;
  }
  Report(2, violations == 0,
         Fmt("%.0f randomized cases, %.0f violations", cases, violations));
}

void PwwsBruteForce() {
  testing::BruteForceReport r = testing::RunPwwsBruteForce(200, 7);
  bool pass = r.instances >= 100 && r.pwws_successes > 0 &&
              r.confirmed_by_reprediction == r.pwws_successes &&
              r.confirmed_by_bruteforce == r.pwws_successes &&
              r.nonsynonym_outputs == 0;
  Report(3, pass,
         Fmt("%.0f instances, %.0f PWWS successes, %.0f re-predicted, %.0f "
             "confirmed by enumeration",
             r.instances, r.pwws_successes, r.confirmed_by_reprediction,
             r.confirmed_by_bruteforce));
}

struct DeskRun {
  MetricsRecord nt, rse;
};

DeskRun RunDesk(std::uint64_t seed, const fs::path& dir) {
  Config c = Config::Load(testing::SourcePath("configs/desk_ag.conf"));
  c.Set("seed", std::to_string(seed));
  GridConfig g = GridConfig::FromConfig(c, testing::SourcePath("configs"));
  g.attacks = {AttackKind::kPwws};
  DeskRun out;
  for (const auto& cell : RunGrid(g, dir)) {
    if (cell.defense == DefenseKind::kNt) out.nt = cell.metrics;
    if (cell.defense == DefenseKind::kRse) out.rse = cell.metrics;
  }
  std::printf("  seed %llu: NT acc %.3f asr %.3f sub %.4f | RSE acc %.3f asr "
              "%.3f sub %.4f\n",
              static_cast<unsigned long long>(seed), out.nt.no_attack_accuracy,
              out.nt.attack_success_rate, out.nt.mean_substitution_rate,
              out.rse.no_attack_accuracy, out.rse.attack_success_rate,
              out.rse.mean_substitution_rate);
  std::fflush(stdout);
  return out;
}

void DeskDefense(const fs::path& root) {
  std::vector<double> asr_nt, asr_rse, acc_nt, acc_rse, sub_nt, sub_rse;
  for (std::uint64_t seed : {1, 2, 3}) {
    DeskRun r = RunDesk(seed, root / ("seed" + std::to_string(seed)));
    asr_nt.push_back(r.nt.attack_success_rate);
    asr_rse.push_back(r.rse.attack_success_rate);
    acc_nt.push_back(r.nt.no_attack_accuracy);
    acc_rse.push_back(r.rse.no_attack_accuracy);
    sub_nt.push_back(r.nt.mean_substitution_rate);
    sub_rse.push_back(r.rse.mean_substitution_rate);
  }
  const double a_nt = Median(asr_nt), a_rse = Median(asr_rse);
  const double c_nt = Median(acc_nt), c_rse = Median(acc_rse);
  Report(4, a_rse <= 0.5 * a_nt && c_rse >= c_nt - 0.05,
         Fmt("median ASR RSE %.4f vs NT %.4f; median clean accuracy RSE %.4f "
             "vs NT %.4f",
             a_rse, a_nt, c_rse, c_nt));
  const double s_nt = Median(sub_nt), s_rse = Median(sub_rse);
  Report(5, s_rse >= s_nt,
         Fmt("median PWWS substitution rate RSE %.4f vs NT %.4f", s_rse, s_nt));
}

void SemInvariance(const fs::path& root) {
  DatasetOptions o;
  o.has_header = true;
  Dataset d = LoadDataset(testing::SourcePath("data/ag_sample_train.csv"), o);
  std::vector<LabeledExample> train = SampleBalanced(d.examples, 4, 200, 1);
  auto table = std::make_shared<SynonymTable>(
      SymmetricClosure(LoadLexicon(testing::SourcePath("data/synonyms.tsv"))));
  auto vocab = std::make_shared<Vocabulary>(BuildVocab(train, Vocabulary::kUnlimited));
  TrainSetup setup;
  setup.model.arch = Arch::kWordCnn;
  setup.model.num_classes = 4;
  setup.model.padding_length = 50;
  setup.model.embedding_dim = 8;
  setup.model.num_filters = 8;
  setup.model.filter_widths = {2, 3};
  setup.train.epochs = 1;
  setup.train.optimizer = Optimizer::kAdam;
  setup.train.learning_rate = 0.01;
  DefendedModel m = TrainSem(vocab, train, setup,
                             std::make_shared<SemEncoding>(BuildSemEncoding(*table)));
  SaveCheckpoint(m, root / "sem.json");
  DefendedModel reloaded = LoadCheckpoint(root / "sem.json");
  testing::SemInvarianceReport r =
      testing::CheckSemInvariance(reloaded, *table, 1000, 23);
  Report(6, r.checks == 1000 && r.violations == 0,
         Fmt("%.0f checks, %.0f violations", r.checks, r.violations));
}

void GradientCheck() {
  double worst = 0.0;
  int coords = 0;
  for (Arch arch : {Arch::kLstm, Arch::kBiLstm, Arch::kWordCnn}) {
    auto model = MakeClassifier(testing::SmallestConfig(arch));
    testing::RandomizeParameters(*model, 0.5, 31);
    testing::GradientCheckResult r =
        testing::CheckGradient(*model, testing::SmallExample(), 20, 37);
    worst = std::max(worst, r.max_relative_error);
    coords += r.coordinates;
  }
  Report(7, worst <= 1e-4,
         Fmt("%.0f coordinates over 3 architectures, max relative error %.2e",
             coords, worst));
}

void Reproducibility(const fs::path& root) {
  Config c = Config::Load(testing::SourcePath("configs/desk_ag.conf"));
  GridConfig g = GridConfig::FromConfig(c, testing::SourcePath("configs"));
  RunGrid(g, root / "repro_a");
  RunGrid(g, root / "repro_b");
  std::string a = ReadFile(root / "repro_a" / "results.json");
  std::string b = ReadFile(root / "repro_b" / "results.json");
  Report(8, !a.empty() && a == b,
         Fmt("results.json %.0f bytes, identical: %.0f",
             static_cast<double>(a.size()), a == b));
}

}  // namespace
}  // namespace rse

int main() {
  namespace fs = std::filesystem;
  fs::path root = rse::testing::TempDir("acceptance");
  rse::Table3Arithmetic();
  rse::EncoderInvariants();
  rse::PwwsBruteForce();
  rse::DeskDefense(root);
  rse::SemInvariance(root);
  rse::GradientCheck();
  rse::Reproducibility(root);
  std::printf("%d criteria failed\n", rse::failures);
  return rse::failures == 0 ? 0 : 1;
}
