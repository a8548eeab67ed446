#include "rse/attacks.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "pwws_bruteforce.h"
#include "rse/rse_encoder.h"
#include "test_util.h"

namespace rse {
namespace {

using Entries = SynonymTable::Entries;
using testing::FunctionOracle;
using testing::LinearWordOracle;

std::vector<double> Constant(std::span<const std::string>) {
  return {0.7, 0.3};
}

// Class 0 unless position 0 holds anything but "good".
std::vector<double> FlipAtZero(std::span<const std::string> t) {
  return t[0] == "good" ? std::vector<double>{0.9, 0.1}
                        : std::vector<double>{0.2, 0.8};
}

TEST(SubstitutionBudget, FloorWithMinimumOne) {
  EXPECT_EQ(SubstitutionBudget(10, 0.25), 2);
  EXPECT_EQ(SubstitutionBudget(3, 0.25), 1);
  EXPECT_EQ(SubstitutionBudget(20, 0.25), 5);
  EXPECT_EQ(SubstitutionBudget(50, 0.25), 12);
}

TEST(CountingOracle, CountsEveryCall) {
  FunctionOracle inner(Constant);
  CountingOracle c(inner);
  Tokens t = {"a"};
  c.Query(t);
  c.Query(t);
  EXPECT_EQ(c.count(), 2u);
}

TEST(Attacks, PreconditionRejectsMisclassifiedExample) {
  FunctionOracle o(Constant);
  SynonymTable t(Entries{{"a", {"b"}}});
  LabeledExample ex{{"a"}, 1};
  Rng rng(1);
  EXPECT_THROW(RandomAttack(o, ex, t, rng, 0.25), std::invalid_argument);
  EXPECT_THROW(TextfoolAttack(o, ex, t, nullptr, 0.25), std::invalid_argument);
  EXPECT_THROW(PwwsAttack(o, ex, t, 0.25), std::invalid_argument);
}

TEST(RandomAttack, ConstantModelIsUnattackable) {
  FunctionOracle o(Constant);
  SynonymTable t(Entries{{"a", {"b"}}, {"c", {"d"}}});
  LabeledExample ex{{"a", "c", "a", "c", "x", "x", "x", "x"}, 0};
  Rng rng(2);
  AttackResult r = RandomAttack(o, ex, t, rng, 0.25);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.substituted_count, SubstitutionBudget(8, 0.25));
  EXPECT_DOUBLE_EQ(r.final_prob, r.original_prob);
}

TEST(RandomAttack, SingleSubstitutionFlip) {
  FunctionOracle o(FlipAtZero);
  SynonymTable t(Entries{{"good", {"great", "fine"}}});
  LabeledExample ex{{"good", "movie", "plot"}, 0};
  Rng rng(3);
  AttackResult r = RandomAttack(o, ex, t, rng, 0.25);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.substituted_count, 1);
  EXPECT_EQ(r.query_count, 2);
}

TEST(RandomAttack, SubstitutedPositionsAreSubstitutable) {
  Entries e{{"a", {"a1", "a2"}}, {"b", {"b1"}}, {"c", {"c1", "c2"}}};
  SynonymTable t(e);
  std::map<std::string, std::vector<double>> w;
  Rng wr(4);
  std::normal_distribution<double> g(0.0, 1.0);
  for (auto s : {"a", "a1", "a2", "b", "b1", "c", "c1", "c2", "x", "y"}) {
    w[s] = {g(wr), g(wr)};
  }
  LinearWordOracle o(w, 2);
  std::vector<std::string> words = {"a", "b", "c", "x", "y"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(DeriveSeed(5, {static_cast<std::uint64_t>(trial)}));
    LabeledExample ex;
    for (int k = 0; k < 8; ++k) ex.tokens.push_back(words[pick(rng)]);
    ex.label = ArgMax(o.Query(ex.tokens));
    AttackResult r = RandomAttack(o, ex, t, rng, 0.5);
    auto allowed = SubstitutablePositions(ex.tokens, t);
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) {
      if (r.adversarial_tokens[i] == ex.tokens[i]) continue;
      EXPECT_TRUE(std::binary_search(allowed.begin(), allowed.end(),
                                     static_cast<int>(i)));
      const auto& syns = t.synonyms_of(ex.tokens[i]);
      EXPECT_NE(std::find(syns.begin(), syns.end(), r.adversarial_tokens[i]),
                syns.end());
    }
    if (r.success) {
      EXPECT_NE(ArgMax(o.Query(r.adversarial_tokens)), ex.label);
    }
  }
}

TEST(TextfoolAttack, InsensitiveModelLeavesProbabilityUnchanged) {
  FunctionOracle o(Constant);
  SynonymTable t(Entries{{"a", {"b"}}, {"c", {"d"}}});
  LabeledExample ex{{"a", "c", "x", "x"}, 0};
  AttackResult r = TextfoolAttack(o, ex, t, nullptr, 0.5);
  EXPECT_FALSE(r.success);
  EXPECT_EQ(r.final_prob, r.original_prob);
  EXPECT_EQ(r.substituted_count, 0);
}

TEST(TextfoolAttack, FindsSingleWordFlip) {
  FunctionOracle o(FlipAtZero);
  SynonymTable t(Entries{{"good", {"great"}}, {"movie", {"film"}}});
  LabeledExample ex{{"good", "movie", "x", "x"}, 0};
  AttackResult r = TextfoolAttack(o, ex, t, nullptr, 0.5);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.adversarial_tokens[0], "great");
}

TEST(TextfoolAttack, RanksCandidatesBySimilarity) {
  // Only "fine" flips; vectors put it first.
  FunctionOracle o([](std::span<const std::string> t) {
    return t[0] == "fine" ? std::vector<double>{0.1, 0.9}
                          : std::vector<double>{0.9, 0.1};
  });
  SynonymTable t(Entries{{"good", {"great", "fine"}}});
  WordVectors v{{"good", {1.0, 0.0}}, {"great", {0.0, 1.0}}, {"fine", {1.0, 0.1}}};
  LabeledExample ex{{"good", "x", "x", "x"}, 0};
  AttackResult r = TextfoolAttack(o, ex, t, &v, 0.25);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.query_count, 2);
}

TEST(TextfoolAttack, TrueClassProbabilityIsMonotone) {
  Rng wr(6);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Entries e;
    std::map<std::string, std::vector<double>> w;
    LabeledExample ex;
    for (int i = 0; i < 10; ++i) {
      std::string word = "w" + std::to_string(i);
      ex.tokens.push_back(word);
      w[word] = {g(wr), g(wr), g(wr)};
      for (int j = 0; j < 3; ++j) {
        std::string s = word + "_" + std::to_string(j);
        e[word].push_back(s);
        w[s] = {g(wr), g(wr), g(wr)};
      }
    }
    LinearWordOracle o(w, 3);
    ex.label = ArgMax(o.Query(ex.tokens));
    AttackResult r = TextfoolAttack(o, ex, SynonymTable(e), nullptr, 0.5);
    double prev = r.original_prob;
    for (double p : r.prob_trace) {
      EXPECT_LT(p, prev);
      prev = p;
    }
  }
}

TEST(WordSaliency, ConstantModelAndTwoQueryOracle) {
  FunctionOracle c(Constant);
  Tokens x = {"a", "b", "c"};
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(WordSaliency(c, x, 0, i), 0.0);
  }
  EXPECT_THROW(WordSaliency(c, x, 0, 3), std::out_of_range);

  std::map<std::string, std::vector<double>> w{
      {"a", {0.5, -0.2}}, {"b", {-1.0, 0.3}}, {"c", {0.1, 0.1}}};
  LinearWordOracle o(w, 2);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Tokens masked = x;
    masked[i] = std::string(kUnkToken);
    double expect = o.Query(x)[1] - o.Query(masked)[1];
    EXPECT_DOUBLE_EQ(WordSaliency(o, x, 1, i), expect);
  }
}

TEST(PwwsAttack, HighestDeltaSubstitutionFlips) {
  // Only position 1 -> "terrible" flips; exhaustive single substitutions
  // confirm it is the unique flipping move.
  std::map<std::string, std::vector<double>> w{
      {"good", {0.0, 1.0}},   {"fine", {0.0, 0.8}},  {"movie", {0.0, 1.0}},
      {"terrible", {2.0, -1.0}}, {"bad", {0.0, 0.9}}, {"film", {0.0, 0.9}}};
  LinearWordOracle o(w, 2);
  SynonymTable t(Entries{{"good", {"fine"}},
                         {"awful", {"terrible", "bad"}},
                         {"movie", {"film"}}});
  LabeledExample ex{{"good", "awful", "movie"}, 1};
  ASSERT_EQ(ArgMax(o.Query(ex.tokens)), 1);

  int flips = 0;
  for (int pos : SubstitutablePositions(ex.tokens, t)) {
    for (const auto& s : t.synonyms_of(ex.tokens[pos])) {
      Tokens trial = ex.tokens;
      trial[pos] = s;
      flips += ArgMax(o.Query(trial)) != ex.label;
    }
  }
  ASSERT_EQ(flips, 1);

  AttackResult r = PwwsAttack(o, ex, t, 1.0);
  EXPECT_TRUE(r.success);
  EXPECT_EQ(r.substituted_count, 1);
  EXPECT_EQ(r.adversarial_tokens[1], "terrible");
}

TEST(PwwsRanking, UniformSaliencyReducesToDeltaOrder) {
  // UNK and the original word weigh the same, so every saliency is 0.
  std::map<std::string, std::vector<double>> w{
      {"a1", {0.0, -0.3}}, {"b1", {0.0, -0.9}}, {"c1", {0.0, -0.6}}};
  LinearWordOracle o(w, 2);
  SynonymTable t(Entries{{"a", {"a1"}}, {"b", {"b1"}}, {"c", {"c1"}}});
  Tokens x = {"a", "b", "c"};
  auto ranking = PwwsRanking(o, x, 1, t);
  ASSERT_EQ(ranking.size(), 3u);
  EXPECT_EQ(ranking[0].position, 1);
  EXPECT_EQ(ranking[1].position, 2);
  EXPECT_EQ(ranking[2].position, 0);
  for (const auto& c : ranking) EXPECT_DOUBLE_EQ(c.saliency, 0.0);
}

TEST(PwwsRanking, TiesGoToLowerIndex) {
  std::map<std::string, std::vector<double>> w{{"s", {0.0, -1.0}}};
  LinearWordOracle o(w, 2);
  SynonymTable t(Entries{{"a", {"s"}}, {"b", {"s"}}});
  Tokens x = {"b", "a", "b"};
  auto ranking = PwwsRanking(o, x, 1, t);
  ASSERT_EQ(ranking.size(), 3u);
  EXPECT_EQ(ranking[0].position, 0);
  EXPECT_EQ(ranking[1].position, 1);
  EXPECT_EQ(ranking[2].position, 2);
}

TEST(PwwsAttack, SkipsZeroScorePositionsWhilePositiveRemain) {
  std::map<std::string, std::vector<double>> w{
      {"a", {0.0, 0.0}}, {"a1", {0.0, 0.0}}, {"b", {0.0, 0.4}},
      {"b1", {0.0, -0.5}}, {"c", {0.0, 0.3}}, {"c1", {0.0, -0.2}}};
  LinearWordOracle o(w, 2);
  SynonymTable t(Entries{{"a", {"a1"}}, {"b", {"b1"}}, {"c", {"c1"}}});
  LabeledExample ex{{"a", "b", "c"}, 1};
  AttackResult r = PwwsAttack(o, ex, t, 1.0);
  ASSERT_TRUE(r.success);
  EXPECT_EQ(r.adversarial_tokens[0], "a");
}

TEST(PwwsAttack, QueryCountMatchesCountingWrapper) {
  std::map<std::string, std::vector<double>> w{
      {"a", {0.0, 1.0}}, {"a1", {0.0, 0.5}}, {"a2", {0.0, 0.2}},
      {"b", {0.0, 1.0}}, {"b1", {0.0, 0.1}}};
  LinearWordOracle inner(w, 2);
  CountingOracle counter(inner);
  SynonymTable t(Entries{{"a", {"a1", "a2"}}, {"b", {"b1"}}});
  LabeledExample ex{{"a", "b", "x", "x"}, 1};
  AttackResult r = PwwsAttack(counter, ex, t, 0.5);
  EXPECT_EQ(static_cast<std::size_t>(r.query_count), counter.count());
  // 1 original + (UNK + 2 synonyms) + (UNK + 1 synonym) + 2 greedy steps.
  EXPECT_EQ(r.query_count, 1 + 3 + 2 + 2);
}

TEST(PwwsAttack, AgreesWithBruteForce) {
  auto report = testing::RunPwwsBruteForce(100, 2024);
  EXPECT_EQ(report.instances, 100);
  EXPECT_GT(report.pwws_successes, 0);
  EXPECT_EQ(report.confirmed_by_reprediction, report.pwws_successes);
  EXPECT_EQ(report.confirmed_by_bruteforce, report.pwws_successes);
  EXPECT_EQ(report.nonsynonym_outputs, 0);
  EXPECT_LE(report.pwws_successes, report.feasible_instances);
}

}  // namespace
}  // namespace rse
