#include "rse/corpus.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "test_util.h"

namespace rse {
namespace {

LabeledExample Ex(const std::string& text, int label = 0) {
  return {Tokenize(text), label};
}

TEST(Tokenize, SplitsPunctuationAndLowercases) {
  EXPECT_EQ(Tokenize("Good movie!"), (Tokens{"good", "movie", "!"}));
  EXPECT_TRUE(Tokenize("").empty());
  EXPECT_EQ(Tokenize("  it's\tfine "), (Tokens{"it", "'", "s", "fine"}));
}

TEST(Tokenize, IdempotentOnJoinedTokens) {
  std::mt19937_64 rng(11);
  const std::string alphabet = "abcXYZ .,!?'-\t\n";
  std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> len(0, 40);
  for (int i = 0; i < 500; ++i) {
    std::string s;
    int n = len(rng);
    for (int k = 0; k < n; ++k) s += alphabet[pick(rng)];
    Tokens once = Tokenize(s);
    EXPECT_EQ(Tokenize(JoinTokens(once)), once) << s;
  }
}

TEST(BuildVocab, TopK) {
  std::vector<LabeledExample> data = {Ex("a a a b b c")};
  Vocabulary v = BuildVocab(data, 4);
  EXPECT_EQ(v.words(), (std::vector<std::string>{"<pad>", "<unk>", "a", "b"}));
}

TEST(BuildVocab, DegenerateSizeKeepsReservedOnly) {
  std::vector<LabeledExample> data = {Ex("a a b")};
  EXPECT_EQ(BuildVocab(data, 2).size(), 2u);
}

TEST(BuildVocab, TiesAgainstSortOracle) {
  std::vector<LabeledExample> data = {Ex("b a b a")};
  EXPECT_EQ(BuildVocab(data, 3).words().back(), "a");

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 25);
  std::vector<LabeledExample> random;
  for (int i = 0; i < 40; ++i) {
    LabeledExample e;
    for (int k = 0; k < 10; ++k) {
      e.tokens.push_back(std::string(1, static_cast<char>('a' + pick(rng))));
    }
    random.push_back(e);
  }
  std::map<std::string, int> freq;
  for (const auto& e : random) {
    for (const auto& t : e.tokens) ++freq[t];
  }
  std::vector<std::pair<std::string, int>> sorted(freq.begin(), freq.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& x, const auto& y) {
    return x.second != y.second ? x.second > y.second : x.first < y.first;
  });
  Vocabulary v = BuildVocab(random, 12);
  ASSERT_EQ(v.size(), 12u);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(v.word_of(i + 2), sorted[i].first);
}

TEST(BuildVocab, UnlimitedKeepsEveryWord) {
  std::vector<LabeledExample> data = {Ex("x y z x"), Ex("w")};
  EXPECT_EQ(BuildVocab(data, Vocabulary::kUnlimited).size(), 6u);
}

TEST(Encode, PadsShortText) {
  Vocabulary v({"hello", "world"});
  EncodedExample e = Encode(Tokens{"hello", "world"}, 1, v, 5);
  EXPECT_EQ(e.ids, (std::vector<int>{2, 3, 0, 0, 0}));
  EXPECT_EQ(e.true_length, 2);
  EXPECT_EQ(e.label, 1);
}

TEST(Encode, TruncatesToPrefix) {
  Vocabulary v({"w"});
  Tokens long_text(301, "w");
  long_text.back() = "last";
  EncodedExample e = Encode(long_text, 0, v, 300);
  EXPECT_EQ(e.ids.size(), 300u);
  EXPECT_EQ(e.true_length, 300);
  EXPECT_TRUE(std::all_of(e.ids.begin(), e.ids.end(),
                          [](int id) { return id == 2; }));
}

TEST(Encode, DecodeRoundTripAgainstOracle) {
  std::mt19937_64 rng(5);
  std::vector<std::string> known = {"a", "b", "c", "d"};
  Vocabulary v(known);
  std::uniform_int_distribution<int> pick(0, 6), len(0, 12);
  for (int i = 0; i < 200; ++i) {
    Tokens t;
    int n = len(rng);
    for (int k = 0; k < n; ++k) t.push_back(std::string(1, 'a' + pick(rng)));
    EncodedExample e = Encode(t, 0, v, 8);
    Tokens expect;
    for (std::size_t k = 0; k < std::min<std::size_t>(t.size(), 8); ++k) {
      expect.push_back(v.contains(t[k]) ? t[k] : std::string(kUnkToken));
    }
    EXPECT_EQ(Decode(e, v), expect);
    for (int k = 0; k < e.true_length; ++k) {
      EXPECT_NE(e.ids[k], kPadId);
      EXPECT_EQ(e.ids[k] == kUnkId, !v.contains(t[k]));
    }
    for (int k = e.true_length; k < 8; ++k) EXPECT_EQ(e.ids[k], kPadId);
  }
}

TEST(Vocabulary, SaveLoadRoundTrip) {
  auto dir = testing::TempDir("vocab");
  Vocabulary v({"alpha", "beta"});
  v.Save(dir / "vocab.txt");
  Vocabulary w = Vocabulary::Load(dir / "vocab.txt");
  EXPECT_EQ(v, w);
  EXPECT_EQ(w.id_of("beta"), 3);
  EXPECT_EQ(w.id_of("gamma"), kUnkId);
}

TEST(ParseDataset, AgStyleFourClasses) {
  Dataset d = ParseDataset("0,world news\n1,sports\n2,\"business, deals\"\n3,tech\n");
  EXPECT_EQ(d.num_classes(), 4);
  EXPECT_EQ(d.examples.size(), 4u);
  EXPECT_EQ(d.examples[2].tokens, (Tokens{"business", ",", "deals"}));
  EXPECT_EQ(d.examples[3].label, 3);
}

TEST(ParseDataset, SingleRow) {
  EXPECT_EQ(ParseDataset("0,only row\n").examples.size(), 1u);
}

TEST(ParseDataset, UnknownLabelThrows) {
  DatasetOptions o;
  o.label_names = std::vector<std::string>{"neg", "pos"};
  EXPECT_THROW(ParseDataset("neutral,text\n", o), std::runtime_error);
  EXPECT_EQ(ParseDataset("pos,text\n", o).examples[0].label, 1);
}

TEST(ParseDataset, EmptyTextSkippedAndCounted) {
  Dataset d = ParseDataset("0,\n1,kept\n0,\"\"\n");
  EXPECT_EQ(d.examples.size(), 1u);
  EXPECT_EQ(d.skipped_empty, 2u);
}

TEST(ParseDataset, QuotedFieldsWithDoubledQuotes) {
  Dataset d = ParseDataset("0,\"he said \"\"hi\"\"\"\n");
  EXPECT_EQ(d.examples[0].tokens, (Tokens{"he", "said", "\"", "hi", "\""}));
}

TEST(LoadDataset, BundledSampleClassCountsMatchLineOracle) {
  auto path = testing::SourcePath("data/ag_sample_train.csv");
  DatasetOptions o;
  o.has_header = true;
  o.label_names = std::vector<std::string>{"0", "1", "2", "3"};
  Dataset d = LoadDataset(path, o);

  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::map<std::string, std::size_t> oracle;
  while (std::getline(in, line)) ++oracle[line.substr(0, line.find(','))];
  ASSERT_EQ(d.num_classes(), 4);
  for (int c = 0; c < 4; ++c) {
    EXPECT_EQ(d.class_counts[c], oracle[std::to_string(c)]);
  }
}

TEST(SampleBalanced, ExactBalanceAndDeterminism) {
  std::vector<LabeledExample> data;
  for (int i = 0; i < 400; ++i) data.push_back({Tokens{"t"}, i % 4});
  auto a = SampleBalanced(data, 4, 202, 9);
  auto b = SampleBalanced(data, 4, 202, 9);
  ASSERT_EQ(a.size(), 202u);
  EXPECT_EQ(CountLabels(a, 4), (std::vector<std::size_t>{51, 51, 50, 50}));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].label, b[i].label);
}

TEST(SampleBalanced, TooFewExamplesThrows) {
  std::vector<LabeledExample> data = {{Tokens{"t"}, 0}, {Tokens{"u"}, 1}};
  EXPECT_THROW(SampleBalanced(data, 2, 4, 1), std::runtime_error);
}

}  // namespace
}  // namespace rse
