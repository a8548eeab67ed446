#ifndef RSE_CORPUS_H_
#define RSE_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rse {

using Tokens = std::vector<std::string>;

struct LabeledExample {
  Tokens tokens;
  int label = 0;
};

inline constexpr int kPadId = 0;
inline constexpr int kUnkId = 1;
inline constexpr std::string_view kPadToken = "<pad>";
inline constexpr std::string_view kUnkToken = "<unk>";

// Lowercases ASCII, splits on whitespace and emits every ASCII punctuation
// character as its own token. Bytes >= 0x80 are kept inside words.
Tokens Tokenize(std::string_view text);

std::string JoinTokens(std::span<const std::string> tokens);

class Vocabulary {
 public:
  static constexpr std::size_t kUnlimited =
      std::numeric_limits<std::size_t>::max();

  // PAD and UNK only.
  Vocabulary();
  // `words` excludes the reserved entries; ids are assigned from 2 upwards.
  explicit Vocabulary(const std::vector<std::string>& words);

  int id_of(std::string_view word) const;
  const std::string& word_of(int id) const;
  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }

  // Newline-delimited words in id order, reserved entries included.
  void Save(const std::filesystem::path& path) const;
  static Vocabulary Load(const std::filesystem::path& path);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_;
  }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> ids_;
};

// Keeps the max_size - 2 most frequent words; ties go to the
// lexicographically smaller word.
Vocabulary BuildVocab(std::span<const LabeledExample> examples,
                      std::size_t max_size);

struct EncodedExample {
  std::vector<int> ids;
  int label = 0;
  int true_length = 0;
};

// OOV -> UNK, prefix truncation, PAD appended up to padding_length.
EncodedExample Encode(std::span<const std::string> tokens, int label,
                      const Vocabulary& vocab, int padding_length);
inline EncodedExample Encode(const LabeledExample& example,
                             const Vocabulary& vocab, int padding_length) {
  return Encode(example.tokens, example.label, vocab, padding_length);
}
Tokens Decode(const EncodedExample& encoded, const Vocabulary& vocab);

struct DatasetOptions {
  bool has_header = false;
  // When set, labels are looked up by name; otherwise they must be 0-based
  // integers.
  std::optional<std::vector<std::string>> label_names;
};

struct Dataset {
  std::vector<LabeledExample> examples;
  std::vector<std::size_t> class_counts;
  std::size_t skipped_empty = 0;

  int num_classes() const { return static_cast<int>(class_counts.size()); }
};

enum class DatasetSchema { kLabelTextCsv };

// Rows are `label,text`; extra columns are joined into the text with a space.
// Quoted fields follow RFC 4180 (doubled quotes).
Dataset LoadDataset(const std::filesystem::path& path,
                    const DatasetOptions& options = {},
                    DatasetSchema schema = DatasetSchema::kLabelTextCsv);
Dataset ParseDataset(std::string_view contents,
                     const DatasetOptions& options = {});

// Draws floor(n / k) or ceil(n / k) examples from each of the k classes
// (the first n % k classes get the extra one), shuffled with `seed`.
std::vector<LabeledExample> SampleBalanced(
    std::span<const LabeledExample> examples, int num_classes, std::size_t n,
    std::uint64_t seed);

std::vector<std::size_t> CountLabels(std::span<const LabeledExample> examples,
                                     int num_classes);

// Flat `word v1 v2 ...` text file of word vectors.
using WordVectors = std::unordered_map<std::string, std::vector<double>>;
WordVectors LoadWordVectors(const std::filesystem::path& path);

}  // namespace rse

#endif  // RSE_CORPUS_H_
