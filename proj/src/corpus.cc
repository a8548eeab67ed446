#include "rse/corpus.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rse/random.h"

namespace rse {
namespace {

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Splits one CSV record starting at `pos`, honoring quoted fields that may
// span lines. Advances `pos` past the record terminator.
std::vector<std::string> NextCsvRecord(std::string_view s, std::size_t& pos,
                                       int& line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  while (pos < s.size()) {
    char c = s[pos++];
    if (quoted) {
      if (c == '"') {
        if (pos < s.size() && s[pos] == '"') {
          fields.back() += '"';
          ++pos;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line_no;
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c == '\n') {
      ++line_no;
      break;
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) {
    throw std::runtime_error("dataset line " + std::to_string(line_no) +
                             ": unterminated quote");
  }
  return fields;
}

}  // namespace

Tokens Tokenize(std::string_view text) {
  Tokens out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      flush();
    } else if (c < 0x80 && std::ispunct(c)) {
      flush();
      out.emplace_back(1, ch);
    } else {
      cur += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
  }
  flush();
  return out;
}

std::string JoinTokens(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(const std::vector<std::string>& words) {
  words_.emplace_back(kPadToken);
  words_.emplace_back(kUnkToken);
  ids_.emplace(kPadToken, kPadId);
  ids_.emplace(kUnkToken, kUnkId);
  for (const auto& w : words) {
    if (!ids_.emplace(w, static_cast<int>(words_.size())).second) {
      throw std::invalid_argument("duplicate vocabulary word: " + w);
    }
    words_.push_back(w);
  }
}

int Vocabulary::id_of(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  return it == ids_.end() ? kUnkId : it->second;
}

const std::string& Vocabulary::word_of(int id) const {
  return words_.at(static_cast<std::size_t>(id));
}

bool Vocabulary::contains(std::string_view word) const {
  return ids_.count(std::string(word)) > 0;
}

void Vocabulary::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& w : words_) out << w << '\n';
}

Vocabulary Vocabulary::Load(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) words.push_back(line);
  if (words.size() < 2 || words[0] != kPadToken || words[1] != kUnkToken) {
    throw std::runtime_error(path.string() +
                             ": vocabulary must start with <pad>, <unk>");
  }
  return Vocabulary(std::vector<std::string>(words.begin() + 2, words.end()));
}

Vocabulary BuildVocab(std::span<const LabeledExample> examples,
                      std::size_t max_size) {
  if (max_size < 2) throw std::invalid_argument("max_size must be >= 2");
  std::map<std::string, std::size_t> freq;
  for (const auto& ex : examples) {
    for (const auto& tok : ex.tokens) {
      if (tok != kPadToken && tok != kUnkToken) ++freq[tok];
    }
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(),
                                                          freq.end());
  // Stable over the lexicographic map order, so ties stay alphabetical.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) {
                     return a.second > b.second;
                   });
  std::size_t keep = std::min(ranked.size(), max_size - 2);
  std::vector<std::string> words;
  words.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) words.push_back(ranked[i].first);
  return Vocabulary(words);
}

EncodedExample Encode(std::span<const std::string> tokens, int label,
                      const Vocabulary& vocab, int padding_length) {
  if (padding_length < 1) {
    throw std::invalid_argument("padding_length must be >= 1");
  }
  EncodedExample out;
  out.label = label;
  out.ids.assign(static_cast<std::size_t>(padding_length), kPadId);
  out.true_length =
      static_cast<int>(std::min<std::size_t>(tokens.size(), padding_length));
  for (int i = 0; i < out.true_length; ++i) {
    out.ids[i] = vocab.id_of(tokens[i]);
  }
  return out;
}

Tokens Decode(const EncodedExample& encoded, const Vocabulary& vocab) {
  Tokens out;
  for (int i = 0; i < encoded.true_length; ++i) {
    out.push_back(vocab.word_of(encoded.ids[i]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Datasets

Dataset ParseDataset(std::string_view contents, const DatasetOptions& options) {
  Dataset ds;
  std::size_t pos = 0;
  int line_no = 1;
  bool header_pending = options.has_header;
  int max_label = -1;
  if (options.label_names) {
    max_label = static_cast<int>(options.label_names->size()) - 1;
  }
  while (pos < contents.size()) {
    int row_line = line_no;
    auto fields = NextCsvRecord(contents, pos, line_no);
    if (fields.size() == 1 && fields[0].find_first_not_of(" \t") ==
                                  std::string::npos) {
      continue;  // blank line
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    if (fields.size() < 2) {
      throw std::runtime_error("dataset line " + std::to_string(row_line) +
                               ": expected label,text");
    }
    std::string label_str = fields[0];
    int label = -1;
    if (options.label_names) {
      const auto& names = *options.label_names;
      auto it = std::find(names.begin(), names.end(), label_str);
      if (it == names.end()) {
        throw std::runtime_error("dataset line " + std::to_string(row_line) +
                                 ": unknown label '" + label_str + "'");
      }
      label = static_cast<int>(it - names.begin());
    } else {
      auto [p, ec] = std::from_chars(label_str.data(),
                                     label_str.data() + label_str.size(),
                                     label);
      if (ec != std::errc() || p != label_str.data() + label_str.size() ||
          label < 0) {
        throw std::runtime_error("dataset line " + std::to_string(row_line) +
                                 ": unknown label '" + label_str + "'");
      }
    }
    std::string text = fields[1];
    for (std::size_t i = 2; i < fields.size(); ++i) text += " " + fields[i];
    Tokens tokens = Tokenize(text);
    if (tokens.empty()) {
      ++ds.skipped_empty;
      continue;
    }
    max_label = std::max(max_label, label);
    ds.examples.push_back({std::move(tokens), label});
  }
  ds.class_counts = CountLabels(ds.examples, max_label + 1);
  return ds;
}

Dataset LoadDataset(const std::filesystem::path& path,
                    const DatasetOptions& options, DatasetSchema /*schema*/) {
  Dataset ds = ParseDataset(ReadFile(path), options);
  if (ds.skipped_empty > 0) {
    std::cerr << path.string() << ": skipped " << ds.skipped_empty
              << " rows with empty text\n";
  }
  return ds;
}

std::vector<std::size_t> CountLabels(std::span<const LabeledExample> examples,
                                     int num_classes) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (const auto& ex : examples) {
    if (ex.label < 0 || ex.label >= num_classes) {
      throw std::out_of_range("label " + std::to_string(ex.label) +
                              " outside [0, " + std::to_string(num_classes) +
                              ")");
    }
    ++counts[ex.label];
  }
  return counts;
}

std::vector<LabeledExample> SampleBalanced(
    std::span<const LabeledExample> examples, int num_classes, std::size_t n,
    std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, {0xba1a}));
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    by_class.at(examples[i].label).push_back(i);
  }
  std::vector<std::size_t> picked;
  const std::size_t k = static_cast<std::size_t>(num_classes);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t want = n / k + (c < n % k ? 1 : 0);
    auto& pool = by_class[c];
    if (pool.size() < want) {
      throw std::runtime_error("class " + std::to_string(c) + " has only " +
                               std::to_string(pool.size()) +
                               " examples, need " + std::to_string(want));
    }
    std::shuffle(pool.begin(), pool.end(), rng);
    picked.insert(picked.end(), pool.begin(), pool.begin() + want);
  }
  std::shuffle(picked.begin(), picked.end(), rng);
  std::vector<LabeledExample> out;
  out.reserve(picked.size());
  for (auto i : picked) out.push_back(examples[i]);
  return out;
}

WordVectors LoadWordVectors(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  WordVectors out;
  std::string line;
  std::size_t dim = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string word;
    if (!(fields >> word)) continue;
    std::vector<double> v;
    double x;
    while (fields >> x) v.push_back(x);
    if (v.empty() || (dim != 0 && v.size() != dim)) {
      throw std::runtime_error(path.string() + " line " +
                               std::to_string(line_no) +
                               ": inconsistent vector dimension");
    }
    dim = v.size();
    out[word] = std::move(v);
  }
  return out;
}

}  // namespace rse
