#ifndef RSE_LEXICON_H_
#define RSE_LEXICON_H_

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rse {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Word -> ordered, duplicate-free synonym candidates. Keys and values are
// lowercase single tokens; no word lists itself.
class SynonymTable {
 public:
  using Entries = std::map<std::string, std::vector<std::string>>;

  SynonymTable() = default;
  // Normalizes the given entries: lowercases, drops self references,
  // duplicates and empty lists.
  explicit SynonymTable(const Entries& entries, std::string source_name = "");

  // Returns the stored candidates for `word` (case-insensitive), or an empty
  // list for unknown words.
  const std::vector<std::string>& synonyms_of(std::string_view word) const;

  bool has_synonyms(std::string_view word) const {
    return !synonyms_of(word).empty();
  }

  const Entries& entries() const { return entries_; }
  const std::string& source_name() const { return source_name_; }
  std::size_t size() const { return entries_.size(); }

  // True when s in synonyms_of(w) implies w in synonyms_of(s).
  bool is_symmetric() const;

  friend bool operator==(const SynonymTable& a, const SynonymTable& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Entries entries_;
  std::string source_name_;
};

enum class LexiconFormat { kTsv };

// Reads `word<TAB>syn1,syn2,...` lines; blank lines and `#` comments are
// skipped. Throws ParseError naming the offending line for malformed input,
// multi-word synonyms, or a file with no entries.
SynonymTable LoadLexicon(const std::filesystem::path& path,
                         LexiconFormat format = LexiconFormat::kTsv);
SynonymTable ParseLexicon(std::string_view contents,
                          std::string source_name = "");

void SaveLexicon(const SynonymTable& table, const std::filesystem::path& path);
std::string FormatLexicon(const SynonymTable& table);

// Smallest superset in which the synonym relation is symmetric. Existing list
// order is kept; reverse edges are appended.
SynonymTable SymmetricClosure(const SynonymTable& table);

// Keeps only entries (and candidates) accepted by `keep`.
template <typename Pred>
SynonymTable FilterLexicon(const SynonymTable& table, Pred keep) {
  SynonymTable::Entries out;
  for (const auto& [word, syns] : table.entries()) {
    if (!keep(word)) continue;
    for (const auto& s : syns) {
      if (keep(s)) out[word].push_back(s);
    }
  }
  return SynonymTable(out, table.source_name());
}

}  // namespace rse

#endif  // RSE_LEXICON_H_
