#include "rse/lexicon.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "rse/corpus.h"

namespace rse {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

std::string_view Trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

const std::vector<std::string>& EmptyList() {
  static const std::vector<std::string> empty;
  return empty;
}

// Empty string when `word` is a single lexicon token, otherwise the reason.
std::string CheckWord(std::string_view word) {
  if (word.empty()) return "empty word";
  if (word.find_first_of(" \t") != std::string_view::npos) {
    return "multi-word entry '" + std::string(word) + "'";
  }
  Tokens toks = Tokenize(word);
  if (toks.size() != 1 || toks[0] != Lower(word)) {
    return "'" + std::string(word) + "' is not a single token";
  }
  return {};
}

}  // namespace

SynonymTable::SynonymTable(const Entries& entries, std::string source_name)
    : source_name_(std::move(source_name)) {
  for (const auto& [raw_word, raw_syns] : entries) {
    std::string word = Lower(raw_word);
    auto& list = entries_[word];
    for (const auto& raw : raw_syns) {
      std::string s = Lower(raw);
      if (s == word || std::find(list.begin(), list.end(), s) != list.end()) {
        continue;
      }
      list.push_back(std::move(s));
    }
  }
  std::erase_if(entries_, [](const auto& kv) { return kv.second.empty(); });
}

const std::vector<std::string>& SynonymTable::synonyms_of(
    std::string_view word) const {
  auto it = entries_.find(Lower(word));
  return it == entries_.end() ? EmptyList() : it->second;
}

bool SynonymTable::is_symmetric() const {
  for (const auto& [word, syns] : entries_) {
    for (const auto& s : syns) {
      const auto& back = synonyms_of(s);
      if (std::find(back.begin(), back.end(), word) == back.end()) return false;
    }
  }
  return true;
}

SynonymTable ParseLexicon(std::string_view contents, std::string source_name) {
  SynonymTable::Entries entries;
  std::istringstream in{std::string(contents)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = Trim(line);
    if (view.empty() || view.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("lexicon line " + std::to_string(line_no) +
                       ": expected word<TAB>synonyms");
    }
    std::string_view head = Trim(std::string_view(line).substr(0, tab));
    if (auto err = CheckWord(head); !err.empty()) {
      throw ParseError("lexicon line " + std::to_string(line_no) + ": " + err);
    }
    auto& list = entries[Lower(head)];
    std::string_view rest = std::string_view(line).substr(tab + 1);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view item = Trim(rest.substr(0, comma));
      rest = comma == std::string_view::npos ? std::string_view{}
                                             : rest.substr(comma + 1);
      if (item.empty()) continue;
      if (auto err = CheckWord(item); !err.empty()) {
        throw ParseError("lexicon line " + std::to_string(line_no) + ": " +
                         err);
      }
      list.emplace_back(item);
    }
  }
  SynonymTable table(entries, std::move(source_name));
  if (table.size() == 0) throw ParseError("lexicon has no entries");
  return table;
}

SynonymTable LoadLexicon(const std::filesystem::path& path,
                         LexiconFormat /*format*/) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open lexicon " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseLexicon(buf.str(), path.filename().string());
}

std::string FormatLexicon(const SynonymTable& table) {
  std::string out;
  for (const auto& [word, syns] : table.entries()) {
    out += word;
    out += '\t';
    for (std::size_t i = 0; i < syns.size(); ++i) {
      if (i > 0) out += ',';
      out += syns[i];
    }
    out += '\n';
  }
  return out;
}

void SaveLexicon(const SynonymTable& table, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << FormatLexicon(table);
}

SynonymTable SymmetricClosure(const SynonymTable& table) {
  SynonymTable::Entries entries = table.entries();
  for (const auto& [word, syns] : table.entries()) {
    for (const auto& s : syns) {
      auto& back = entries[s];
      if (std::find(back.begin(), back.end(), word) == back.end()) {
        back.push_back(word);
      }
    }
  }
  return SynonymTable(entries, table.source_name());
}

}  // namespace rse
