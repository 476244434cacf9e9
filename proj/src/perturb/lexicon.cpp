#include <fstream>
#include <sstream>

#include "internal.hpp"

namespace authorship::perturb {

namespace fs = std::filesystem;

namespace {

std::vector<std::vector<std::string>> read_table(const fs::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    if (cols.size() != columns)
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                    " tab-separated columns");
    rows.push_back(std::move(cols));
  }
  return rows;
}

SynonymClass parse_class(const std::string& s) {
  if (s == "Noun") return SynonymClass::Noun;
  if (s == "Verb") return SynonymClass::Verb;
  if (s == "Adjective") return SynonymClass::Adjective;
  if (s == "Adverb") return SynonymClass::Adverb;
  throw ArgumentError("unknown synonym class '" + s + "'");
}

// Lowercase with typographic apostrophes folded to '.
std::string normalize_contraction(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.compare(i, 3, "\xE2\x80\x99") == 0) {
      out.push_back('\'');
      i += 2;
    } else {
      out.push_back(text::ascii_lower(s[i]));
    }
  }
  return out;
}

}  // namespace

namespace detail {
std::string normalize_apostrophes(std::string_view s) { return normalize_contraction(s); }
}  // namespace detail

void LexiconSet::add_synonyms(const std::string& word, SynonymClass cls, std::vector<std::string> candidates) {
  auto& list = synonyms[{text::to_lower(word), cls}];
  for (auto& c : candidates)
    if (!c.empty()) list.push_back(text::to_lower(c));
}

void LexiconSet::add_contraction(const std::string& contraction, const std::string& expansion) {
  const auto key = normalize_contraction(contraction);
  if (key.find('\'') == std::string::npos)
    throw ArgumentError("contraction '" + contraction + "' has no apostrophe");
  if (expansion.empty()) throw ArgumentError("contraction '" + contraction + "' has an empty expansion");
  contractions[key] = expansion;
}

void LexiconSet::add_dialect_pair(const std::string& american, const std::string& british) {
  const auto a = text::to_lower(american), b = text::to_lower(british);
  if (a.empty() || b.empty() || a == b) throw ArgumentError("bad dialect pair '" + american + "'/'" + british + "'");
  if (!to_british.emplace(a, b).second) throw ArgumentError("American spelling '" + a + "' listed twice");
  if (!to_american.emplace(b, a).second) throw ArgumentError("British spelling '" + b + "' listed twice");
  dialect_pairs.emplace_back(a, b);
}

const std::vector<std::string>* LexiconSet::synonym_candidates(std::string_view word, SynonymClass cls) const {
  const auto it = synonyms.find({std::string(word), cls});
  return it == synonyms.end() ? nullptr : &it->second;
}

LexiconSet LexiconSet::load(const fs::path& dir) {
  LexiconSet lex;
  for (const auto& row : read_table(dir / "synonyms.tsv", 3)) {
    std::vector<std::string> cands;
    std::stringstream ss(row[2]);
    for (std::string c; std::getline(ss, c, ',');) cands.push_back(c);
    lex.add_synonyms(row[0], parse_class(row[1]), std::move(cands));
  }
  for (const auto& row : read_table(dir / "contractions.tsv", 2)) lex.add_contraction(row[0], row[1]);
  for (const auto& row : read_table(dir / "dialect.tsv", 2)) lex.add_dialect_pair(row[0], row[1]);
  return lex;
}

const LexiconSet& LexiconSet::default_set() {
  static const LexiconSet set = load(text::default_lexicon_dir());
  return set;
}

}  // namespace authorship::perturb
