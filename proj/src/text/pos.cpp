#include "authorship/text/pos.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <unordered_set>

#include "authorship/common.hpp"
#include "authorship/text/tokenize.hpp"

#ifndef AUTHORSHIP_SOURCE_DATA_DIR
#define AUTHORSHIP_SOURCE_DATA_DIR "data"
#endif

namespace authorship::text {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<PosTag, std::string_view>, 10> kTagNames{{
    {PosTag::Noun, "Noun"},
    {PosTag::NounPlural, "NounPlural"},
    {PosTag::ProperNoun, "ProperNoun"},
    {PosTag::Verb, "Verb"},
    {PosTag::VerbPresentSingular, "VerbPresentSingular"},
    {PosTag::VerbPast, "VerbPast"},
    {PosTag::Adjective, "Adjective"},
    {PosTag::Adverb, "Adverb"},
    {PosTag::Pronoun, "Pronoun"},
    {PosTag::Other, "Other"},
}};

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t b = 0;
  for (;;) {
    const auto e = s.find(sep, b);
    out.emplace_back(s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
    if (e == std::string_view::npos) break;
    b = e + 1;
  }
  return out;
}

template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    fn(line);
  }
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

const std::vector<PosTag> kNoTags;

// Verb base-form candidates for an inflected word, in preference order.
std::vector<std::string> verb_stems(std::string_view w) {
  std::vector<std::string> out;
  auto stem = [&](std::size_t cut) { return std::string(w.substr(0, w.size() - cut)); };
  if (ends_with(w, "ing") && w.size() > 4) {
    const std::string s = stem(3);
    out.push_back(s + "e");
    out.push_back(s);
    if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2]) out.push_back(s.substr(0, s.size() - 1));
    if (ends_with(s, "y")) out.push_back(s.substr(0, s.size() - 1) + "ie");
  } else if (ends_with(w, "ed") && w.size() > 3) {
    const std::string s = stem(2);
    if (ends_with(w, "ied")) out.push_back(stem(3) + "y");
    out.push_back(s + "e");
    out.push_back(s);
    if (s.size() >= 2 && s[s.size() - 1] == s[s.size() - 2]) out.push_back(s.substr(0, s.size() - 1));
  } else if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 2) {
    if (ends_with(w, "ies")) out.push_back(stem(3) + "y");
    out.push_back(stem(1));
    if (ends_with(w, "es")) out.push_back(stem(2));
  }
  return out;
}

std::vector<std::string> noun_stems(std::string_view w) {
  std::vector<std::string> out;
  auto stem = [&](std::size_t cut) { return std::string(w.substr(0, w.size() - cut)); };
  if (ends_with(w, "men") && w.size() > 3) out.push_back(stem(3) + "man");
  if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 2) {
    if (ends_with(w, "ies")) out.push_back(stem(3) + "y");
    if (ends_with(w, "ves")) {
      out.push_back(stem(3) + "f");
      out.push_back(stem(3) + "fe");
    }
    out.push_back(stem(1));
    if (ends_with(w, "es")) out.push_back(stem(2));
  }
  return out;
}

std::optional<std::string> valid_verb_stem(std::string_view w, const LanguageResources& res) {
  for (auto& s : verb_stems(w))
    if (res.has_open_tag(s, PosTag::Verb)) return s;
  return std::nullopt;
}

std::optional<std::string> valid_noun_stem(std::string_view w, const LanguageResources& res) {
  for (auto& s : noun_stems(w))
    if (res.has_open_tag(s, PosTag::Noun)) return s;
  return std::nullopt;
}

bool has(const std::vector<PosTag>& v, PosTag t) { return std::find(v.begin(), v.end(), t) != v.end(); }

void push_unique(std::vector<PosTag>& v, PosTag t) {
  if (!has(v, t)) v.push_back(t);
}

// Possible tags of a lowercase word, most likely first.
std::vector<PosTag> candidates(std::string_view w, const LanguageResources& res) {
  if (const auto* c = res.closed(w)) return {c->tag};
  if (all_digits(w)) return {PosTag::Other};

  const auto& base = res.open_tags(w);
  std::vector<PosTag> inflected;
  if (res.verb_exception(w)) inflected.push_back(ends_with(w, "ing") ? PosTag::Verb : PosTag::VerbPast);
  if (res.noun_exception(w)) inflected.push_back(PosTag::NounPlural);
  const bool base_verb = has(base, PosTag::Verb);
  const bool base_noun = has(base, PosTag::Noun);
  if (!base_verb && ends_with(w, "ed") && valid_verb_stem(w, res)) push_unique(inflected, PosTag::VerbPast);
  if (!base_verb && ends_with(w, "ing") && valid_verb_stem(w, res)) push_unique(inflected, PosTag::Verb);
  if (ends_with(w, "men") && !base_noun && valid_noun_stem(w, res)) push_unique(inflected, PosTag::NounPlural);
  if (ends_with(w, "s") && !ends_with(w, "ss")) {
    if (valid_noun_stem(w, res)) push_unique(inflected, PosTag::NounPlural);
    if (!base_verb && valid_verb_stem(w, res)) push_unique(inflected, PosTag::VerbPresentSingular);
  }

  std::vector<PosTag> out;
  const bool participle_adj = ends_with(w, "ed") && !base.empty() && !base_noun && !base_verb &&
                              has(inflected, PosTag::VerbPast);
  const bool inflected_first =
      base.empty() || participle_adj || res.verb_exception(w) != nullptr || ends_with(w, "s");
  if (inflected_first) {
    for (auto t : inflected) push_unique(out, t);
    for (auto t : base) push_unique(out, t);
  } else {
    for (auto t : base) push_unique(out, t);
    for (auto t : inflected) push_unique(out, t);
  }
  if (!out.empty()) return out;

  // comparatives and superlatives of known adjectives
  for (std::string_view suf : {"er", "est"}) {
    if (!ends_with(w, suf) || w.size() <= suf.size() + 2) continue;
    const std::string stem(w.substr(0, w.size() - suf.size()));
    std::vector<std::string> forms = {stem, stem + "e"};
    if (stem.size() >= 2 && stem[stem.size() - 1] == stem[stem.size() - 2]) forms.push_back(stem.substr(0, stem.size() - 1));
    if (ends_with(stem, "i")) forms.push_back(stem.substr(0, stem.size() - 1) + "y");
    for (const auto& f : forms)
      if (res.has_open_tag(f, PosTag::Adjective)) return {PosTag::Adjective};
  }

  // unknown word: suffix heuristics
  if (ends_with(w, "ly") && w.size() > 3) return {PosTag::Adverb};
  if (ends_with(w, "ed") && w.size() > 3) return {PosTag::VerbPast};
  if (ends_with(w, "ing") && w.size() > 4) return {PosTag::Verb};
  for (std::string_view suf : {"ous", "ful", "ive", "able", "ible", "less", "ish", "ic", "al"})
    if (ends_with(w, suf) && w.size() > suf.size() + 2) return {PosTag::Adjective};
  if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() > 3) return {PosTag::NounPlural};
  return {PosTag::Noun};
}

const std::unordered_set<std::string_view>& determiners() {
  static const std::unordered_set<std::string_view> s = {
      "the", "a",    "an",    "this", "that",  "these", "those",   "my",   "your",
      "his", "her",  "its",   "our",  "their", "some",  "any",     "every", "each",
      "no",  "much", "many",  "all",  "both",  "whose", "another", "such", "either"};
  return s;
}

const std::unordered_set<std::string_view>& verb_triggers() {
  static const std::unordered_set<std::string_view> s = {
      "i",   "you",  "he",    "she",    "it",   "we",    "they",  "who",  "to",   "will",
      "would", "shall", "should", "can", "could", "may",  "might", "must", "do",   "does",
      "did", "not",  "never", "cannot", "ought", "let"};
  return s;
}

const std::unordered_set<std::string_view>& singular_subjects() {
  static const std::unordered_set<std::string_view> s = {"he", "she", "it", "who", "that", "which"};
  return s;
}

const std::unordered_set<std::string_view>& be_forms() {
  static const std::unordered_set<std::string_view> set = {"am", "is", "are", "was", "were", "be", "been", "being"};
  return set;
}

const std::unordered_set<std::string_view>& degree_adverbs() {
  static const std::unordered_set<std::string_view> set = {"very", "quite", "so",    "too", "rather", "more",
                                                           "most", "less",  "least", "how", "as",     "fairly"};
  return set;
}

PosTag first_of(const std::vector<PosTag>& c, std::initializer_list<PosTag> wanted) {
  for (auto t : c)
    for (auto w : wanted)
      if (t == w) return t;
  return c.front();
}

bool has_any(const std::vector<PosTag>& c, std::initializer_list<PosTag> wanted) {
  for (auto w : wanted)
    if (has(c, w)) return true;
  return false;
}

}  // namespace

std::string_view to_string(PosTag tag) {
  for (const auto& [t, name] : kTagNames)
    if (t == tag) return name;
  return "Other";
}

PosTag parse_pos_tag(std::string_view s) {
  for (const auto& [t, name] : kTagNames)
    if (name == s) return t;
  throw ArgumentError("unknown POS tag '" + std::string(s) + "'");
}

bool is_noun(PosTag t) { return t == PosTag::Noun || t == PosTag::NounPlural || t == PosTag::ProperNoun; }
bool is_verb(PosTag t) {
  return t == PosTag::Verb || t == PosTag::VerbPresentSingular || t == PosTag::VerbPast;
}

LanguageResources LanguageResources::load(const fs::path& dir) {
  LanguageResources res;
  for_each_line(dir / "pos_lexicon.tsv", [&](const std::string& line) {
    const auto cols = split(line, '\t');
    if (cols.size() < 2) return;
    std::vector<PosTag> tags;
    for (const auto& t : split(cols[1], ',')) tags.push_back(parse_pos_tag(t));
    res.add_open(cols[0], std::move(tags));
  });
  for_each_line(dir / "closed_class.tsv", [&](const std::string& line) {
    const auto cols = split(line, '\t');
    if (cols.size() < 2) return;
    res.add_closed(cols[0], parse_pos_tag(cols[1]), cols.size() > 2 ? cols[2] : cols[0]);
  });
  for_each_line(dir / "verb_exceptions.tsv", [&](const std::string& line) {
    const auto cols = split(line, '\t');
    if (cols.size() >= 2) res.add_verb_exception(cols[0], cols[1]);
  });
  for_each_line(dir / "noun_exceptions.tsv", [&](const std::string& line) {
    const auto cols = split(line, '\t');
    if (cols.size() >= 2) res.add_noun_exception(cols[0], cols[1]);
  });
  return res;
}

const std::vector<PosTag>& LanguageResources::open_tags(std::string_view word) const {
  const auto it = open_.find(std::string(word));
  return it == open_.end() ? kNoTags : it->second;
}

bool LanguageResources::has_open_tag(std::string_view word, PosTag base) const {
  return has(open_tags(word), base);
}

const LanguageResources::ClosedEntry* LanguageResources::closed(std::string_view word) const {
  const auto it = closed_.find(std::string(word));
  return it == closed_.end() ? nullptr : &it->second;
}

const std::vector<std::string>* LanguageResources::verb_exception(std::string_view word) const {
  const auto it = verb_exc_.find(std::string(word));
  return it == verb_exc_.end() ? nullptr : &it->second;
}

const std::vector<std::string>* LanguageResources::noun_exception(std::string_view word) const {
  const auto it = noun_exc_.find(std::string(word));
  return it == noun_exc_.end() ? nullptr : &it->second;
}

void LanguageResources::add_open(std::string word, std::vector<PosTag> tags) {
  open_[std::move(word)] = std::move(tags);
}

void LanguageResources::add_closed(std::string word, PosTag tag, std::string lemma) {
  closed_[std::move(word)] = ClosedEntry{tag, std::move(lemma)};
}

void LanguageResources::add_verb_exception(std::string inflected, std::string base) {
  verb_exc_[std::move(inflected)].push_back(std::move(base));
}

void LanguageResources::add_noun_exception(std::string inflected, std::string base) {
  noun_exc_[std::move(inflected)].push_back(std::move(base));
}

fs::path default_lexicon_dir() {
  if (const char* env = std::getenv("AUTHORSHIP_DATA_DIR"); env && *env) return fs::path(env) / "lexicon";
  return fs::path(AUTHORSHIP_SOURCE_DATA_DIR) / "lexicon";
}

const LanguageResources& default_resources() {
  static const LanguageResources res = LanguageResources::load(default_lexicon_dir());
  return res;
}

std::vector<PosTag> pos_tag(std::span<const TagInput> tokens, const LanguageResources& res) {
  std::vector<std::vector<PosTag>> cands;
  cands.reserve(tokens.size());
  for (const auto& t : tokens) cands.push_back(candidates(t.word, res));

  std::vector<PosTag> out(tokens.size(), PosTag::Other);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto& w = tokens[i].word;
    const auto& c = cands[i];
    const bool closed = res.closed(w) != nullptr;
    const bool known = closed || !res.open_tags(w).empty() || res.verb_exception(w) || res.noun_exception(w);

    if (!closed && tokens[i].capitalized && (!tokens[i].sentence_initial || !known) && !all_digits(w)) {
      out[i] = PosTag::ProperNoun;
      continue;
    }
    if (c.size() == 1) {
      out[i] = c.front();
      continue;
    }

    const std::string_view prev = i > 0 ? std::string_view(tokens[i - 1].word) : std::string_view{};
    const PosTag prev_tag = i > 0 ? out[i - 1] : PosTag::Other;
    const bool has_noun = has_any(c, {PosTag::Noun, PosTag::NounPlural});
    const bool has_verb = has_any(c, {PosTag::Verb, PosTag::VerbPast, PosTag::VerbPresentSingular});
    const std::vector<PosTag>* next = i + 1 < tokens.size() ? &cands[i + 1] : nullptr;
    const bool next_nounish = next && (next->front() == PosTag::Noun || next->front() == PosTag::NounPlural);

    PosTag choice = c.front();
    if (has_noun && has_verb) {
      if (prev == "to") {
        choice = has(c, PosTag::Verb) ? PosTag::Verb : first_of(c, {PosTag::Noun, PosTag::NounPlural});
      } else if (be_forms().count(prev) && (ends_with(w, "ing") || ends_with(w, "ed"))) {
        choice = first_of(c, {ends_with(w, "ing") ? PosTag::Verb : PosTag::VerbPast});
      } else if (i > 0 && (determiners().count(prev) || prev_tag == PosTag::Adjective)) {
        choice = first_of(c, {PosTag::Noun, PosTag::NounPlural});
      } else if (i > 0 && verb_triggers().count(prev)) {
        if (singular_subjects().count(prev) && has(c, PosTag::VerbPresentSingular))
          choice = PosTag::VerbPresentSingular;
        else if (prev == "to" || (res.closed(prev) && res.closed(prev)->tag == PosTag::Other))
          choice = first_of(c, {PosTag::Verb, PosTag::VerbPresentSingular, PosTag::VerbPast});
        else
          choice = first_of(c, {PosTag::VerbPast, PosTag::VerbPresentSingular, PosTag::Verb});
      } else if (i > 0 && (is_noun(prev_tag) || prev_tag == PosTag::Pronoun) &&
                 has_any(c, {PosTag::VerbPast, PosTag::VerbPresentSingular})) {
        choice = first_of(c, {PosTag::VerbPast, PosTag::VerbPresentSingular});
      }
    } else if (has(c, PosTag::Adjective) && has(c, PosTag::Adverb)) {
      if (next_nounish)
        choice = PosTag::Adjective;
      else if (is_verb(prev_tag))
        choice = PosTag::Adverb;
    } else if (has(c, PosTag::Adjective) && has_noun) {
      if ((next_nounish && (i == 0 || determiners().count(prev) || prev_tag == PosTag::Other)) ||
          degree_adverbs().count(prev) || be_forms().count(prev))
        choice = PosTag::Adjective;
    }
    out[i] = choice;
  }
  return out;
}

std::vector<PosTag> pos_tag(std::span<const std::string> tokens, const LanguageResources& res) {
  std::vector<TagInput> in;
  in.reserve(tokens.size());
  for (const auto& t : tokens) in.push_back({t, false, false});
  return pos_tag(std::span<const TagInput>(in), res);
}

std::vector<PosTag> pos_tag(std::span<const std::string> tokens) { return pos_tag(tokens, default_resources()); }

PosTag isolated_tag(std::string_view word, const LanguageResources& res) { return candidates(word, res).front(); }

std::string lemmatize(std::string_view word, PosTag pos, const LanguageResources& res) {
  if (is_verb(pos)) {
    if (const auto* c = res.closed(word)) return c->lemma;
    if (const auto* ex = res.verb_exception(word)) return ex->front();
    if (pos == PosTag::Verb && res.has_open_tag(word, PosTag::Verb) && !ends_with(word, "ing"))
      return std::string(word);
    if (auto s = valid_verb_stem(word, res)) return *s;
    return std::string(word);
  }
  if (pos == PosTag::Noun || pos == PosTag::NounPlural) {
    if (const auto* ex = res.noun_exception(word)) return ex->front();
    if (pos == PosTag::Noun && res.has_open_tag(word, PosTag::Noun)) return std::string(word);
    if (auto s = valid_noun_stem(word, res)) return *s;
    return std::string(word);
  }
  return std::string(word);
}

std::string lemmatize(std::string_view word, PosTag pos) { return lemmatize(word, pos, default_resources()); }

std::string third_person_singular(std::string_view base) {
  if (base == "be") return "is";
  if (base == "have") return "has";
  if (base == "do") return "does";
  std::string w(base);
  if (ends_with(w, "s") || ends_with(w, "x") || ends_with(w, "z") || ends_with(w, "ch") ||
      ends_with(w, "sh") || ends_with(w, "o"))
    return w + "es";
  if (ends_with(w, "y") && w.size() > 1 && !is_vowel(w[w.size() - 2])) return w.substr(0, w.size() - 1) + "ies";
  return w + "s";
}

}  // namespace authorship::text
