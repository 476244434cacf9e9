#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace authorship::text {

enum class PosTag {
  Noun,
  NounPlural,
  ProperNoun,
  Verb,
  VerbPresentSingular,
  VerbPast,
  Adjective,
  Adverb,
  Pronoun,
  Other,
};

std::string_view to_string(PosTag tag);
PosTag parse_pos_tag(std::string_view s);

bool is_noun(PosTag t);
bool is_verb(PosTag t);

/// Word lists backing the tagger and lemmatizer.
///
/// Open-class entries come from `pos_lexicon.tsv` (word, comma-separated
/// base tags, most frequent first); closed-class words from
/// `closed_class.tsv` (word, tag, optional lemma); irregular inflections
/// from `verb_exceptions.tsv` and `noun_exceptions.tsv`.
class LanguageResources {
 public:
  static LanguageResources load(const std::filesystem::path& lexicon_dir);

  /// Base tags for an open-class word, most frequent first; empty if unknown.
  const std::vector<PosTag>& open_tags(std::string_view word) const;
  bool has_open_tag(std::string_view word, PosTag base) const;

  struct ClosedEntry {
    PosTag tag;
    std::string lemma;
  };
  const ClosedEntry* closed(std::string_view word) const;

  /// Base forms listed for an irregular inflection.
  const std::vector<std::string>* verb_exception(std::string_view word) const;
  const std::vector<std::string>* noun_exception(std::string_view word) const;

  void add_open(std::string word, std::vector<PosTag> tags);
  void add_closed(std::string word, PosTag tag, std::string lemma);
  void add_verb_exception(std::string inflected, std::string base);
  void add_noun_exception(std::string inflected, std::string base);

 private:
  std::unordered_map<std::string, std::vector<PosTag>> open_;
  std::unordered_map<std::string, ClosedEntry> closed_;
  std::unordered_map<std::string, std::vector<std::string>> verb_exc_;
  std::unordered_map<std::string, std::vector<std::string>> noun_exc_;
};

/// Directory holding the bundled lexicon files: $AUTHORSHIP_DATA_DIR/lexicon
/// when the variable is set, otherwise the source tree's data/lexicon.
std::filesystem::path default_lexicon_dir();

/// Lazily loaded from default_lexicon_dir(); shared read-only.
const LanguageResources& default_resources();

struct TagInput {
  std::string word;  // cleaned, lowercase
  bool capitalized = false;
  bool sentence_initial = false;
};

/// Lexicon lookup, inflection analysis, suffix rules for unknown words and a
/// few neighbour rules to pick between ambiguous readings.
std::vector<PosTag> pos_tag(std::span<const TagInput> tokens, const LanguageResources& res);
std::vector<PosTag> pos_tag(std::span<const std::string> tokens, const LanguageResources& res);
std::vector<PosTag> pos_tag(std::span<const std::string> tokens);

/// Most frequent tag of a word on its own, used to compare replacement
/// candidates against the original token.
PosTag isolated_tag(std::string_view word, const LanguageResources& res);

/// Verbs to base form, nouns to singular; everything else unchanged.
std::string lemmatize(std::string_view word, PosTag pos, const LanguageResources& res);
std::string lemmatize(std::string_view word, PosTag pos);

/// Third-person singular present of a base-form verb ("seem" -> "seems").
std::string third_person_singular(std::string_view base);

}  // namespace authorship::text
