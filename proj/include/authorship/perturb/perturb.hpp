#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "authorship/embedding/embedding.hpp"
#include "authorship/text/corpus.hpp"
#include "authorship/text/pos.hpp"
#include "authorship/text/tokenize.hpp"

namespace authorship::perturb {

constexpr double kDefaultCap = 0.20;

enum class Kind { Synonym, Contraction, Pronoun, Dialect, Number };

std::string to_string(Kind k);
Kind parse_kind(std::string_view s);

struct PerturbationRecord {
  std::size_t token_index = 0;  // into the surface word list of original_text
  std::size_t offset = 0;       // byte offset of `original` in original_text
  std::string original;
  std::string replacement;
  Kind kind = Kind::Synonym;

  bool operator==(const PerturbationRecord&) const = default;
};

struct PerturbedText {
  std::string original_text;
  std::string perturbed_text;
  std::vector<PerturbationRecord> records;  // ascending offset, non-overlapping
  std::size_t word_count = 0;
  double ratio = 0.0;
  std::vector<std::string> warnings;
};

/// Splices records into `original` in offset order. Throws ArgumentError when
/// a record does not match the text under it or records overlap.
std::string apply_records(std::string_view original, const std::vector<PerturbationRecord>& records);

/// Word of the original text as seen by the engines: the alphanumeric core
/// of a tokenizer fragment, with its sentence-level POS tag.
struct SurfaceWord {
  text::Span span;       // absolute, covers the core
  std::string text;      // original casing
  std::string cleaned;   // clean_token(text)
  text::PosTag pos = text::PosTag::Other;
  std::size_t sentence = 0;
  bool sentence_initial = false;
};

/// Words in document order; their count is the ratio denominator.
std::vector<SurfaceWord> surface_words(std::string_view text, const text::LanguageResources& res);
std::size_t word_count(std::string_view text);

enum class SynonymClass { Noun, Verb, Adjective, Adverb };

struct LexiconSet {
  // (word, class) -> candidates in file order
  std::map<std::pair<std::string, SynonymClass>, std::vector<std::string>> synonyms;
  // lowercase, ASCII apostrophe
  std::unordered_map<std::string, std::string> contractions;
  std::vector<std::pair<std::string, std::string>> dialect_pairs;  // (american, british)
  std::unordered_map<std::string, std::string> to_british;
  std::unordered_map<std::string, std::string> to_american;
  std::string number_pattern = "[0-9]+ or [0-9]{1,3}(,[0-9]{3})+";

  static LexiconSet load(const std::filesystem::path& lexicon_dir);
  static const LexiconSet& default_set();

  void add_synonyms(const std::string& word, SynonymClass cls, std::vector<std::string> candidates);
  void add_contraction(const std::string& contraction, const std::string& expansion);
  void add_dialect_pair(const std::string& american, const std::string& british);

  const std::vector<std::string>* synonym_candidates(std::string_view word, SynonymClass cls) const;
};

/// Candidate POS check for synonym replacement.
enum class PosCheck {
  Isolated,   // candidate's most frequent lexicon tag
  InContext,  // re-tag the sentence with the candidate substituted
};

struct SynonymOptions {
  double cap = kDefaultCap;
  double min_similarity = 0.2;
  PosCheck pos_check = PosCheck::Isolated;
};

PerturbedText perturb_synonyms(std::string_view text, const embedding::AuthorEmbedding& emb,
                               const LexiconSet& lexicon, const text::LanguageResources& res,
                               const SynonymOptions& options = {});
PerturbedText perturb_synonyms(std::string_view text, const embedding::AuthorEmbedding& emb,
                               const LexiconSet& lexicon, double cap = kDefaultCap);

PerturbedText perturb_contractions_pronouns(std::string_view text, const LexiconSet& lexicon,
                                            double cap = kDefaultCap);

enum class DialectDirection { ToBritish, ToAmerican };

std::string to_string(DialectDirection d);
DialectDirection parse_direction(std::string_view s);
/// Translation away from the author's own dialect.
DialectDirection opposite_direction(text::Dialect author_dialect);

PerturbedText perturb_dialect(std::string_view text, const LexiconSet& lexicon, DialectDirection direction,
                              double cap = kDefaultCap);

PerturbedText perturb_numbers(std::string_view text, double cap = kDefaultCap);

inline constexpr std::uint64_t kNumberLimit = 1'000'000'000'000'000ull;

/// British wording: "and" before the final tens and units, commas between
/// scale groups. Throws RangeError when n >= 10^15.
std::string number_to_words(std::uint64_t n);

/// Re-cases `word` to follow `pattern`: ALL CAPS, Initial capital, or lower.
std::string match_case(std::string_view pattern, std::string_view word);

/// Each record as `<original|replacement>`; literal `<`, `>`, `|` and `\`
/// are backslash-escaped.
std::string encode_markup(const PerturbedText& p);

struct DecodedMarkup {
  std::string text;
  std::size_t span_count = 0;
  std::size_t adversarial_count = 0;
  std::size_t word_count = 0;  // of the all-original materialization
  double ratio = 0.0;          // adversarial_count / word_count
};

/// Span i (in order of appearance) shows its adversarial side iff i is in
/// `toggles`. Throws ParseError on malformed input, ArgumentError on a toggle
/// that names no span.
DecodedMarkup decode_markup(std::string_view markup, const std::set<std::size_t>& toggles);

struct RatioRow {
  std::size_t document = 0;
  std::size_t partition_size = 0;
  std::size_t word_count = 0;
  std::size_t records = 0;
  double ratio = 0.0;
};

struct RatioSummary {
  std::size_t documents = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stddev = 0.0;  // population
};

struct PerturbationStats {
  std::vector<RatioRow> rows;
  std::map<std::size_t, RatioSummary> by_partition_size;

  nlohmann::json to_json() const;
};

struct SizedPerturbation {
  std::size_t partition_size = 0;
  const PerturbedText* text = nullptr;
};

PerturbationStats perturbation_stats(const std::vector<SizedPerturbation>& docs);

/// Union of engine outputs over the same original text. Where two parts
/// touch the same bytes the earlier part wins; the survivors are kept in
/// offset order up to floor(cap * words).
PerturbedText merge_perturbations(std::string_view original, const std::vector<PerturbedText>& parts,
                                  double cap = kDefaultCap);

nlohmann::json to_json(const PerturbedText& p);

}  // namespace authorship::perturb
