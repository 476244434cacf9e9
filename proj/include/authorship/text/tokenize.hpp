#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace authorship::text {

/// Half-open byte range [begin, end) into a source string.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const Span&) const = default;
};

/// Sentence boundaries: '.', '!' or '?' (plus any closing quotes or
/// brackets) followed by whitespace and an uppercase letter or digit,
/// optionally behind opening quotes. A period after a known abbreviation
/// or a single-letter initial does not end a sentence. A blank line always
/// ends one. Spans exclude surrounding whitespace.
std::vector<Span> segment_sentence_spans(std::string_view text);
std::vector<std::string> segment_sentences(std::string_view text);

bool is_abbreviation(std::string_view word_lower);

/// Splits on whitespace, '|', en dash, em dash and '.'. A run of two or
/// more ASCII hyphens is read as an em dash. Empty fragments are dropped.
/// Returned spans are relative to `text`.
std::vector<Span> tokenize_word_spans(std::string_view text);
std::vector<std::string> tokenize_words(std::string_view sentence);

/// Drops every non-alphanumeric character and lowercases the rest.
std::optional<std::string> clean_token(std::string_view raw);

/// Offset of the first and one-past-last ASCII alphanumeric byte.
std::optional<Span> alnum_core(std::string_view fragment);

bool is_ascii_alnum(char c);
char ascii_lower(char c);
std::string to_lower(std::string_view s);

}  // namespace authorship::text
