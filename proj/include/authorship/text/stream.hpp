#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "authorship/text/corpus.hpp"
#include "authorship/text/pos.hpp"
#include "authorship/text/tokenize.hpp"

namespace authorship::text {

struct Token {
  std::string surface;  // cleaned: [a-z0-9]+
  std::string lemma;
  PosTag pos = PosTag::Other;
  bool is_stopword = false;
  // Raw fragment this token was cleaned from; empty for cached streams.
  Span source{};

  bool operator==(const Token& o) const {
    return surface == o.surface && lemma == o.lemma && pos == o.pos &&
           is_stopword == o.is_stopword;
  }
};

struct TokenStream {
  std::string author_id;
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
};

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::unordered_set<std::string> words);

  /// One word per line, '#' starts a comment. Throws if the result is empty.
  static StopwordSet load(const std::filesystem::path& path);
  /// The bundled English list.
  static const StopwordSet& default_set();

  bool contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  std::unordered_set<std::string> words_;
};

/// Contiguous slice of a stream. `tokens` borrows from the stream, which
/// must outlive the document.
struct Document {
  std::span<const Token> tokens;
  std::string author_id;
  std::size_t partition_size = 0;
  std::size_t index = 0;
};

/// segment_sentences -> tokenize_words -> clean_token -> pos_tag -> lemmatize.
/// Stop words are kept and flagged.
TokenStream preprocess(const RawText& text, const StopwordSet& stopwords,
                       const LanguageResources& res);
TokenStream preprocess(const RawText& text, const StopwordSet& stopwords);

/// ceil(|stream| / n) documents of n tokens, the last possibly shorter.
/// Throws ArgumentError when n == 0.
std::vector<Document> partition(const TokenStream& stream, std::size_t n);

/// The raw text covered by a document's tokens. Requires source spans.
std::string_view document_surface(const Document& doc, std::string_view raw);

/// Gzip-compressed `surface\tlemma\tpos\tstopflag` lines.
void write_token_cache(const TokenStream& stream, const std::filesystem::path& path);
TokenStream read_token_cache(const std::filesystem::path& path, std::string author_id);

}  // namespace authorship::text
