#include "authorship/text/stream.hpp"

#include <fstream>
#include <memory>

#include <zlib.h>

#include "authorship/common.hpp"

namespace authorship::text {

namespace fs = std::filesystem;

StopwordSet::StopwordSet(std::unordered_set<std::string> words) {
  for (const auto& w : words) words_.insert(to_lower(w));
}

StopwordSet StopwordSet::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open stopword file " + path.string());
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.pop_back();
    std::size_t b = 0;
    while (b < line.size() && (line[b] == ' ' || line[b] == '\t')) ++b;
    if (b < line.size()) words.insert(line.substr(b));
  }
  if (words.empty()) throw ArgumentError("stopword file has no words: " + path.string());
  return StopwordSet(std::move(words));
}

const StopwordSet& StopwordSet::default_set() {
  static const StopwordSet set = load(default_lexicon_dir() / "stopwords.txt");
  return set;
}

bool StopwordSet::contains(std::string_view word) const {
  return words_.count(to_lower(word)) > 0;
}

TokenStream preprocess(const RawText& text, const StopwordSet& stopwords, const LanguageResources& res) {
  TokenStream stream;
  stream.author_id = text.author_id;
  const std::string_view content = text.content;

  std::vector<TagInput> inputs;
  std::vector<Span> spans;
  for (const auto& sentence : segment_sentence_spans(content)) {
    inputs.clear();
    spans.clear();
    const std::string_view s = content.substr(sentence.begin, sentence.size());
    for (const auto& frag : tokenize_word_spans(s)) {
      const std::string_view raw = s.substr(frag.begin, frag.size());
      auto cleaned = clean_token(raw);
      if (!cleaned) continue;
      const auto core = alnum_core(raw);
      const char first = raw[core->begin];
      inputs.push_back({std::move(*cleaned), first >= 'A' && first <= 'Z', inputs.empty()});
      spans.push_back({sentence.begin + frag.begin, sentence.begin + frag.end});
    }
    const auto tags = pos_tag(std::span<const TagInput>(inputs), res);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      Token tok;
      tok.lemma = lemmatize(inputs[i].word, tags[i], res);
      tok.surface = std::move(inputs[i].word);
      tok.pos = tags[i];
      tok.is_stopword = stopwords.contains(tok.lemma) || stopwords.contains(tok.surface);
      tok.source = spans[i];
      stream.tokens.push_back(std::move(tok));
    }
  }
  return stream;
}

TokenStream preprocess(const RawText& text, const StopwordSet& stopwords) {
  return preprocess(text, stopwords, default_resources());
}

std::vector<Document> partition(const TokenStream& stream, std::size_t n) {
  if (n == 0) throw ArgumentError("partition size must be positive");
  std::vector<Document> docs;
  const std::span<const Token> all(stream.tokens);
  for (std::size_t b = 0, idx = 0; b < all.size(); b += n, ++idx) {
    const std::size_t len = std::min(n, all.size() - b);
    docs.push_back(Document{all.subspan(b, len), stream.author_id, n, idx});
  }
  return docs;
}

std::string_view document_surface(const Document& doc, std::string_view raw) {
  if (doc.tokens.empty()) return {};
  const auto b = doc.tokens.front().source.begin;
  const auto e = doc.tokens.back().source.end;
  if (e <= b || e > raw.size()) throw ArgumentError("document has no source spans for this text");
  return raw.substr(b, e - b);
}

namespace {

struct GzCloser {
  void operator()(gzFile f) const {
    if (f) gzclose(f);
  }
};
using GzHandle = std::unique_ptr<std::remove_pointer_t<gzFile>, GzCloser>;

}  // namespace

void write_token_cache(const TokenStream& stream, const fs::path& path) {
  GzHandle f(gzopen(path.string().c_str(), "wb9"));
  if (!f) throw IoError("cannot write token cache " + path.string());
  std::string line;
  for (const auto& t : stream.tokens) {
    line.clear();
    line += t.surface;
    line += '\t';
    line += t.lemma;
    line += '\t';
    line += to_string(t.pos);
    line += '\t';
    line += t.is_stopword ? '1' : '0';
    line += '\n';
    if (gzwrite(f.get(), line.data(), static_cast<unsigned>(line.size())) != static_cast<int>(line.size()))
      throw IoError("error writing token cache " + path.string());
  }
}

TokenStream read_token_cache(const fs::path& path, std::string author_id) {
  GzHandle f(gzopen(path.string().c_str(), "rb"));
  if (!f) throw IoError("cannot read token cache " + path.string());
  TokenStream stream;
  stream.author_id = std::move(author_id);
  std::string pending;
  char buf[1 << 16];
  std::size_t line_no = 0;
  auto parse_line = [&](std::string_view line) {
    ++line_no;
    if (line.empty()) return;
    std::string_view cols[4];
    std::size_t b = 0;
    for (int k = 0; k < 4; ++k) {
      const auto e = k < 3 ? line.find('\t', b) : line.size();
      if (e == std::string_view::npos)
        throw IoError("malformed token cache line " + std::to_string(line_no) + " in " + path.string());
      cols[k] = line.substr(b, e - b);
      b = e + 1;
    }
    Token t;
    t.surface = std::string(cols[0]);
    t.lemma = std::string(cols[1]);
    t.pos = parse_pos_tag(cols[2]);
    t.is_stopword = cols[3] == "1";
    stream.tokens.push_back(std::move(t));
  };
  for (;;) {
    const int n = gzread(f.get(), buf, sizeof(buf));
    if (n < 0) throw IoError("error reading token cache " + path.string());
    if (n == 0) break;
    pending.append(buf, static_cast<std::size_t>(n));
    std::size_t b = 0;
    for (std::size_t e; (e = pending.find('\n', b)) != std::string::npos; b = e + 1)
      parse_line(std::string_view(pending).substr(b, e - b));
    pending.erase(0, b);
  }
  if (!pending.empty()) parse_line(pending);
  return stream;
}

}  // namespace authorship::text
