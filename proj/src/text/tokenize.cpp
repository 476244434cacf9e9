#include "authorship/text/tokenize.hpp"

#include <unordered_set>

namespace authorship::text {

bool is_ascii_alnum(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = ascii_lower(c);
  return out;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_alpha(char c) { return (c >= 'a' && c <= 'z') || is_upper(c); }

bool starts_with_at(std::string_view s, std::size_t pos, std::string_view prefix) {
  return s.size() >= pos + prefix.size() && s.compare(pos, prefix.size(), prefix) == 0;
}

constexpr std::string_view kLeftDouble = "\xE2\x80\x9C";
constexpr std::string_view kRightDouble = "\xE2\x80\x9D";
constexpr std::string_view kLeftSingle = "\xE2\x80\x98";
constexpr std::string_view kRightSingle = "\xE2\x80\x99";
constexpr std::string_view kEnDash = "\xE2\x80\x93";
constexpr std::string_view kEmDash = "\xE2\x80\x94";
constexpr std::string_view kNbsp = "\xC2\xA0";

// Length of a closing quote/bracket at pos, 0 if none.
std::size_t closer_len(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  const char c = s[pos];
  if (c == '"' || c == '\'' || c == ')' || c == ']' || c == '_') return 1;
  if (starts_with_at(s, pos, kRightDouble) || starts_with_at(s, pos, kRightSingle)) return 3;
  return 0;
}

std::size_t opener_len(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  const char c = s[pos];
  if (c == '"' || c == '\'' || c == '(' || c == '[' || c == '_') return 1;
  if (starts_with_at(s, pos, kLeftDouble) || starts_with_at(s, pos, kLeftSingle)) return 3;
  return 0;
}

// Length of the whitespace sequence at pos (ASCII or no-break space).
std::size_t space_len(std::string_view s, std::size_t pos) {
  if (pos >= s.size()) return 0;
  if (is_space(s[pos])) return 1;
  if (starts_with_at(s, pos, kNbsp)) return 2;
  return 0;
}

const std::unordered_set<std::string_view>& abbreviations() {
  static const std::unordered_set<std::string_view> set = {
      "mr",   "mrs",  "ms",   "dr",   "st",   "messrs", "mme",  "mlle", "prof", "rev",
      "capt", "col",  "gen",  "lt",   "sgt",  "jr",     "sr",   "vs",   "etc",  "no",
      "co",   "inc",  "ltd",  "hon",  "gov",  "sen",    "rep",  "mt",   "ave",  "ft",
      "esq",  "bros", "maj",  "cpl",  "adm",  "supt",   "insp", "det",  "sq",   "viz",
      "cf",   "ch",   "vol",  "pp",   "fig",  "approx", "dept", "univ", "gov",  "pres"};
  return set;
}

// True if the period at `dot` belongs to an abbreviation or an initial.
bool abbreviation_before(std::string_view s, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && is_alpha(s[b - 1])) --b;
  const std::string_view word = s.substr(b, dot - b);
  if (word.empty()) return false;
  if (word.size() == 1 && is_upper(word[0])) return true;
  return is_abbreviation(to_lower(word));
}

}  // namespace

bool is_abbreviation(std::string_view word_lower) { return abbreviations().count(word_lower) > 0; }

std::vector<Span> segment_sentence_spans(std::string_view text) {
  std::vector<Span> out;
  const std::size_t n = text.size();
  std::size_t start = 0;

  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && space_len(text, begin) > 0) begin += space_len(text, begin);
    while (end > begin && is_space(text[end - 1])) --end;
    while (end >= begin + 2 && starts_with_at(text, end - 2, kNbsp)) end -= 2;
    if (end > begin) out.push_back({begin, end});
  };

  std::size_t i = 0;
  while (i < n) {
    const std::size_t sl = space_len(text, i);
    if (sl == 0) {
      ++i;
      continue;
    }
    // whitespace run [i, j)
    const std::size_t ws_begin = i;
    std::size_t j = i;
    int newlines = 0;
    while (j < n) {
      const std::size_t l = space_len(text, j);
      if (l == 0) break;
      if (text[j] == '\n') ++newlines;
      j += l;
    }
    bool boundary = newlines >= 2;
    if (!boundary && ws_begin > 0) {
      // walk back over closing quotes/brackets to the terminal mark
      std::size_t p = ws_begin;
      for (;;) {
        if (p >= 3 && (starts_with_at(text, p - 3, kRightDouble) ||
                       starts_with_at(text, p - 3, kRightSingle))) {
          p -= 3;
        } else if (p >= 1 && closer_len(text, p - 1) == 1) {
          p -= 1;
        } else {
          break;
        }
      }
      if (p >= 1 && (text[p - 1] == '.' || text[p - 1] == '!' || text[p - 1] == '?')) {
        std::size_t k = j;
        for (std::size_t l; (l = opener_len(text, k)) > 0;) k += l;
        const bool next_starts = k < n && (is_upper(text[k]) || is_digit(text[k]));
        const bool abbrev = text[p - 1] == '.' && abbreviation_before(text, p - 1);
        boundary = next_starts && !abbrev;
      }
    }
    if (boundary) {
      emit(start, ws_begin);
      start = j;
    }
    i = j;
  }
  emit(start, n);
  return out;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& s : segment_sentence_spans(text)) out.emplace_back(text.substr(s.begin, s.size()));
  return out;
}

std::vector<Span> tokenize_word_spans(std::string_view text) {
  std::vector<Span> out;
  const std::size_t n = text.size();
  std::size_t start = 0;
  std::size_t i = 0;
  auto flush = [&](std::size_t end) {
    if (end > start) out.push_back({start, end});
  };
  while (i < n) {
    std::size_t dl = 0;
    const char c = text[i];
    if (is_space(c) || c == '|' || c == '.') {
      dl = 1;
    } else if (starts_with_at(text, i, kEnDash) || starts_with_at(text, i, kEmDash)) {
      dl = 3;
    } else if (starts_with_at(text, i, kNbsp)) {
      dl = 2;
    } else if (c == '-' && i + 1 < n && text[i + 1] == '-') {
      dl = 2;
      while (i + dl < n && text[i + dl] == '-') ++dl;
    }
    if (dl > 0) {
      flush(i);
      i += dl;
      start = i;
    } else {
      ++i;
    }
  }
  flush(n);
  return out;
}

std::vector<std::string> tokenize_words(std::string_view sentence) {
  std::vector<std::string> out;
  for (const auto& s : tokenize_word_spans(sentence)) out.emplace_back(sentence.substr(s.begin, s.size()));
  return out;
}

std::optional<std::string> clean_token(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw)
    if (is_ascii_alnum(c)) out.push_back(ascii_lower(c));
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<Span> alnum_core(std::string_view fragment) {
  std::size_t b = 0;
  while (b < fragment.size() && !is_ascii_alnum(fragment[b])) ++b;
  if (b == fragment.size()) return std::nullopt;
  std::size_t e = fragment.size();
  while (e > b && !is_ascii_alnum(fragment[e - 1])) --e;
  return Span{b, e};
}

}  // namespace authorship::text
