#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "authorship/common.hpp"
#include "authorship/text/tokenize.hpp"

using namespace authorship::text;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("segment_sentences splits on terminal punctuation") {
  const auto s = segment_sentences("She was quite young, not more than eighteen. She did not seem afraid.");
  REQUIRE(s.size() == 2);
  CHECK(s[0] == "She was quite young, not more than eighteen.");
  CHECK(s[1] == "She did not seem afraid.");
}

TEST_CASE("abbreviations do not end a sentence") {
  CHECK(segment_sentences("Mr. Holmes arrived.").size() == 1);
  CHECK(segment_sentences("He met Dr. Watson and Mrs. Hudson. They talked.").size() == 2);
  CHECK(segment_sentences("Signed J. H. Morton today.").size() == 1);
}

TEST_CASE("empty and whitespace input give no sentences") {
  CHECK(segment_sentences("").empty());
  CHECK(segment_sentences("  \n\t ").empty());
}

TEST_CASE("quoted speech and lowercase continuation") {
  const auto s = segment_sentences("\"Stop!\" he cried. \"Who is there?\" Nobody answered.");
  REQUIRE(s.size() == 3);
  CHECK(s[0] == "\"Stop!\" he cried.");
  CHECK(s[1] == "\"Who is there?\"");
  CHECK(s[2] == "Nobody answered.");
}

TEST_CASE("curly quotes close a sentence") {
  const auto s = segment_sentences("\xE2\x80\x9CI know it.\xE2\x80\x9D She smiled.");
  REQUIRE(s.size() == 2);
  CHECK(s[1] == "She smiled.");
}

TEST_CASE("blank line is a boundary") {
  const auto s = segment_sentences("CHAPTER I\n\nThe house was dark");
  REQUIRE(s.size() == 2);
  CHECK(s[0] == "CHAPTER I");
}

TEST_CASE("hand-labelled sample segments exactly") {
  const auto gold = read_lines(std::string(AUTHORSHIP_TEST_DATA_DIR) + "/segmentation_sample.txt");
  REQUIRE(gold.size() == 50);
  std::string text;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (i) text += (i % 3 == 0) ? "\n" : " ";
    text += gold[i];
  }
  const auto got = segment_sentences(text);
  REQUIRE(got.size() == gold.size());
  for (std::size_t i = 0; i < gold.size(); ++i) CHECK(got[i] == gold[i]);
}

TEST_CASE("segmentation preserves text order") {
  const std::string text = "One. Two!  Three?\nFour.";
  std::string joined;
  for (const auto& s : segment_sentences(text)) joined += s;
  std::string stripped;
  for (char c : text)
    if (c != ' ' && c != '\n') stripped += c;
  CHECK(joined == stripped);
}

TEST_CASE("tokenize_words on the five delimiter classes") {
  CHECK(tokenize_words("boats were being launched") ==
        std::vector<std::string>{"boats", "were", "being", "launched"});
  CHECK(tokenize_words("good\xE2\x80\x94humored") == std::vector<std::string>{"good", "humored"});
  CHECK(tokenize_words("good\xE2\x80\x93humored") == std::vector<std::string>{"good", "humored"});
  CHECK(tokenize_words("good-humored") == std::vector<std::string>{"good-humored"});
  CHECK(tokenize_words("a|b.c  d") == std::vector<std::string>{"a", "b", "c", "d"});
  CHECK(tokenize_words("wait--what") == std::vector<std::string>{"wait", "what"});
  CHECK(tokenize_words("").empty());
  CHECK(tokenize_words(" . | ").empty());
}

TEST_CASE("word spans index into the source") {
  const std::string s = "the date, 1607, was";
  const auto spans = tokenize_word_spans(s);
  REQUIRE(spans.size() == 4);
  CHECK(s.substr(spans[2].begin, spans[2].size()) == "1607,");
}

TEST_CASE("clean_token") {
  CHECK(clean_token("good-humored") == "goodhumored");
  CHECK_FALSE(clean_token("\xE2\x80\x98\xE2\x80\x94\xE2\x80\x99").has_value());
  CHECK(clean_token("1607,") == "1607");
  CHECK(clean_token("\"Holmes!\"") == "holmes");
}

TEST_CASE("clean_token is idempotent and yields [a-z0-9]") {
  authorship::Rng rng(7);
  const std::string alphabet = "aZ9-'.,\"!?_ \xE2\x80\x94xQ";
  for (int trial = 0; trial < 500; ++trial) {
    std::string raw;
    const auto len = rng.below(12);
    for (std::uint64_t k = 0; k < len; ++k) raw += alphabet[rng.below(alphabet.size())];
    const auto once = clean_token(raw);
    if (!once) continue;
    CHECK(clean_token(*once) == once);
    for (char c : *once) CHECK(((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')));
  }
}
