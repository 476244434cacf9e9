#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "authorship/common.hpp"
#include "authorship/text/stream.hpp"

using namespace authorship;
using namespace authorship::text;

namespace {

TokenStream synthetic_stream(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  TokenStream s;
  s.author_id = "synthetic";
  for (std::size_t i = 0; i < n; ++i) {
    Token t;
    t.surface = "w" + std::to_string(rng.below(50));
    t.lemma = t.surface;
    s.tokens.push_back(t);
  }
  return s;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("authorship_test_" + name);
}

}  // namespace

TEST_CASE("preprocess flags stop words and lemmatizes") {
  const RawText raw{"t", "The boats were launched."};
  const auto s = preprocess(raw, StopwordSet::default_set());
  REQUIRE(s.size() == 4);
  CHECK(s.tokens[0].surface == "the");
  CHECK(s.tokens[0].is_stopword);
  CHECK(s.tokens[1].lemma == "boat");
  CHECK_FALSE(s.tokens[1].is_stopword);
  CHECK(s.tokens[2].surface == "were");
  CHECK(s.tokens[2].is_stopword);
  CHECK(s.tokens[3].lemma == "launch");
  CHECK(raw.content.substr(s.tokens[3].source.begin, s.tokens[3].source.size()) == "launched");
}

TEST_CASE("preprocess of punctuation only is empty") {
  CHECK(preprocess(RawText{"t", "... !? -- | \xE2\x80\x94"}, StopwordSet::default_set()).empty());
  CHECK(preprocess(RawText{"t", ""}, StopwordSet::default_set()).empty());
}

TEST_CASE("preprocess is deterministic and cleans to [a-z0-9]") {
  const RawText raw{"t",
                    "\"You'll have some question to answer,\" said Mr. Carter. The date, 1607, "
                    "was good-humored\xE2\x80\x94" "and the crowd|laughed."};
  const auto a = preprocess(raw, StopwordSet::default_set());
  const auto b = preprocess(raw, StopwordSet::default_set());
  CHECK(a.tokens == b.tokens);
  for (const auto& t : a.tokens) {
    CHECK_FALSE(t.surface.empty());
    for (char c : t.surface) CHECK(((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9')));
  }
  bool saw_fused = false;
  for (const auto& t : a.tokens) saw_fused |= t.surface == "goodhumored";
  CHECK(saw_fused);
}

TEST_CASE("partition sizes") {
  const auto s = synthetic_stream(7, 1);
  const auto docs = partition(s, 3);
  REQUIRE(docs.size() == 3);
  CHECK(docs[0].tokens.size() == 3);
  CHECK(docs[1].tokens.size() == 3);
  CHECK(docs[2].tokens.size() == 1);
  CHECK(docs[2].index == 2);
  CHECK_THROWS_AS(partition(s, 0), ArgumentError);
  CHECK(partition(synthetic_stream(0, 1), 5).empty());
}

TEST_CASE("partition round-trip and count over random streams") {
  Rng rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    const auto len = rng.below(400);
    const auto n = 1 + rng.below(60);
    const auto s = synthetic_stream(len, trial);
    const auto docs = partition(s, n);
    CHECK(docs.size() == (len + n - 1) / n);
    std::vector<Token> flat;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      if (d + 1 < docs.size()) CHECK(docs[d].tokens.size() == n);
      CHECK(docs[d].tokens.size() <= n);
      flat.insert(flat.end(), docs[d].tokens.begin(), docs[d].tokens.end());
    }
    CHECK(flat == s.tokens);
  }
}

TEST_CASE("token cache round-trips") {
  const RawText raw{"t", "She did not seem afraid, and her grave, steadfast eyes looked straight ahead."};
  const auto s = preprocess(raw, StopwordSet::default_set());
  const auto path = temp_path("cache.tsv.gz");
  write_token_cache(s, path);
  const auto back = read_token_cache(path, "t");
  CHECK(back.tokens == s.tokens);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_token_cache(temp_path("missing.gz"), "t"), IoError);
}

TEST_CASE("stopword file loading") {
  const auto path = temp_path("stop.txt");
  {
    std::ofstream out(path);
    out << "# comment\nThe\n  and  \n\n";
  }
  const auto set = StopwordSet::load(path);
  CHECK(set.size() == 2);
  CHECK(set.contains("the"));
  CHECK(set.contains("THE"));
  {
    std::ofstream out(path);
    out << "# only comments\n";
  }
  CHECK_THROWS_AS(StopwordSet::load(path), ArgumentError);
  std::filesystem::remove(path);
}

TEST_CASE("load_author joins sources with a newline") {
  const auto a = temp_path("a.txt"), b = temp_path("b.txt");
  { std::ofstream(a) << "a"; }
  { std::ofstream(b) << "b"; }
  AuthorSource src{"x", "X", {a}, Dialect::British};
  CHECK(load_author(src).content == "a");
  src.sources.push_back(b);
  CHECK(load_author(src).content == "a\nb");
  src.sources.push_back(temp_path("nope.txt"));
  CHECK_THROWS_AS(load_author(src), IoError);
  { std::ofstream(b) << ""; }
  src.sources.pop_back();
  CHECK_THROWS_AS(load_author(src), IoError);
  { std::ofstream(b, std::ios::binary) << "\xFF\xFE"; }
  CHECK_THROWS_AS(load_author(src), IoError);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST_CASE("gutenberg boilerplate is stripped") {
  const std::string text =
      "Header junk\n*** START OF THE PROJECT GUTENBERG EBOOK X ***\nBody line.\n"
      "*** END OF THE PROJECT GUTENBERG EBOOK X ***\nLicense.";
  CHECK(strip_gutenberg_boilerplate(text) == "Body line.\n");
  CHECK(strip_gutenberg_boilerplate("plain") == "plain");
}

TEST_CASE("manifest validation") {
  nlohmann::json j = {{"authors",
                       {{{"author_id", "doyle"}, {"dialect", "British"}, {"sources", {"a.txt"}}},
                        {{"author_id", "rinehart"}, {"dialect", "American"}, {"sources", {"/abs/b.txt"}}}}}};
  const auto m = CorpusManifest::from_json(j, "/base");
  CHECK(m.author("doyle").sources[0] == std::filesystem::path("/base/a.txt"));
  CHECK(m.author("rinehart").sources[0] == std::filesystem::path("/abs/b.txt"));
  CHECK(m.author("rinehart").dialect == Dialect::American);
  CHECK_THROWS_AS(m.author("christie"), NotFoundError);
  const auto round = CorpusManifest::from_json(m.to_json(), "");
  CHECK(round.authors.size() == 2);

  auto dup = j;
  dup["authors"][1]["author_id"] = "doyle";
  CHECK_THROWS_AS(CorpusManifest::from_json(dup, ""), ArgumentError);
  auto nodialect = j;
  nodialect["authors"][0].erase("dialect");
  CHECK_THROWS_AS(CorpusManifest::from_json(nodialect, ""), ArgumentError);
  auto nosrc = j;
  nosrc["authors"][0]["sources"] = nlohmann::json::array();
  CHECK_THROWS_AS(CorpusManifest::from_json(nosrc, ""), ArgumentError);
}
