#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "authorship/text/pos.hpp"
#include "authorship/text/tokenize.hpp"

using namespace authorship::text;

namespace {

struct Row {
  std::vector<std::string> cols;
};

std::vector<std::vector<std::string>> read_tsv(const std::string& path, bool keep_blank) {
  std::ifstream in(path);
  REQUIRE(in);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] == '#') continue;
    if (line.empty()) {
      if (keep_blank) rows.emplace_back();
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    rows.push_back(cols);
  }
  return rows;
}

const std::string kData = AUTHORSHIP_TEST_DATA_DIR;

}  // namespace

TEST_CASE("pos_tag spec examples") {
  const std::vector<std::string> words = {"she", "looked", "straight", "ahead"};
  CHECK(pos_tag(words) ==
        std::vector<PosTag>{PosTag::Pronoun, PosTag::VerbPast, PosTag::Adverb, PosTag::Adverb});
  CHECK(pos_tag(std::vector<std::string>{"murder"}) == std::vector<PosTag>{PosTag::Noun});
  CHECK(pos_tag(std::vector<std::string>{}).empty());
}

TEST_CASE("pos_tag suffix rules for unknown words") {
  const std::vector<std::string> words = {"zorbly", "glimphed", "blargs"};
  const auto tags = pos_tag(words);
  CHECK(tags[0] == PosTag::Adverb);
  CHECK(tags[1] == PosTag::VerbPast);
  CHECK(tags[2] == PosTag::NounPlural);
}

TEST_CASE("capitalized mid-sentence word is a proper noun") {
  std::vector<TagInput> in = {{"then", true, true}, {"holmes", true, false}, {"spoke", false, false}};
  const auto tags = pos_tag(std::span<const TagInput>(in), default_resources());
  CHECK(tags[1] == PosTag::ProperNoun);
  CHECK(tags[2] == PosTag::VerbPast);
}

TEST_CASE("pos_tag is deterministic") {
  const std::vector<std::string> words = {"the", "crowd", "was", "good", "humored"};
  CHECK(pos_tag(words) == pos_tag(words));
}

TEST_CASE("hand-tagged excerpt agreement") {
  const auto rows = read_tsv(kData + "/pos_sample.tsv", true);
  std::size_t total = 0, correct = 0;
  std::vector<TagInput> sentence;
  std::vector<PosTag> gold;
  std::ostringstream misses;
  auto flush = [&] {
    if (sentence.empty()) return;
    const auto tags = pos_tag(std::span<const TagInput>(sentence), default_resources());
    for (std::size_t i = 0; i < tags.size(); ++i) {
      ++total;
      if (tags[i] == gold[i])
        ++correct;
      else
        misses << sentence[i].word << ":" << to_string(tags[i]) << "/" << to_string(gold[i]) << " ";
    }
    sentence.clear();
    gold.clear();
  };
  for (const auto& r : rows) {
    if (r.empty()) {
      flush();
      continue;
    }
    const bool cap = r[0][0] >= 'A' && r[0][0] <= 'Z';
    sentence.push_back({to_lower(r[0]), cap, sentence.empty()});
    gold.push_back(parse_pos_tag(r[1]));
  }
  flush();
  REQUIRE(total >= 100);
  const double acc = static_cast<double>(correct) / static_cast<double>(total);
  INFO("misses: " << misses.str());
  CHECK(acc >= 0.90);
}

TEST_CASE("lemmatize spec examples") {
  CHECK(lemmatize("clutched", PosTag::Verb) == "clutch");
  CHECK(lemmatize("torpedoes", PosTag::Noun) == "torpedo");
  CHECK(lemmatize("slightly", PosTag::Adverb) == "slightly");
  CHECK(lemmatize("qwxzt", PosTag::Verb) == "qwxzt");
}

TEST_CASE("lemmatize agrees with hand-checked sample") {
  const auto rows = read_tsv(kData + "/lemma_sample.tsv", false);
  REQUIRE(rows.size() >= 200);
  std::size_t correct = 0;
  std::ostringstream misses;
  for (const auto& r : rows) {
    const auto got = lemmatize(r[0], parse_pos_tag(r[1]));
    if (got == r[2])
      ++correct;
    else
      misses << r[0] << "->" << got << " (want " << r[2] << ") ";
  }
  INFO("misses: " << misses.str());
  CHECK(correct == rows.size());
}

TEST_CASE("third person singular") {
  CHECK(third_person_singular("seem") == "seems");
  CHECK(third_person_singular("watch") == "watches");
  CHECK(third_person_singular("carry") == "carries");
  CHECK(third_person_singular("play") == "plays");
  CHECK(third_person_singular("go") == "goes");
}
