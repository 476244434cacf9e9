#include <algorithm>
#include <numeric>

#include "authorship/embedding/embedding.hpp"

namespace authorship::embedding {

namespace {

std::string algorithm_name(Algorithm) { return "CBOW"; }

Algorithm parse_algorithm(const std::string& s) {
  if (s == "CBOW" || s == "cbow") return Algorithm::CBOW;
  throw ArgumentError("unsupported embedding algorithm '" + s + "'");
}

}  // namespace

void EmbeddingHyperparams::validate() const {
  if (dim <= 0) throw ArgumentError("dim must be positive");
  if (window <= 0) throw ArgumentError("window must be positive");
  if (min_count < 1) throw ArgumentError("min_count must be at least 1");
  if (max_vocab && *max_vocab == 0) throw ArgumentError("max_vocab must be positive when set");
  if (negative < 0) throw ArgumentError("negative must be non-negative");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
  if (!(sample >= 0.0)) throw ArgumentError("sample must be non-negative");
  if (iterations < 1) throw ArgumentError("iterations must be at least 1");
  if (workers < 1) throw ArgumentError("workers must be at least 1");
}

nlohmann::json EmbeddingHyperparams::to_json() const {
  nlohmann::json j = {{"algorithm", algorithm_name(algorithm)},
                      {"dim", dim},
                      {"window", window},
                      {"min_count", min_count},
                      {"max_vocab", nullptr},
                      {"negative", negative},
                      {"alpha", alpha},
                      {"sample", sample},
                      {"iterations", iterations},
                      {"seed", seed}};
  if (max_vocab) j["max_vocab"] = *max_vocab;
  return j;
}

EmbeddingHyperparams EmbeddingHyperparams::from_json(const nlohmann::json& j) {
  EmbeddingHyperparams hp;
  try {
    hp.algorithm = parse_algorithm(j.value("algorithm", std::string("CBOW")));
    hp.dim = j.at("dim").get<int>();
    hp.window = j.at("window").get<int>();
    hp.min_count = j.value("min_count", 1);
    if (j.contains("max_vocab") && !j.at("max_vocab").is_null()) hp.max_vocab = j.at("max_vocab").get<std::size_t>();
    hp.negative = j.at("negative").get<int>();
    hp.alpha = j.at("alpha").get<double>();
    hp.sample = j.at("sample").get<double>();
    hp.iterations = j.at("iterations").get<int>();
    hp.seed = j.value("seed", std::uint64_t{1});
    hp.workers = j.value("workers", 1);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("invalid embedding hyperparameters: ") + e.what());
  }
  hp.validate();
  return hp;
}

Vocab::Vocab(std::vector<std::string> words, std::vector<std::uint64_t> counts, std::uint64_t total_tokens)
    : words_(std::move(words)), counts_(std::move(counts)), total_tokens_(total_tokens) {
  if (words_.size() != counts_.size()) throw ArgumentError("vocab words and counts differ in length");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (!index_.emplace(words_[i], i).second) throw ArgumentError("duplicate vocab word '" + words_[i] + "'");
}

std::optional<std::size_t> Vocab::index(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocab build_vocab(const text::TokenStream& stream, const EmbeddingHyperparams& hp) {
  if (stream.empty()) throw ArgumentError("cannot build a vocabulary from an empty stream");
  std::unordered_map<std::string, std::size_t> first;
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  for (const auto& t : stream.tokens) {
    const auto [it, inserted] = first.emplace(t.lemma, words.size());
    if (inserted) {
      words.push_back(t.lemma);
      counts.push_back(0);
    }
    ++counts[it->second];
  }
  std::vector<std::size_t> order(words.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return counts[a] > counts[b]; });
  std::vector<std::string> kept_words;
  std::vector<std::uint64_t> kept_counts;
  for (std::size_t i : order) {
    if (counts[i] < static_cast<std::uint64_t>(hp.min_count)) break;
    if (hp.max_vocab && kept_words.size() == *hp.max_vocab) break;
    kept_words.push_back(words[i]);
    kept_counts.push_back(counts[i]);
  }
  return Vocab(std::move(kept_words), std::move(kept_counts), stream.size());
}

}  // namespace authorship::embedding
