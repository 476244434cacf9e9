#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "authorship/common.hpp"
#include "authorship/text/stream.hpp"

namespace authorship::embedding {

enum class Algorithm { CBOW };

struct EmbeddingHyperparams {
  Algorithm algorithm = Algorithm::CBOW;
  int dim = 100;
  int window = 5;
  int min_count = 1;
  std::optional<std::size_t> max_vocab;
  int negative = 5;
  double alpha = 0.025;
  double sample = 1e-3;
  int iterations = 5;
  std::uint64_t seed = 1;
  // Not part of the model; 1 gives bit-reproducible training.
  int workers = 1;

  void validate() const;
  nlohmann::json to_json() const;
  static EmbeddingHyperparams from_json(const nlohmann::json& j);
  bool operator==(const EmbeddingHyperparams&) const = default;
};

class Vocab {
 public:
  struct Entry {
    std::size_t index;
    std::uint64_t count;
  };

  Vocab() = default;
  /// Words in index order with their counts.
  Vocab(std::vector<std::string> words, std::vector<std::uint64_t> counts, std::uint64_t total_tokens);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  std::optional<std::size_t> index(std::string_view word) const;
  bool contains(std::string_view word) const { return index(word).has_value(); }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::uint64_t count(std::size_t i) const { return counts_.at(i); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  /// Tokens in the stream the vocabulary was built from, including dropped ones.
  std::uint64_t total_tokens() const { return total_tokens_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
  std::uint64_t total_tokens_ = 0;
};

/// Counted on lemmas. Sorted by count descending, ties by first occurrence.
Vocab build_vocab(const text::TokenStream& stream, const EmbeddingHyperparams& hp);

struct AuthorEmbedding {
  std::string author_id;
  Vocab vocab;
  RowMatrix vectors;  // |V| x dim
  EmbeddingHyperparams hyperparams;
  std::vector<double> epoch_loss;  // mean loss per example

  Index dim() const { return vectors.cols(); }
  /// Checks row count and finiteness.
  void validate() const;
};

AuthorEmbedding train_cbow(const text::TokenStream& stream, const EmbeddingHyperparams& hp);

/// u.v / (|u||v|), 0 when either norm is 0.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  if (u.size() != v.size())
    throw ArgumentError("cosine of vectors with sizes " + std::to_string(u.size()) + " and " +
                        std::to_string(v.size()));
  using Scalar = typename DerivedA::Scalar;
  const Scalar nu = u.norm();
  const Scalar nv = v.norm();
  if (nu == Scalar(0) || nv == Scalar(0)) return Scalar(0);
  return u.reshaped().dot(v.reshaped()) / (nu * nv);
}

double cosine(const AuthorEmbedding& emb, std::string_view a, std::string_view b);

/// k nearest words by cosine, query excluded, descending, ties by index.
std::vector<std::pair<std::string, double>> most_similar(const AuthorEmbedding& emb, std::string_view word,
                                                         std::size_t k);

enum class Reduction {
  ContributingMean,  // divide by non-stop in-vocab count
  PaddedMean,        // divide by document length
  Sum,
};

std::string to_string(Reduction r);
Reduction parse_reduction(std::string_view s);

struct DocumentRef {
  std::string author_id;
  std::size_t partition_size = 0;
  std::size_t index = 0;
  bool operator==(const DocumentRef&) const = default;
};

struct DocVector {
  Vector values;
  DocumentRef document_ref;
  std::string label;
};

/// Averages lemma vectors of non-stop, in-vocab tokens; zero when none contribute.
DocVector doc2vec(const text::Document& doc, const AuthorEmbedding& emb, const text::StopwordSet& stopwords,
                  Reduction reduction = Reduction::ContributingMean);

struct Author2VecResult {
  AuthorEmbedding embedding;
  std::vector<DocVector> documents;
};

Author2VecResult author2vec(const text::TokenStream& corpus, const EmbeddingHyperparams& hp,
                            const text::StopwordSet& stopwords, std::size_t n,
                            Reduction reduction = Reduction::ContributingMean);

/// `<|V|> <dim>` header then `word v1 .. vdim` with 9 significant digits.
void write_embedding_text(const AuthorEmbedding& emb, std::ostream& out);
AuthorEmbedding read_embedding_text(std::istream& in);

/// Rounds every vector entry to what the text format stores, so a model used
/// in memory behaves exactly like the same model saved and reloaded.
void round_to_file_precision(AuthorEmbedding& emb);

/// Writes `<stem>.vec` and the `<stem>.json` sidecar (hyperparams, author, loss).
void save_embedding(const AuthorEmbedding& emb, const std::filesystem::path& vec_path);
AuthorEmbedding load_embedding(const std::filesystem::path& vec_path);

}  // namespace authorship::embedding
