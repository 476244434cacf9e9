#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "authorship/classifier/mlp.hpp"
#include "authorship/common.hpp"
#include "authorship/embedding/embedding.hpp"
#include "authorship/perturb/perturb.hpp"
#include "authorship/text/corpus.hpp"
#include "authorship/text/stream.hpp"

namespace authorship::eval {

// ---------------------------------------------------------------- splitting

enum class SplitStrategy { SeededShuffle, Contiguous };

std::string to_string(SplitStrategy s);
SplitStrategy parse_split_strategy(std::string_view s);

struct SplitSpec {
  double train_frac = 0.9;
  double test_frac = 0.1;
  double val_frac_of_train = 0.1;
  std::uint64_t seed = 1;
  SplitStrategy strategy = SplitStrategy::SeededShuffle;

  void validate() const;
  nlohmann::json to_json() const;
  static SplitSpec from_json(const nlohmann::json& j);
  bool operator==(const SplitSpec&) const = default;
};

inline constexpr std::size_t kMinSplitDocuments = 10;

/// Document indices, each list ascending.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
};

/// pool = floor(train_frac * n), test = n - pool; train = floor((1 - val) * pool),
/// val = pool - train. Contiguous keeps order and holds out the tail.
Split split(std::size_t n_docs, const SplitSpec& spec);

/// Per-author stratified split; each author's shuffle is seeded from
/// (spec.seed, author_id).
std::map<std::string, Split> split(const std::map<std::string, std::size_t>& docs_per_author, const SplitSpec& spec);

// ---------------------------------------------------------------- accuracy

template <typename T>
double accuracy(std::span<const T> preds, std::span<const T> labels) {
  if (preds.size() != labels.size()) throw ArgumentError("accuracy: predictions and labels differ in length");
  if (preds.empty()) throw ArgumentError("accuracy: no cases");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(preds.size());
}

template <typename T>
double accuracy(const std::vector<T>& preds, const std::vector<T>& labels) {
  return accuracy(std::span<const T>(preds), std::span<const T>(labels));
}

// ---------------------------------------------------------------- experiment config

enum class Scenario { Original, Synonym, Dialect, ContractionPronoun, NumberToText };

std::string to_string(Scenario s);
Scenario parse_scenario(std::string_view s);

struct AuthorConfig {
  std::string author_id;
  embedding::EmbeddingHyperparams embedding;  // dim is overridden per cell
  classifier::MlpHyperparams mlp;
  std::vector<Scenario> perturbations;  // Original is always evaluated
  std::optional<perturb::DialectDirection> dialect_direction;  // default: opposite of manifest dialect
};

struct ExperimentConfig {
  std::vector<int> vector_sizes = {50, 300};
  std::vector<std::size_t> document_sizes = {350, 1400, 3500};
  SplitSpec split_spec;
  std::vector<AuthorConfig> authors;
  double cap = perturb::kDefaultCap;
  std::uint64_t seed = 1;  // drives embedding, split and MLP seeds
  embedding::Reduction reduction = embedding::Reduction::ContributingMean;

  void validate() const;
  const AuthorConfig& author(std::string_view id) const;
  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  static ExperimentConfig load(const std::filesystem::path& path);
  /// FNV-1a of the canonical JSON dump, 16 hex digits.
  std::string hash() const;
};

/// Stable per-purpose seed, e.g. derive_seed(cfg.seed, "embedding/christie").
std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose);

// ---------------------------------------------------------------- reports

struct DocPrediction {
  embedding::DocumentRef document;
  int label = 0;             // 1 when the document belongs to the report's author
  double probability = 0.0;  // from the report author's model
  int predicted = 0;         // probability >= 0.5
  std::string predicted_author;  // argmax over all authors' models; empty if unavailable
  std::size_t perturbations = 0;
  std::size_t word_count = 0;
};

struct EvalReport {
  std::string author_id;
  int vector_size = 0;
  std::size_t document_size = 0;
  Scenario scenario = Scenario::Original;
  double accuracy = 0.0;  // correct / total, exactly
  std::size_t correct = 0;
  std::size_t total = 0;
  double validation_accuracy = 0.0;  // original text, for reference
  std::uint64_t seed = 0;
  std::string config_hash;
  std::optional<perturb::RatioSummary> perturbation;  // over the author's test documents
  std::vector<DocPrediction> predictions;

  nlohmann::json to_json() const;
};

nlohmann::json reports_to_json(const std::vector<EvalReport>& reports);
std::string reports_to_csv(const std::vector<EvalReport>& reports);

// ---------------------------------------------------------------- matrix

/// Inputs shared by every cell: raw texts, their token streams and language data.
struct Corpus {
  text::CorpusManifest manifest;
  std::map<std::string, text::RawText> raw;
  std::map<std::string, text::TokenStream> streams;

  static Corpus load(const text::CorpusManifest& manifest, const text::StopwordSet& stopwords,
                     const text::LanguageResources& res);
};

/// Where trained artifacts live: embeddings/<author>_<dim>.{vec,json},
/// classifiers/<author>_<dim>_<docsize>.json.
struct ModelPaths {
  std::filesystem::path root;

  std::filesystem::path embedding(std::string_view author, int dim) const;
  std::filesystem::path classifier(std::string_view author, int dim, std::size_t doc_size) const;
};

struct MatrixOptions {
  bool train = true;                      // false: load every model from `models`
  std::optional<ModelPaths> models;       // when training, trained artifacts are written here
  std::optional<std::vector<Scenario>> scenarios;  // restrict; default all configured
  std::optional<std::vector<std::string>> only_authors;
  bool per_document = true;               // keep DocPrediction lists
  int workers = 1;                        // embedding training threads
};

struct Resources {
  const text::StopwordSet* stopwords = nullptr;
  const text::LanguageResources* language = nullptr;
  const perturb::LexiconSet* lexicon = nullptr;

  static Resources defaults();
};

/// One report per (author, dim, docsize, scenario) for Original plus the
/// author's configured perturbations. Cells are
/// visited author-major, then dim, docsize, scenario (Original first).
std::vector<EvalReport> run_matrix(const Corpus& corpus, const ExperimentConfig& cfg, const Resources& res,
                                   const MatrixOptions& options = {});

/// The embedding run_matrix trains for `ac` at `dim`: seeded from cfg.seed
/// and the author id, rounded to file precision.
embedding::AuthorEmbedding train_author_embedding(const text::TokenStream& stream, const ExperimentConfig& cfg,
                                                  const AuthorConfig& ac, int dim, int workers = 1);

/// One-vs-rest rows for `author`'s classifier at document size n: the
/// documents of every author in `authors` embedded with `emb`, labelled 1
/// for `author`. Rows follow ascending author id, then document index.
struct OneVsRestData {
  Matrix train, val, test;
  std::vector<int> train_labels, val_labels, test_labels;
  std::vector<embedding::DocumentRef> test_refs;
};

OneVsRestData one_vs_rest_data(const Corpus& corpus, const std::vector<std::string>& authors, const std::string& author,
                               const embedding::AuthorEmbedding& emb, std::size_t document_size,
                               const SplitSpec& split_spec, const text::StopwordSet& stopwords,
                               embedding::Reduction reduction = embedding::Reduction::ContributingMean);

/// The classifier run_matrix trains for `ac` at (dim, n).
classifier::MlpModel train_author_classifier(const OneVsRestData& data, const ExperimentConfig& cfg,
                                             const AuthorConfig& ac, int dim, std::size_t document_size);

/// Models required by run_matrix(train=false) that are absent under `paths`.
std::vector<std::filesystem::path> missing_models(const ExperimentConfig& cfg, const ModelPaths& paths,
                                                  const std::vector<std::string>& authors);

/// Surface text of `doc` with `scenario` applied, as the classifier sees it.
perturb::PerturbedText perturb_document(std::string_view surface, Scenario scenario,
                                        const embedding::AuthorEmbedding& emb, perturb::DialectDirection direction,
                                        double cap, const Resources& res);

// ---------------------------------------------------------------- grid search

/// Ordered axes; the cartesian product is enumerated with the last axis
/// varying fastest.
struct GridSpec {
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;

  void validate() const;
  std::size_t size() const;
  /// Point i as {axis: value}.
  nlohmann::json point(std::size_t i) const;
  std::vector<nlohmann::json> points() const;
  static GridSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct GridRow {
  nlohmann::json point;
  double score = 0.0;
  std::optional<std::string> error;  // set when the point was infeasible
};

template <typename Hyperparams>
struct GridResult {
  Hyperparams best;
  nlohmann::json best_point;
  double best_score = 0.0;
  std::vector<GridRow> table;  // enumeration order
};

/// Embedding hyperparameter sweep for `author`: every point trains an
/// embedding on the author's stream and is scored by the validation
/// accuracy of a default-hyperparameter MLP. Points that cannot train
/// (empty vocabulary) score 0.
GridResult<embedding::EmbeddingHyperparams> grid_search_embedding(
    const std::map<std::string, text::TokenStream>& streams, const std::string& author,
    const embedding::EmbeddingHyperparams& base, const GridSpec& grid, std::size_t document_size,
    const SplitSpec& split_spec, const text::StopwordSet& stopwords,
    const classifier::MlpHyperparams& scorer = {});

/// Stratified k folds: each class's indices are shuffled, the class lists
/// concatenated and dealt round-robin. Each fold is ascending.
std::vector<std::vector<std::size_t>> kfold_indices(const std::vector<int>& y, std::size_t k, std::uint64_t seed);

inline constexpr std::size_t kDefaultFolds = 5;

GridResult<classifier::MlpHyperparams> grid_search_mlp(const Matrix& X, const std::vector<int>& y,
                                                       const classifier::MlpHyperparams& base, const GridSpec& grid,
                                                       std::size_t k = kDefaultFolds, std::uint64_t seed = 1);

/// Mean score over all other axes, rows = values of `row_axis`, columns =
/// values of `col_axis`. First row is the header.
std::string heatmap_csv(const std::vector<GridRow>& table, const std::string& row_axis, const std::string& col_axis);
nlohmann::json grid_table_to_json(const std::vector<GridRow>& table);

/// Applies `point` over `base` through the JSON form, so axis names are the
/// hyperparameter JSON keys.
embedding::EmbeddingHyperparams apply_point(const embedding::EmbeddingHyperparams& base, const nlohmann::json& point);
classifier::MlpHyperparams apply_point(const classifier::MlpHyperparams& base, const nlohmann::json& point);

}  // namespace authorship::eval
