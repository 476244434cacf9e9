#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "authorship/classifier/mlp.hpp"
#include "authorship/embedding/embedding.hpp"
#include "authorship/eval/eval.hpp"
#include "authorship/perturb/perturb.hpp"

namespace authorship::service {

/// Overrides model_dir when set.
inline constexpr const char* kModelDirEnv = "AUTHORSHIP_MODEL_DIR";

/// Units per layer kept in /predict traces unless the full trace is asked for.
inline constexpr std::size_t kTraceUnits = 64;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 binds an ephemeral port
  std::filesystem::path model_dir = "models";
  std::filesystem::path lexicon_dir;  // empty: bundled lexicons
  double cap = perturb::kDefaultCap;
  std::size_t max_body_bytes = 1 << 20;
  std::string cors_origin = "*";

  /// Port in [0, 65535], directories exist, cap in [0, 1], body limit positive.
  void validate() const;
  nlohmann::json to_json() const;
  /// Missing keys keep their defaults; unknown keys are rejected.
  static ServiceConfig from_json(const nlohmann::json& j);
  static ServiceConfig load(const std::filesystem::path& path);
  void apply_environment();
};

/// One trained classifier as found on disk.
struct ModelDescriptor {
  std::string author_id;
  int dim = 0;
  std::size_t document_size = 0;
  std::vector<Index> layer_sizes;
  classifier::MlpHyperparams hyperparams;
  int n_iter = 0;
  bool has_embedding = false;
  std::filesystem::path path;

  nlohmann::json to_json() const;
};

/// Read-only view of a model directory laid out as eval::ModelPaths. Loaded
/// once; safe to share between request threads.
class ModelRegistry {
 public:
  /// A missing directory or one without models gives an empty registry;
  /// unreadable or mislabelled model files throw IoError.
  static ModelRegistry load(const std::filesystem::path& model_dir);

  /// Ascending (author, dim, document_size).
  const std::vector<ModelDescriptor>& descriptors() const { return descriptors_; }
  bool empty() const { return descriptors_.empty(); }

  const classifier::MlpModel* classifier(std::string_view author, int dim, std::size_t document_size) const;
  const embedding::AuthorEmbedding* embedding(std::string_view author, int dim) const;

  /// Authors whose classifier and embedding are both present at (dim, n).
  std::vector<std::string> authors(int dim, std::size_t document_size) const;

  /// The (dim, n) with the most usable authors; ties go to the larger dim,
  /// then the larger document size.
  std::optional<std::pair<int, std::size_t>> default_group() const;

  /// Smallest author id with an embedding at `dim`.
  std::optional<std::string> default_embedding_author(int dim) const;

 private:
  std::vector<ModelDescriptor> descriptors_;
  std::map<std::tuple<std::string, int, std::size_t>, classifier::MlpModel> classifiers_;
  std::map<std::pair<std::string, int>, embedding::AuthorEmbedding> embeddings_;
};

struct HttpResponse {
  int status = 200;
  nlohmann::json body;
};

/// `{code, message}` with a stable snake_case code.
nlohmann::json error_body(std::string_view code, std::string_view message);

/// Trace as JSON with every vector cut to its first `units` entries.
nlohmann::json trace_to_json(const classifier::ActivationTrace& trace, std::size_t units);

/// Request handlers without any transport. Every method is const and the
/// service holds no mutable state.
class Service {
 public:
  Service(ServiceConfig config, ModelRegistry registry);

  /// {text, dim?, document_size?} -> probabilities, author, traces, layer shapes.
  HttpResponse predict(std::string_view body, bool full_trace = false) const;
  /// {text, engines[], direction?, cap?, author?, dim?} -> markup, ratio, records.
  HttpResponse perturb(std::string_view body) const;
  HttpResponse models() const;
  HttpResponse healthz() const;

  const ServiceConfig& config() const { return config_; }
  const ModelRegistry& registry() const { return registry_; }

 private:
  ServiceConfig config_;
  ModelRegistry registry_;
  std::shared_ptr<const perturb::LexiconSet> owned_lexicon_;
  eval::Resources resources_;
};

/// httplib front end: JSON routes, CORS headers and preflight, JSON errors
/// for unknown routes, oversized bodies and handler exceptions.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds config().host and config().port; returns the bound port.
  int bind();
  /// Blocks until stop().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace authorship::service
