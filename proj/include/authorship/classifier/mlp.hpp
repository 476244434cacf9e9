#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "authorship/classifier/gradient.hpp"
#include "authorship/common.hpp"
#include "authorship/embedding/embedding.hpp"

namespace authorship::classifier {

enum class Solver { Adam, SGD };

std::string to_string(Solver s);
Solver parse_solver(std::string_view s);

struct MlpHyperparams {
  std::vector<int> hidden_layer_sizes = {100};
  Solver solver = Solver::Adam;
  double alpha = 1e-4;
  int max_iter = 200;
  double tol = 1e-4;
  double learning_rate_init = 1e-3;
  int batch_size = 200;
  std::uint64_t seed = 1;
  double momentum = 0.9;
  bool nesterov = true;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int n_iter_no_change = 10;
  // z-score inputs with training-set statistics stored in the model
  bool standardize = false;

  void validate() const;
  nlohmann::json to_json() const;
  static MlpHyperparams from_json(const nlohmann::json& j);
  bool operator==(const MlpHyperparams&) const = default;
};

struct MlpModel {
  std::string author_id;
  Index input_dim = 0;
  MlpHyperparams hyperparams;
  MlpParams<double> params;
  // Empty unless hyperparams.standardize.
  Vector input_mean;
  Vector input_scale;
  std::vector<double> train_loss_curve;
  int n_iter = 0;

  /// Checks the shape chain input_dim -> hidden... -> 1 and finiteness.
  void validate() const;
  /// Layer widths including input and output, e.g. [50, 25, 1].
  std::vector<Index> layer_sizes() const;
};

/// Rows of X are samples; y holds 0/1 labels.
MlpModel train_mlp(const Matrix& X, const std::vector<int>& y, const MlpHyperparams& hp,
                   std::string author_id = "");
MlpModel train_mlp(std::span<const embedding::DocVector> X, const std::vector<int>& y,
                   const MlpHyperparams& hp, std::string author_id = "");

double predict_proba(const MlpModel& model, const Eigen::Ref<const Vector>& x);
double predict_proba(const MlpModel& model, const embedding::DocVector& x);
/// One probability per row.
Vector predict_proba_rows(const MlpModel& model, const Matrix& X);

struct LayerTrace {
  Vector pre;
  Vector post;
};

struct ActivationTrace {
  Vector input;
  std::vector<LayerTrace> layers;  // hidden layers then the output unit
  double probability = 0.0;
};

ActivationTrace forward_trace(const MlpModel& model, const Eigen::Ref<const Vector>& x);

struct AuthorPrediction {
  std::string author_id;
  std::map<std::string, double> probabilities;
};

/// Argmax over probabilities, ties by ascending author_id.
std::string choose_author(const std::map<std::string, double>& probabilities);

/// xs[i] is the document embedded with models[i]'s author embedding.
AuthorPrediction predict_author(std::span<const MlpModel> models, std::span<const Vector> xs);

nlohmann::json model_to_json(const MlpModel& model);
MlpModel model_from_json(const nlohmann::json& j);
void save_model(const MlpModel& model, const std::filesystem::path& path);
MlpModel load_model(const std::filesystem::path& path);

/// RFC 4648 base64 of little-endian float64 values.
std::string encode_f64(std::span<const double> values);
std::vector<double> decode_f64(std::string_view text);

}  // namespace authorship::classifier
