#include "authorship/classifier/mlp.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace authorship::classifier {

std::string to_string(Solver s) { return s == Solver::Adam ? "adam" : "sgd"; }

Solver parse_solver(std::string_view s) {
  if (s == "adam" || s == "Adam") return Solver::Adam;
  if (s == "sgd" || s == "SGD") return Solver::SGD;
  throw ArgumentError("unknown solver '" + std::string(s) + "'");
}

void MlpHyperparams::validate() const {
  if (hidden_layer_sizes.empty()) throw ArgumentError("hidden_layer_sizes must not be empty");
  for (int h : hidden_layer_sizes)
    if (h <= 0) throw ArgumentError("hidden layer sizes must be positive");
  if (!(alpha >= 0.0)) throw ArgumentError("alpha must be non-negative");
  if (max_iter < 1) throw ArgumentError("max_iter must be at least 1");
  if (!(tol > 0.0)) throw ArgumentError("tol must be positive");
  if (!(learning_rate_init > 0.0)) throw ArgumentError("learning_rate_init must be positive");
  if (batch_size < 1) throw ArgumentError("batch_size must be at least 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ArgumentError("momentum must lie in [0, 1)");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw ArgumentError("Adam betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (n_iter_no_change < 1) throw ArgumentError("n_iter_no_change must be at least 1");
}

nlohmann::json MlpHyperparams::to_json() const {
  return {{"hidden_layer_sizes", hidden_layer_sizes},
          {"solver", to_string(solver)},
          {"alpha", alpha},
          {"max_iter", max_iter},
          {"tol", tol},
          {"learning_rate_init", learning_rate_init},
          {"batch_size", batch_size},
          {"seed", seed},
          {"momentum", momentum},
          {"nesterov", nesterov},
          {"beta1", beta1},
          {"beta2", beta2},
          {"epsilon", epsilon},
          {"n_iter_no_change", n_iter_no_change},
          {"standardize", standardize}};
}

MlpHyperparams MlpHyperparams::from_json(const nlohmann::json& j) {
  MlpHyperparams hp;
  try {
    hp.hidden_layer_sizes = j.at("hidden_layer_sizes").get<std::vector<int>>();
    hp.solver = parse_solver(j.at("solver").get<std::string>());
    hp.alpha = j.at("alpha").get<double>();
    hp.max_iter = j.at("max_iter").get<int>();
    hp.tol = j.at("tol").get<double>();
    hp.learning_rate_init = j.value("learning_rate_init", hp.learning_rate_init);
    hp.batch_size = j.value("batch_size", hp.batch_size);
    hp.seed = j.value("seed", hp.seed);
    hp.momentum = j.value("momentum", hp.momentum);
    hp.nesterov = j.value("nesterov", hp.nesterov);
    hp.beta1 = j.value("beta1", hp.beta1);
    hp.beta2 = j.value("beta2", hp.beta2);
    hp.epsilon = j.value("epsilon", hp.epsilon);
    hp.n_iter_no_change = j.value("n_iter_no_change", hp.n_iter_no_change);
    hp.standardize = j.value("standardize", hp.standardize);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("invalid MLP hyperparameters: ") + e.what());
  }
  hp.validate();
  return hp;
}

std::vector<Index> MlpModel::layer_sizes() const {
  std::vector<Index> out = {input_dim};
  for (const auto& w : params.weights) out.push_back(w.cols());
  return out;
}

void MlpModel::validate() const {
  const std::size_t L = hyperparams.hidden_layer_sizes.size() + 1;
  if (params.weights.size() != L || params.biases.size() != L)
    throw ArgumentError("model has " + std::to_string(params.weights.size()) + " layers, expected " +
                        std::to_string(L));
  Index width = input_dim;
  if (width <= 0) throw ArgumentError("model input_dim must be positive");
  for (std::size_t l = 0; l < L; ++l) {
    const Index out = l + 1 < L ? hyperparams.hidden_layer_sizes[l] : 1;
    const auto& w = params.weights[l];
    if (w.rows() != width || w.cols() != out || params.biases[l].size() != out)
      throw ArgumentError("layer " + std::to_string(l) + " has shape " + std::to_string(w.rows()) + "x" +
                          std::to_string(w.cols()) + ", expected " + std::to_string(width) + "x" +
                          std::to_string(out));
    if (!w.allFinite() || !params.biases[l].allFinite())
      throw RangeError("layer " + std::to_string(l) + " has non-finite parameters");
    width = out;
  }
  if (hyperparams.standardize && (input_mean.size() != input_dim || input_scale.size() != input_dim))
    throw ArgumentError("standardization statistics do not match input_dim");
}

namespace {

MlpParams<double> init_params(Index input_dim, const std::vector<int>& hidden, Rng& rng) {
  MlpParams<double> p;
  std::vector<Index> sizes = {input_dim};
  for (int h : hidden) sizes.push_back(h);
  sizes.push_back(1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const bool output = l + 2 == sizes.size();
    // Glorot uniform; the sigmoid output layer uses the smaller gain
    const double bound = std::sqrt((output ? 2.0 : 6.0) / static_cast<double>(sizes[l] + sizes[l + 1]));
    Matrix w(sizes[l], sizes[l + 1]);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-bound, bound);
    Vector b(sizes[l + 1]);
    for (Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

// Flat list of (param, grad) pairs in a fixed order.
template <typename F>
void for_each_param(MlpParams<double>& p, MlpParams<double>& g, F&& f) {
  for (std::size_t l = 0; l < p.layers(); ++l) {
    f(2 * l, p.weights[l].reshaped(), g.weights[l].reshaped());
    f(2 * l + 1, p.biases[l].reshaped(), g.biases[l].reshaped());
  }
}

class Optimizer {
 public:
  Optimizer(const MlpHyperparams& hp, const MlpParams<double>& p) : hp_(hp) {
    for (std::size_t l = 0; l < p.layers(); ++l) {
      first_.push_back(Vector::Zero(p.weights[l].size()));
      first_.push_back(Vector::Zero(p.biases[l].size()));
    }
    second_ = first_;
  }

  void step(MlpParams<double>& p, MlpParams<double>& g) {
    const double lr = hp_.learning_rate_init;
    if (hp_.solver == Solver::Adam) {
      ++t_;
      const double lr_t = lr * std::sqrt(1.0 - std::pow(hp_.beta2, t_)) / (1.0 - std::pow(hp_.beta1, t_));
      for_each_param(p, g, [&](std::size_t k, auto param, auto grad) {
        first_[k] = hp_.beta1 * first_[k] + (1.0 - hp_.beta1) * grad;
        second_[k] = hp_.beta2 * second_[k] + (1.0 - hp_.beta2) * grad.cwiseAbs2();
        param -= (lr_t * first_[k].array() / (second_[k].array().sqrt() + hp_.epsilon)).matrix();
      });
    } else {
      for_each_param(p, g, [&](std::size_t k, auto param, auto grad) {
        Vector update = hp_.momentum * first_[k] - lr * grad;
        first_[k] = update;
        if (hp_.nesterov) update = hp_.momentum * update - lr * grad;
        param += update;
      });
    }
  }

 private:
  const MlpHyperparams& hp_;
  std::vector<Vector> first_;   // Adam m, or SGD velocity
  std::vector<Vector> second_;  // Adam v
  int t_ = 0;
};

Matrix standardize_rows(const MlpModel& m, const Matrix& X) {
  if (!m.hyperparams.standardize) return X;
  return ((X.rowwise() - m.input_mean.transpose()).array().rowwise() / m.input_scale.transpose().array()).matrix();
}

}  // namespace

MlpModel train_mlp(const Matrix& X, const std::vector<int>& y, const MlpHyperparams& hp, std::string author_id) {
  hp.validate();
  const Index n = X.rows();
  if (n < 2) throw ArgumentError("training needs at least two samples");
  if (static_cast<Index>(y.size()) != n) throw ArgumentError("label count differs from sample count");
  if (X.cols() == 0) throw ArgumentError("training inputs have zero width");
  if (!X.allFinite()) throw ArgumentError("training inputs contain non-finite values");
  Vector yv(n);
  for (Index i = 0; i < n; ++i) {
    if (y[i] != 0 && y[i] != 1) throw ArgumentError("labels must be 0 or 1");
    yv(i) = y[i];
  }
  if (yv.sum() == 0.0 || yv.sum() == static_cast<double>(n)) throw ArgumentError("training labels contain a single class");

  MlpModel m;
  m.author_id = std::move(author_id);
  m.input_dim = X.cols();
  m.hyperparams = hp;
  if (hp.standardize) {
    m.input_mean = X.colwise().mean().transpose();
    m.input_scale = ((X.rowwise() - m.input_mean.transpose()).cwiseAbs2().colwise().sum() / static_cast<double>(n))
                        .cwiseSqrt()
                        .transpose();
    for (Index i = 0; i < m.input_scale.size(); ++i)
      if (m.input_scale(i) == 0.0) m.input_scale(i) = 1.0;
  }
  const Matrix Xs = standardize_rows(m, X);

  Rng rng(hp.seed);
  m.params = init_params(m.input_dim, hp.hidden_layer_sizes, rng);
  Optimizer opt(m.hyperparams, m.params);
  const Index batch = std::min<Index>(hp.batch_size, n);
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});

  double best = std::numeric_limits<double>::infinity();
  int stale = 0;
  for (int epoch = 0; epoch < hp.max_iter; ++epoch) {
    rng.shuffle(order.begin(), order.end());
    double accumulated = 0.0;
    for (Index start = 0; start < n; start += batch) {
      const Index len = std::min(batch, n - start);
      const auto idx = std::span<const Index>(order).subspan(static_cast<std::size_t>(start), static_cast<std::size_t>(len));
      const Matrix Xb = Xs(idx, Eigen::all);
      const Vector yb = yv(idx);
      auto g = mlp_gradient(m.params, Xb, yb, hp.alpha);
      accumulated += g.loss * static_cast<double>(len);
      opt.step(m.params, g.grad);
    }
    const double loss = accumulated / static_cast<double>(n);
    if (!std::isfinite(loss)) throw RangeError("MLP training diverged at epoch " + std::to_string(epoch + 1));
    m.train_loss_curve.push_back(loss);
    ++m.n_iter;
    if (loss > best - hp.tol)
      ++stale;
    else
      stale = 0;
    best = std::min(best, loss);
    if (stale >= hp.n_iter_no_change) break;
  }
  m.validate();
  return m;
}

MlpModel train_mlp(std::span<const embedding::DocVector> X, const std::vector<int>& y, const MlpHyperparams& hp,
                   std::string author_id) {
  if (X.empty()) throw ArgumentError("training needs at least two samples");
  Matrix M(static_cast<Index>(X.size()), X.front().values.size());
  for (std::size_t i = 0; i < X.size(); ++i) {
    if (X[i].values.size() != M.cols()) throw ArgumentError("document vectors differ in length");
    M.row(static_cast<Index>(i)) = X[i].values.transpose();
  }
  return train_mlp(M, y, hp, std::move(author_id));
}

ActivationTrace forward_trace(const MlpModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.input_dim)
    throw ArgumentError("input has dimension " + std::to_string(x.size()) + ", model expects " +
                        std::to_string(model.input_dim));
  ActivationTrace t;
  t.input = x;
  Matrix a = standardize_rows(model, Matrix(x.transpose()));
  const auto& p = model.params;
  for (std::size_t l = 0; l < p.layers(); ++l) {
    Matrix z = a * p.weights[l];
    z.rowwise() += p.biases[l].transpose();
    LayerTrace lt;
    lt.pre = z.row(0).transpose();
    if (l + 1 < p.layers()) {
      a = z.cwiseMax(0.0);
      lt.post = a.row(0).transpose();
    } else {
      t.probability = sigmoid(z(0, 0));
      lt.post = Vector::Constant(1, t.probability);
    }
    t.layers.push_back(std::move(lt));
  }
  return t;
}

double predict_proba(const MlpModel& model, const Eigen::Ref<const Vector>& x) {
  return forward_trace(model, x).probability;
}

double predict_proba(const MlpModel& model, const embedding::DocVector& x) { return predict_proba(model, x.values); }

Vector predict_proba_rows(const MlpModel& model, const Matrix& X) {
  if (X.cols() != model.input_dim)
    throw ArgumentError("inputs have dimension " + std::to_string(X.cols()) + ", model expects " +
                        std::to_string(model.input_dim));
  const Vector z = mlp_logits(model.params, standardize_rows(model, X));
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

std::string choose_author(const std::map<std::string, double>& probabilities) {
  if (probabilities.empty()) throw ArgumentError("no probabilities to choose from");
  auto best = probabilities.begin();
  for (auto it = probabilities.begin(); it != probabilities.end(); ++it)
    if (it->second > best->second) best = it;
  return best->first;
}

AuthorPrediction predict_author(std::span<const MlpModel> models, std::span<const Vector> xs) {
  if (models.empty()) throw ArgumentError("no models given");
  if (models.size() != xs.size()) throw ArgumentError("need one input vector per model");
  AuthorPrediction out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    if (!out.probabilities.emplace(models[i].author_id, predict_proba(models[i], xs[i])).second)
      throw ArgumentError("duplicate author_id '" + models[i].author_id + "'");
  }
  out.author_id = choose_author(out.probabilities);
  return out;
}

}  // namespace authorship::classifier
