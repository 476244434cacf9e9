#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "authorship/classifier/mlp.hpp"

using namespace authorship;
using namespace authorship::classifier;

namespace {

MlpParams<double> random_params(const std::vector<Index>& sizes, Rng& rng, double scale = 0.7) {
  MlpParams<double> p;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    Matrix w(sizes[l], sizes[l + 1]);
    for (Index i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-scale, scale);
    Vector b(sizes[l + 1]);
    for (Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-scale, scale);
    p.weights.push_back(w);
    p.biases.push_back(b);
  }
  return p;
}

// Numerical gradient of the loss wrt every parameter, in the order
// W0, b0, W1, b1, ...
std::vector<double> numeric_grad(MlpParams<double> p, const Matrix& X, const Vector& y, double alpha) {
  const double eps = 1e-4;
  std::vector<double> out;
  auto probe = [&](double& v) {
    const double keep = v;
    v = keep + eps;
    const double up = mlp_gradient(p, X, y, alpha).loss;
    v = keep - eps;
    const double down = mlp_gradient(p, X, y, alpha).loss;
    v = keep;
    out.push_back((up - down) / (2 * eps));
  };
  for (std::size_t l = 0; l < p.layers(); ++l) {
    for (Index i = 0; i < p.weights[l].size(); ++i) probe(p.weights[l].data()[i]);
    for (Index i = 0; i < p.biases[l].size(); ++i) probe(p.biases[l].data()[i]);
  }
  return out;
}

std::vector<double> flatten(const MlpParams<double>& g) {
  std::vector<double> out;
  for (std::size_t l = 0; l < g.layers(); ++l) {
    out.insert(out.end(), g.weights[l].data(), g.weights[l].data() + g.weights[l].size());
    out.insert(out.end(), g.biases[l].data(), g.biases[l].data() + g.biases[l].size());
  }
  return out;
}

double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a[i] - b[i]) / std::max({std::abs(a[i]), std::abs(b[i]), 1e-7}));
  return worst;
}

struct Dataset {
  Matrix X;
  std::vector<int> y;
};

// Two Gaussian-ish blobs centred at (+-2, +-2).
Dataset blobs(int n, std::uint64_t seed) {
  Rng rng(seed);
  Dataset d{Matrix(n, 2), {}};
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    const double c = label ? 2.0 : -2.0;
    d.X(i, 0) = c + rng.uniform(-1, 1);
    d.X(i, 1) = c + rng.uniform(-1, 1);
    d.y.push_back(label);
  }
  return d;
}

double train_accuracy(const MlpModel& m, const Dataset& d) {
  const Vector p = predict_proba_rows(m, d.X);
  int ok = 0;
  for (Index i = 0; i < p.size(); ++i) ok += (p(i) >= 0.5) == (d.y[static_cast<std::size_t>(i)] == 1);
  return static_cast<double>(ok) / static_cast<double>(p.size());
}

MlpHyperparams small_hp(Solver solver) {
  MlpHyperparams hp;
  hp.hidden_layer_sizes = {8};
  hp.solver = solver;
  hp.alpha = 1e-4;
  hp.max_iter = 3000;
  hp.tol = 1e-9;
  hp.seed = 4;
  return hp;
}

}  // namespace

TEST_CASE("MLP gradient matches central finite differences on a 3-4-1 net") {
  Rng rng(1);
  const auto p = random_params({3, 4, 1}, rng);
  Matrix X(6, 3);
  for (Index i = 0; i < X.size(); ++i) X.data()[i] = rng.uniform(-1, 1);
  Vector y(6);
  y << 1, 0, 0, 1, 1, 0;
  for (double alpha : {0.0, 0.01, 0.5}) {
    const auto g = mlp_gradient(p, X, y, alpha);
    CHECK(max_rel_error(flatten(g.grad), numeric_grad(p, X, y, alpha)) < 1e-4);
  }
}

TEST_CASE("MLP gradient check on random deeper nets") {
  Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const auto p = random_params({4, 5, 3, 6, 1}, rng);
    Matrix X(7, 4);
    for (Index i = 0; i < X.size(); ++i) X.data()[i] = rng.uniform(-2, 2);
    Vector y(7);
    for (Index i = 0; i < 7; ++i) y(i) = static_cast<double>(rng.below(2));
    const auto g = mlp_gradient(p, X, y, 1e-3);
    CHECK(max_rel_error(flatten(g.grad), numeric_grad(p, X, y, 1e-3)) < 1e-4);
  }
}

TEST_CASE("gradient vanishes at a perfect fit without regularization") {
  MlpParams<double> p;
  p.weights = {Matrix::Identity(2, 2), Matrix(2, 1)};
  p.weights[1] << 40, -40;
  p.biases = {Vector::Zero(2), Vector::Zero(1)};
  Matrix X(2, 2);
  X << 1, 0, 0, 1;
  Vector y(2);
  y << 1, 0;
  const auto g = mlp_gradient(p, X, y, 0.0);
  double norm = 0.0;
  for (double v : flatten(g.grad)) norm += v * v;
  CHECK(std::sqrt(norm) < 1e-8);
}

TEST_CASE("weight decay component is linear in alpha") {
  Rng rng(3);
  const auto p = random_params({3, 4, 1}, rng);
  Matrix X(5, 3);
  for (Index i = 0; i < X.size(); ++i) X.data()[i] = rng.uniform(-1, 1);
  Vector y(5);
  y << 0, 1, 1, 0, 1;
  const auto g0 = flatten(mlp_gradient(p, X, y, 0.0).grad);
  const auto g1 = flatten(mlp_gradient(p, X, y, 0.1).grad);
  const auto g2 = flatten(mlp_gradient(p, X, y, 0.2).grad);
  for (std::size_t i = 0; i < g0.size(); ++i) CHECK(g2[i] - g0[i] == doctest::Approx(2 * (g1[i] - g0[i])).epsilon(1e-9));
}

TEST_CASE("both solvers fit separable blobs") {
  const auto d = blobs(40, 7);
  for (Solver s : {Solver::Adam, Solver::SGD}) {
    const auto m = train_mlp(d.X, d.y, small_hp(s));
    CAPTURE(to_string(s));
    CHECK(train_accuracy(m, d) == 1.0);
    CHECK(m.train_loss_curve.back() < 0.1);
    CHECK(m.n_iter <= 3000);
  }
}

TEST_CASE("Adam learns XOR") {
  Matrix X(4, 2);
  X << 0, 0, 0, 1, 1, 0, 1, 1;
  Dataset d{X, {0, 1, 1, 0}};
  auto hp = small_hp(Solver::Adam);
  hp.learning_rate_init = 0.01;
  hp.alpha = 0.0;
  const auto m = train_mlp(d.X, d.y, hp);
  CHECK(train_accuracy(m, d) == 1.0);
}

TEST_CASE("duplicated full-batch data gives the same objective") {
  const auto d = blobs(20, 8);
  Dataset twice{Matrix(40, 2), {}};
  twice.X << d.X, d.X;
  twice.y = d.y;
  twice.y.insert(twice.y.end(), d.y.begin(), d.y.end());
  auto hp = small_hp(Solver::Adam);
  hp.max_iter = 50;
  const auto a = train_mlp(d.X, d.y, hp);
  const auto b = train_mlp(twice.X, twice.y, hp);
  REQUIRE(a.train_loss_curve.size() == b.train_loss_curve.size());
  for (std::size_t e = 0; e < a.train_loss_curve.size(); ++e)
    CHECK(a.train_loss_curve[e] == doctest::Approx(b.train_loss_curve[e]).epsilon(1e-9));
  CHECK((a.params.weights[0] - b.params.weights[0]).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("early stopping respects patience and max_iter") {
  const auto d = blobs(40, 9);
  auto hp = small_hp(Solver::Adam);
  hp.tol = 1e-2;
  hp.max_iter = 500;
  const auto m = train_mlp(d.X, d.y, hp);
  REQUIRE(m.n_iter < hp.max_iter);
  // each of the final n_iter_no_change epochs improved on the running best by less than tol
  const auto& c = m.train_loss_curve;
  const std::size_t window = static_cast<std::size_t>(hp.n_iter_no_change);
  REQUIRE(c.size() > window);
  for (std::size_t e = c.size() - window; e < c.size(); ++e) {
    const double best = *std::min_element(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(e));
    CHECK(c[e] > best - hp.tol);
  }

  hp.tol = 1e-12;
  hp.max_iter = 7;
  const auto capped = train_mlp(d.X, d.y, hp);
  CHECK(capped.n_iter == 7);
  CHECK(capped.train_loss_curve.size() == 7);
}

TEST_CASE("training input validation") {
  const auto d = blobs(10, 1);
  auto hp = small_hp(Solver::Adam);
  CHECK_THROWS_AS(train_mlp(d.X, std::vector<int>(10, 1), hp), ArgumentError);
  CHECK_THROWS_AS(train_mlp(d.X.topRows(1), {1}, hp), ArgumentError);
  Matrix bad = d.X;
  bad(3, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(train_mlp(bad, d.y, hp), ArgumentError);
  CHECK_THROWS_AS(train_mlp(d.X, std::vector<int>(9, 0), hp), ArgumentError);
  hp.hidden_layer_sizes = {0};
  CHECK_THROWS_AS(train_mlp(d.X, d.y, hp), ArgumentError);
}

TEST_CASE("training is deterministic for a seed") {
  const auto d = blobs(30, 2);
  auto hp = small_hp(Solver::SGD);
  hp.max_iter = 40;
  hp.batch_size = 8;
  const auto a = train_mlp(d.X, d.y, hp, "x");
  const auto b = train_mlp(d.X, d.y, hp, "x");
  CHECK(model_to_json(a).dump() == model_to_json(b).dump());
  hp.seed = 5;
  CHECK(model_to_json(train_mlp(d.X, d.y, hp, "x")).dump() != model_to_json(a).dump());
}

TEST_CASE("predict_proba range, zero model, and trace agreement") {
  MlpModel zero;
  zero.input_dim = 3;
  zero.hyperparams.hidden_layer_sizes = {4};
  zero.params.weights = {Matrix::Zero(3, 4), Matrix::Zero(4, 1)};
  zero.params.biases = {Vector::Zero(4), Vector::Zero(1)};
  zero.validate();
  CHECK(predict_proba(zero, Vector::Constant(3, 9.0)) == 0.5);

  Rng rng(6);
  MlpModel m = zero;
  m.hyperparams.hidden_layer_sizes = {5, 3};
  m.params = random_params({3, 5, 3, 1}, rng, 3.0);
  m.validate();
  for (int i = 0; i < 1000; ++i) {
    Vector x(3);
    for (Index k = 0; k < 3; ++k) x(k) = rng.uniform(-10, 10);
    const double p = predict_proba(m, x);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
    const auto t = forward_trace(m, x);
    CHECK(t.probability == p);
    CHECK(predict_proba(m, x) == p);
    REQUIRE(t.layers.size() == 3);
    for (std::size_t l = 0; l + 1 < t.layers.size(); ++l) CHECK(t.layers[l].post.minCoeff() >= 0.0);
  }
  CHECK_THROWS_AS(predict_proba(m, Vector::Zero(2)), ArgumentError);
  CHECK_THROWS_AS(forward_trace(m, Vector::Zero(4)), ArgumentError);
}

TEST_CASE("trace layer sizes") {
  MlpModel m;
  m.input_dim = 2;
  m.hyperparams.hidden_layer_sizes = {2};
  m.params.weights = {Matrix::Identity(2, 2), Matrix::Ones(2, 1)};
  m.params.biases = {Vector::Zero(2), Vector::Zero(1)};
  CHECK(m.layer_sizes() == std::vector<Index>{2, 2, 1});
  const auto t = forward_trace(m, Eigen::Vector2d(1, 0));
  CHECK(t.input.size() == 2);
  CHECK(t.layers[0].post.size() == 2);
  CHECK(t.layers[1].post.size() == 1);
  CHECK(t.layers[1].pre(0) == 1.0);
}

TEST_CASE("author choice") {
  CHECK(choose_author({{"A", 0.9}, {"B", 0.2}, {"C", 0.1}}) == "A");
  CHECK(choose_author({{"B", 0.5}, {"A", 0.5}, {"C", 0.1}}) == "A");
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::map<std::string, double> p = {{"christie", rng.uniform()}, {"doyle", rng.uniform()}, {"rinehart", rng.uniform()}};
    auto q = p;
    for (auto& [k, v] : q) v = std::exp(3.0 * v) + 1.0;
    CHECK(choose_author(p) == choose_author(q));
  }
}

TEST_CASE("predict_author over three models") {
  auto make = [](const std::string& id, double bias) {
    MlpModel m;
    m.author_id = id;
    m.input_dim = 1;
    m.hyperparams.hidden_layer_sizes = {1};
    m.params.weights = {Matrix::Zero(1, 1), Matrix::Zero(1, 1)};
    m.params.biases = {Vector::Zero(1), Vector::Constant(1, bias)};
    return m;
  };
  std::vector<MlpModel> models = {make("doyle", 1.0), make("christie", -1.0), make("rinehart", 0.0)};
  std::vector<Vector> xs(3, Vector::Zero(1));
  const auto r = predict_author(models, xs);
  CHECK(r.author_id == "doyle");
  CHECK(r.probabilities.size() == 3);
  CHECK(r.probabilities.at("rinehart") == 0.5);
  models[1].author_id = "doyle";
  CHECK_THROWS_AS(predict_author(models, xs), ArgumentError);
}

TEST_CASE("base64 float64 encoding") {
  const std::vector<double> one = {1.0};
  CHECK(encode_f64(one) == "AAAAAAAA8D8=");
  const std::vector<double> vals = {0.0, -0.0, 1e-310, -2.5, std::numeric_limits<double>::infinity(), 3.141592653589793};
  const auto back = decode_f64(encode_f64(vals));
  REQUIRE(back.size() == vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i) CHECK(std::bit_cast<std::uint64_t>(back[i]) == std::bit_cast<std::uint64_t>(vals[i]));
  CHECK(encode_f64(std::vector<double>{}).empty());
  CHECK_THROWS_AS(decode_f64("AAA"), ArgumentError);
  CHECK_THROWS_AS(decode_f64("AAAAAAAA8D8!"), ArgumentError);
  CHECK_THROWS_AS(decode_f64("AAAA"), ArgumentError);
}

TEST_CASE("model JSON round trip and shape validation") {
  const auto d = blobs(30, 3);
  auto hp = small_hp(Solver::Adam);
  hp.hidden_layer_sizes = {5, 3};
  hp.max_iter = 30;
  hp.standardize = true;
  const auto m = train_mlp(d.X, d.y, hp, "christie");
  const auto j = model_to_json(m);
  const auto back = model_from_json(j);
  CHECK(back.author_id == "christie");
  CHECK(back.hyperparams == m.hyperparams);
  CHECK(back.train_loss_curve == m.train_loss_curve);
  for (Index i = 0; i < d.X.rows(); ++i)
    CHECK(predict_proba(back, Vector(d.X.row(i).transpose())) == predict_proba(m, Vector(d.X.row(i).transpose())));
  CHECK(model_to_json(back).dump() == j.dump());

  auto broken = j;
  broken["layers"][1]["weights"]["shape"] = {4, 3};
  CHECK_THROWS_AS(model_from_json(broken), ArgumentError);
  broken = j;
  broken["input_dim"] = 3;
  CHECK_THROWS_AS(model_from_json(broken), ArgumentError);
  broken = j;
  broken["layers"].erase(2);
  CHECK_THROWS_AS(model_from_json(broken), ArgumentError);
  broken = j;
  broken["layers"][0]["bias"]["data"] = encode_f64(std::vector<double>{1.0});
  CHECK_THROWS_AS(model_from_json(broken), ArgumentError);

  const auto path = std::filesystem::temp_directory_path() / "authorship_test_model.json";
  save_model(m, path);
  CHECK(model_to_json(load_model(path)).dump() == j.dump());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_model(path), IoError);
}

TEST_CASE("hyperparameter JSON round trip") {
  MlpHyperparams hp;
  hp.hidden_layer_sizes = {50, 50, 50};
  hp.solver = Solver::SGD;
  hp.alpha = 1e-4;
  hp.max_iter = 2000;
  hp.tol = 1e-9;
  CHECK(MlpHyperparams::from_json(hp.to_json()) == hp);
  auto j = hp.to_json();
  j["solver"] = "lbfgs";
  CHECK_THROWS_AS(MlpHyperparams::from_json(j), ArgumentError);
  j = hp.to_json();
  j["tol"] = 0.0;
  CHECK_THROWS_AS(MlpHyperparams::from_json(j), ArgumentError);
}
