#pragma once

#include <vector>

#include "authorship/common.hpp"
#include "authorship/math.hpp"

namespace authorship::classifier {

/// Layer l maps rows of width weights[l].rows() to width weights[l].cols().
/// Hidden layers are ReLU, the single output unit is sigmoid.
template <typename Scalar>
struct MlpParams {
  std::vector<MatrixX<Scalar>> weights;
  std::vector<VectorX<Scalar>> biases;

  std::size_t layers() const { return weights.size(); }
};

template <typename Scalar>
struct MlpGradient {
  Scalar loss = Scalar(0);
  MlpParams<Scalar> grad;
};

/// Output logits for each row of X, plus the per-layer activations when
/// `acts` is given (acts[0] = X, acts[l+1] = post-activation of layer l).
template <typename Scalar, typename Derived>
VectorX<Scalar> mlp_logits(const MlpParams<Scalar>& p, const Eigen::MatrixBase<Derived>& X,
                           std::vector<MatrixX<Scalar>>* acts = nullptr) {
  MatrixX<Scalar> a = X;
  if (acts) {
    acts->clear();
    acts->push_back(a);
  }
  for (std::size_t l = 0; l < p.layers(); ++l) {
    MatrixX<Scalar> z = a * p.weights[l];
    z.rowwise() += p.biases[l].transpose();
    if (l + 1 < p.layers()) z = z.cwiseMax(Scalar(0));
    a = std::move(z);
    if (acts) acts->push_back(a);
  }
  return a.col(0);
}

/// Mean binary cross-entropy over the rows of X plus (alpha/2) * sum |W|^2,
/// with exact gradients. Biases are not penalized.
template <typename Scalar, typename DerivedX, typename DerivedY>
MlpGradient<Scalar> mlp_gradient(const MlpParams<Scalar>& p, const Eigen::MatrixBase<DerivedX>& X,
                                 const Eigen::MatrixBase<DerivedY>& y, Scalar alpha) {
  const Index n = X.rows();
  if (n == 0) throw ArgumentError("mlp_gradient needs a non-empty batch");
  if (y.size() != n) throw ArgumentError("label count differs from batch size");
  std::vector<MatrixX<Scalar>> acts;
  const VectorX<Scalar> z = mlp_logits(p, X, &acts);
  MlpGradient<Scalar> g;
  VectorX<Scalar> delta(n);
  for (Index i = 0; i < n; ++i) {
    const Scalar t = y(i);
    g.loss -= t * log_sigmoid(z(i)) + (Scalar(1) - t) * log_sigmoid(-z(i));
    delta(i) = (sigmoid(z(i)) - t) / Scalar(n);
  }
  g.loss /= Scalar(n);
  Scalar penalty(0);
  for (const auto& w : p.weights) penalty += w.squaredNorm();
  g.loss += alpha / Scalar(2) * penalty;

  const std::size_t L = p.layers();
  g.grad.weights.resize(L);
  g.grad.biases.resize(L);
  MatrixX<Scalar> d = delta;  // n x width of current layer
  for (std::size_t l = L; l-- > 0;) {
    g.grad.weights[l] = acts[l].transpose() * d + alpha * p.weights[l];
    g.grad.biases[l] = d.colwise().sum().transpose();
    if (l == 0) break;
    MatrixX<Scalar> back = d * p.weights[l].transpose();
    d = back.cwiseProduct((acts[l].array() > Scalar(0)).template cast<Scalar>().matrix());
  }
  return g;
}

}  // namespace authorship::classifier
