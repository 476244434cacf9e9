#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "authorship/common.hpp"
#include "authorship/math.hpp"

namespace authorship::embedding {

/// One CBOW prediction: context rows of the input matrix predict `center`
/// against `negatives` rows of the output matrix.
struct CbowExample {
  std::vector<Index> context;
  Index center = 0;
  std::vector<Index> negatives;
};

template <typename Scalar>
struct CbowGradient {
  Scalar loss = Scalar(0);
  RowMatrixX<Scalar> input;   // d loss / d input vectors
  RowMatrixX<Scalar> output;  // d loss / d output vectors
};

/// Summed negative-sampling loss and its exact gradients over a batch:
///   h = mean of context input vectors (0 when the context is empty)
///   loss = -log s(o_center . h) - sum_n log s(-o_n . h)
template <typename DerivedIn, typename DerivedOut>
CbowGradient<typename DerivedIn::Scalar> cbow_step_gradient(std::span<const CbowExample> batch,
                                                           const Eigen::MatrixBase<DerivedIn>& input,
                                                           const Eigen::MatrixBase<DerivedOut>& output) {
  using Scalar = typename DerivedIn::Scalar;
  if (input.cols() != output.cols() || input.rows() != output.rows())
    throw ArgumentError("input and output matrices differ in shape");
  const Index dim = input.cols();
  CbowGradient<Scalar> g;
  g.input = RowMatrixX<Scalar>::Zero(input.rows(), dim);
  g.output = RowMatrixX<Scalar>::Zero(output.rows(), dim);
  VectorX<Scalar> h(dim), dh(dim);
  for (const auto& ex : batch) {
    h.setZero();
    for (Index c : ex.context) h += input.row(c).transpose();
    if (!ex.context.empty()) h /= Scalar(ex.context.size());
    dh.setZero();
    auto score = [&](Index row, Scalar label) {
      const Scalar z = output.row(row).dot(h.transpose());
      g.loss -= log_sigmoid(label > Scalar(0) ? z : -z);
      // d/dz of -log s(+-z) is s(z) - label
      const Scalar e = sigmoid(z) - label;
      dh += e * output.row(row).transpose();
      g.output.row(row) += e * h.transpose();
    };
    score(ex.center, Scalar(1));
    for (Index n : ex.negatives) score(n, Scalar(0));
    if (!ex.context.empty()) {
      const Scalar share = Scalar(1) / Scalar(ex.context.size());
      for (Index c : ex.context) g.input.row(c) += share * dh.transpose();
    }
  }
  return g;
}

}  // namespace authorship::embedding
