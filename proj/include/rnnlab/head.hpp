#pragma once

// Dense classification head on the final hidden state, and softmax
// cross-entropy. Batch losses are averaged over rows.

#include <cstddef>
#include <random>
#include <span>

#include "rnnlab/cells.hpp"
#include "rnnlab/linalg.hpp"

namespace rnnlab {

// Slots: W_out [k x n], b_out [k x 1].
struct DenseParams {
  ParamSet arrays;

  std::size_t classes() const { return arrays.value(0).rows(); }
  std::size_t inputs() const { return arrays.value(0).cols(); }
  const Matrix& weight() const { return arrays.value(0); }
  const Matrix& bias() const { return arrays.value(1); }
};

DenseParams zero_dense_params(std::size_t classes, std::size_t inputs);
DenseParams init_dense_params(std::size_t classes, std::size_t inputs, std::mt19937_64& rng);
// Wraps existing arrays (e.g. loaded from a weights file); validates shapes.
DenseParams dense_from_arrays(ParamSet arrays);

Vector dense_forward(const DenseParams& p, const Vector& h);
// h is [batch x n]; returns logits [batch x k].
Matrix dense_forward(const DenseParams& p, const Matrix& h);

struct XentResult {
  double loss;
  Vector d_logits;
};

XentResult softmax_xent(const Vector& logits, std::size_t label);

struct BatchXent {
  double loss;       // mean over the batch
  Matrix d_logits;   // gradient of the mean loss
};

BatchXent softmax_xent(const Matrix& logits, std::span<const int> labels);

struct DenseBackward {
  ParamSet grads;  // mirrors DenseParams::arrays
  Matrix d_h;      // [batch x n]
};

DenseBackward dense_backward(const DenseParams& p, const Matrix& h, const Matrix& d_logits);

// Row-wise argmax; ties resolve to the lowest index.
std::vector<int> argmax_rows(const Matrix& logits);

}  // namespace rnnlab
