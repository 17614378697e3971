#include "rnnlab/head.hpp"

#include <algorithm>
#include <cmath>

#include "rnnlab/errors.hpp"

namespace rnnlab {
namespace {

void check_classes(std::size_t classes, std::size_t inputs) {
  if (classes < 2) {
    throw ShapeError("dense head needs at least 2 classes, got " + std::to_string(classes));
  }
  if (inputs == 0) {
    throw ShapeError("dense head needs a nonzero input size");
  }
}

// Log-sum-exp shifted by the row maximum.
double log_softmax_into(std::span<const double> z, std::span<double> probs) {
  const double shift = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (std::size_t j = 0; j < z.size(); ++j) {
    probs[j] = std::exp(z[j] - shift);
    sum += probs[j];
  }
  for (double& p : probs) {
    p /= sum;
  }
  return shift + std::log(sum);
}

}  // namespace

DenseParams zero_dense_params(std::size_t classes, std::size_t inputs) {
  check_classes(classes, inputs);
  DenseParams p;
  p.arrays.add("W_out", SlotKind::weight, Matrix(classes, inputs));
  p.arrays.add("b_out", SlotKind::bias, Matrix(classes, 1));
  return p;
}

DenseParams init_dense_params(std::size_t classes, std::size_t inputs, std::mt19937_64& rng) {
  DenseParams p = zero_dense_params(classes, inputs);
  p.arrays.value(0) = glorot_init(classes, inputs, rng);
  return p;
}

DenseParams dense_from_arrays(ParamSet arrays) {
  if (arrays.size() != 2 || arrays.value(1).rows() != arrays.value(0).rows() ||
      arrays.value(1).cols() != 1) {
    throw ShapeError("dense head expects W_out [k x n] and b_out [k x 1]");
  }
  check_classes(arrays.value(0).rows(), arrays.value(0).cols());
  return DenseParams{std::move(arrays)};
}

Vector dense_forward(const DenseParams& p, const Vector& h) {
  if (h.size() != p.inputs()) {
    throw ShapeError("dense_forward: h has length " + std::to_string(h.size()) + ", W_out is " +
                     p.weight().shape_str());
  }
  Vector out = matvec(p.weight(), h);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] += p.bias()(i, 0);
  }
  return out;
}

Matrix dense_forward(const DenseParams& p, const Matrix& h) {
  if (h.cols() != p.inputs()) {
    throw ShapeError("dense_forward: h is " + h.shape_str() + ", W_out is " +
                     p.weight().shape_str());
  }
  Matrix logits(h.rows(), p.classes());
  broadcast_rows(p.bias().flat(), logits);
  gemm_nt_acc(h, p.weight(), logits);
  return logits;
}

XentResult softmax_xent(const Vector& logits, std::size_t label) {
  if (label >= logits.size()) {
    throw std::out_of_range("softmax_xent: label " + std::to_string(label) + " outside [0, " +
                            std::to_string(logits.size()) + ")");
  }
  XentResult r{0.0, Vector(logits.size())};
  const double lse = log_softmax_into(logits.span(), r.d_logits.span());
  r.loss = lse - logits[label];
  r.d_logits[label] -= 1.0;
  return r;
}

BatchXent softmax_xent(const Matrix& logits, std::span<const int> labels) {
  if (labels.size() != logits.rows()) {
    throw ShapeError("softmax_xent: " + std::to_string(labels.size()) + " labels for logits " +
                     logits.shape_str());
  }
  BatchXent r{0.0, Matrix(logits.rows(), logits.cols())};
  const double scale = 1.0 / static_cast<double>(logits.rows());
  for (std::size_t b = 0; b < logits.rows(); ++b) {
    const int label = labels[b];
    if (label < 0 || static_cast<std::size_t>(label) >= logits.cols()) {
      throw std::out_of_range("softmax_xent: label " + std::to_string(label) + " outside [0, " +
                              std::to_string(logits.cols()) + ")");
    }
    auto grad = r.d_logits.row(b);
    const double lse = log_softmax_into(logits.row(b), grad);
    r.loss += lse - logits(b, static_cast<std::size_t>(label));
    grad[static_cast<std::size_t>(label)] -= 1.0;
    for (double& g : grad) {
      g *= scale;
    }
  }
  r.loss *= scale;
  return r;
}

DenseBackward dense_backward(const DenseParams& p, const Matrix& h, const Matrix& d_logits) {
  if (d_logits.rows() != h.rows() || d_logits.cols() != p.classes()) {
    throw ShapeError("dense_backward: d_logits is " + d_logits.shape_str());
  }
  DenseBackward r{p.arrays.zeros_like(), Matrix(h.rows(), h.cols())};
  gemm_tn_acc(d_logits, h, r.grads.value(0));
  add_column_sums(d_logits, r.grads.value(1).flat());
  gemm_nn_acc(d_logits, p.weight(), r.d_h);
  return r;
}

std::vector<int> argmax_rows(const Matrix& logits) {
  std::vector<int> out(logits.rows());
  for (std::size_t b = 0; b < logits.rows(); ++b) {
    const auto row = logits.row(b);
    out[b] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
  }
  return out;
}

}  // namespace rnnlab
