#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cell_impl.hpp"
#include "rnnlab/errors.hpp"

namespace rnnlab {
namespace detail {

Matrix pre_activation(const Matrix& bias,
                      std::initializer_list<std::pair<const Matrix*, const Matrix*>> terms) {
  const Matrix& first = *terms.begin()->first;
  Matrix z(first.rows(), bias.rows());
  broadcast_rows(bias.flat(), z);
  for (const auto& [input, w] : terms) {
    gemm_nt_acc(*input, *w, z);
  }
  return z;
}

Matrix apply_gate(GateFn gate, const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  auto src = z.flat();
  auto dst = out.flat();
  if (gate == GateFn::logistic) {
    std::transform(src.begin(), src.end(), dst.begin(), sigmoid_scalar);
  } else {
    std::transform(src.begin(), src.end(), dst.begin(), hard_sigmoid_scalar);
  }
  return out;
}

Matrix gate_backward(GateFn gate, const Matrix& z, const Matrix& out, const Matrix& d_out) {
  Matrix dz(z.rows(), z.cols());
  auto zs = z.flat();
  auto ys = out.flat();
  auto ds = d_out.flat();
  auto res = dz.flat();
  if (gate == GateFn::logistic) {
    for (std::size_t i = 0; i < res.size(); ++i) {
      res[i] = ds[i] * ys[i] * (1.0 - ys[i]);
    }
  } else {
    for (std::size_t i = 0; i < res.size(); ++i) {
      res[i] = std::abs(zs[i]) <= kHardSigmoidKnee ? 0.2 * ds[i] : 0.0;
    }
  }
  return dz;
}

Matrix tanh_of(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  std::transform(z.flat().begin(), z.flat().end(), out.flat().begin(),
                 [](double v) { return std::tanh(v); });
  return out;
}

Matrix tanh_backward(const Matrix& y, const Matrix& d_y) {
  Matrix dz(y.rows(), y.cols());
  auto ys = y.flat();
  auto ds = d_y.flat();
  auto res = dz.flat();
  for (std::size_t i = 0; i < res.size(); ++i) {
    res[i] = ds[i] * (1.0 - ys[i] * ys[i]);
  }
  return dz;
}

Matrix mul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), a.cols());
  auto as = a.flat();
  auto bs = b.flat();
  auto res = out.flat();
  for (std::size_t i = 0; i < res.size(); ++i) {
    res[i] = as[i] * bs[i];
  }
  return out;
}

void weight_grad(const Matrix& d_z, const Matrix& input, Matrix& d_w) {
  gemm_tn_acc(d_z, input, d_w);
}

void input_grad(const Matrix& d_z, const Matrix& w, Matrix& d_input) {
  gemm_nn_acc(d_z, w, d_input);
}

void bias_grad(const Matrix& d_z, Matrix& d_b) { add_column_sums(d_z, d_b.flat()); }

void check_step_inputs(const CellParams& params, const Matrix& x, const CellState& state) {
  const auto& shape = params.shape;
  if (x.cols() != shape.input) {
    throw ShapeError(std::string(to_string(shape.arch)) + " step: x is " + x.shape_str() +
                     " but the cell expects input size " + std::to_string(shape.input));
  }
  if (state.h.rows() != x.rows() || state.h.cols() != shape.hidden) {
    throw ShapeError(std::string(to_string(shape.arch)) + " step: h_prev is " +
                     state.h.shape_str() + ", expected [" + std::to_string(x.rows()) + "x" +
                     std::to_string(shape.hidden) + "]");
  }
  if (has_memory_cell(shape.arch)) {
    if (!state.c.same_shape(state.h)) {
      throw ShapeError(std::string(to_string(shape.arch)) + " step: c_prev is " +
                       state.c.shape_str() + ", expected " + state.h.shape_str());
    }
  } else if (!state.c.empty()) {
    throw ShapeError(std::string(to_string(shape.arch)) +
                     " step: this architecture has no memory cell but c_prev was given");
  }
}

void check_backward_inputs(const CellParams& params, const StepCache& cache, const Matrix& d_h,
                           const Matrix& d_c) {
  const auto name = std::string(to_string(params.shape.arch));
  if (cache.arch != params.shape.arch) {
    throw ShapeError(name + " backward: cache was produced by " +
                     std::string(to_string(cache.arch)));
  }
  if (!d_h.same_shape(cache.h_prev)) {
    throw ShapeError(name + " backward: d_h is " + d_h.shape_str() + ", expected " +
                     cache.h_prev.shape_str());
  }
  if (!d_c.empty()) {
    if (!has_memory_cell(params.shape.arch)) {
      throw ShapeError(name + " backward: d_c given for an architecture without memory cell");
    }
    if (!d_c.same_shape(cache.h_prev)) {
      throw ShapeError(name + " backward: d_c is " + d_c.shape_str() + ", expected " +
                       cache.h_prev.shape_str());
    }
  }
}

}  // namespace detail

// ---- cache -------------------------------------------------------------------

std::vector<std::string> cache_names(Arch arch) {
  switch (arch) {
    case Arch::rnn: return {"a"};
    case Arch::gru: return {"z_in", "z", "r_in", "r", "rh", "hh"};
    case Arch::lstm:
    case Arch::plstm:
      return {"i_in", "i", "f_in", "f", "g", "o_in", "o", "c_new", "tanh_c"};
    case Arch::litelstm: return {"inp", "f", "g", "c_new", "tanh_c"};
  }
  return {};
}

const Matrix& StepCache::act(std::string_view name) const {
  const auto names = cache_names(arch);
  for (std::size_t i = 0; i < names.size() && i < acts.size(); ++i) {
    if (names[i] == name) {
      return acts[i];
    }
  }
  throw std::out_of_range("step cache of " + std::string(to_string(arch)) +
                          " has no activation '" + std::string(name) + "'");
}

// ---- dispatch ------------------------------------------------------------------

StepResult step(const CellParams& params, const Matrix& x, const CellState& state) {
  detail::check_step_inputs(params, x, state);
  switch (params.shape.arch) {
    case Arch::rnn: return detail::rnn_step(params, x, state);
    case Arch::gru: return detail::gru_step(params, x, state);
    case Arch::lstm:
    case Arch::plstm: return detail::lstm_step(params, x, state);
    case Arch::litelstm: return detail::litelstm_step(params, x, state);
  }
  throw std::logic_error("unreachable architecture");
}

StepResult step(const CellParams& params, const Vector& x, const CellState& state) {
  return step(params, Matrix::row_vector(x), state);
}

void backward_step_into(const CellParams& params, const StepCache& cache, const Matrix& d_h,
                        const Matrix& d_c, ParamSet& grads, Matrix& d_x, Matrix& d_h_prev,
                        Matrix& d_c_prev) {
  detail::check_backward_inputs(params, cache, d_h, d_c);
  if (!grads.same_layout(params.arrays)) {
    throw ShapeError("backward: gradient accumulator does not mirror the parameters");
  }
  const std::size_t batch = cache.x.rows();
  const std::size_t n = params.shape.hidden;
  d_x = Matrix(batch, params.shape.input);
  d_h_prev = Matrix(batch, n);
  d_c_prev = has_memory_cell(params.shape.arch) ? Matrix(batch, n) : Matrix();
  switch (params.shape.arch) {
    case Arch::rnn:
      detail::rnn_backward(params, cache, d_h, grads, d_x, d_h_prev);
      return;
    case Arch::gru:
      detail::gru_backward(params, cache, d_h, grads, d_x, d_h_prev);
      return;
    case Arch::lstm:
    case Arch::plstm:
      detail::lstm_backward(params, cache, d_h, d_c, grads, d_x, d_h_prev, d_c_prev);
      return;
    case Arch::litelstm:
      detail::litelstm_backward(params, cache, d_h, d_c, grads, d_x, d_h_prev, d_c_prev);
      return;
  }
}

StepGradients backward_step(const CellParams& params, const StepCache& cache, const Matrix& d_h,
                            const Matrix& d_c) {
  StepGradients out{params.arrays.zeros_like(), {}, {}, {}};
  backward_step_into(params, cache, d_h, d_c, out.params, out.d_x, out.d_h_prev, out.d_c_prev);
  return out;
}

// ---- sequences -------------------------------------------------------------------

SequenceForward forward_sequence(const CellParams& params, std::span<const Matrix> seq,
                                 const CellState& s0) {
  if (seq.empty()) {
    throw ShapeError("forward_sequence: empty input sequence");
  }
  SequenceForward out;
  out.states.reserve(seq.size());
  out.caches.reserve(seq.size());
  const CellState* prev = &s0;
  for (const Matrix& x : seq) {
    StepResult r = step(params, x, *prev);
    out.states.push_back(std::move(r.state));
    out.caches.push_back(std::move(r.cache));
    prev = &out.states.back();
  }
  return out;
}

CellState run_sequence(const CellParams& params, std::span<const Matrix> seq, CellState s0) {
  if (seq.empty()) {
    throw ShapeError("run_sequence: empty input sequence");
  }
  for (const Matrix& x : seq) {
    s0 = step(params, x, s0).state;
  }
  return s0;
}

SequenceGradients backward_sequence(const CellParams& params, std::span<const StepCache> caches,
                                    std::span<const Matrix> d_h, const Matrix& d_c_last,
                                    std::size_t truncate) {
  if (caches.size() != d_h.size()) {
    throw ShapeError("backward_sequence: " + std::to_string(caches.size()) + " caches but " +
                     std::to_string(d_h.size()) + " upstream gradients");
  }
  if (caches.empty()) {
    throw ShapeError("backward_sequence: empty sequence");
  }
  const std::size_t steps = caches.size();
  const std::size_t batch = caches.front().x.rows();
  const std::size_t n = params.shape.hidden;
  const bool memory = has_memory_cell(params.shape.arch);

  SequenceGradients out;
  out.params = params.arrays.zeros_like();
  out.d_x.resize(steps);
  for (auto& dx : out.d_x) {
    dx = Matrix(batch, params.shape.input);
  }

  // Gradients flowing into h_t and c_t from step t+1.
  Matrix carry_h(batch, n);
  Matrix carry_c = memory ? Matrix(batch, n) : Matrix();
  if (memory && !d_c_last.empty()) {
    if (!d_c_last.same_shape(carry_c)) {
      throw ShapeError("backward_sequence: d_c_last is " + d_c_last.shape_str() +
                       ", expected " + carry_c.shape_str());
    }
    carry_c = d_c_last;
  } else if (!memory && !d_c_last.empty()) {
    throw ShapeError("backward_sequence: d_c_last given for an architecture without memory cell");
  }

  const std::size_t stop = (truncate > 0 && truncate < steps) ? steps - truncate : 0;
  Matrix d_h_prev, d_c_prev;
  for (std::size_t t = steps; t-- > stop;) {
    Matrix total_h = carry_h;
    if (!d_h[t].empty()) {
      if (!d_h[t].same_shape(total_h)) {
        throw ShapeError("backward_sequence: d_h[" + std::to_string(t) + "] is " +
                         d_h[t].shape_str() + ", expected " + total_h.shape_str());
      }
      auto acc = total_h.flat();
      auto src = d_h[t].flat();
      for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] += src[i];
      }
    }
    backward_step_into(params, caches[t], total_h, carry_c, out.params, out.d_x[t], d_h_prev,
                       d_c_prev);
    carry_h = std::move(d_h_prev);
    carry_c = std::move(d_c_prev);
  }
  out.d_h0 = std::move(carry_h);
  out.d_c0 = std::move(carry_c);
  if (stop > 0) {
    // The sweep ended early; nothing reached the initial state.
    out.d_h0.fill(0.0);
    out.d_c0.fill(0.0);
  }
  return out;
}

}  // namespace rnnlab
