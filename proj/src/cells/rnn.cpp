#include "cell_impl.hpp"

namespace rnnlab::detail {
namespace {
enum Slot : std::size_t { W_x, U_h, b };
}

// h = tanh(W_x·x + U_h·h_prev + b)
StepResult rnn_step(const CellParams& p, const Matrix& x, const CellState& s) {
  const auto& w = p.arrays;
  Matrix a = tanh_of(pre_activation(w.value(b), {{&x, &w.value(W_x)}, {&s.h, &w.value(U_h)}}));
  StepResult r;
  r.state.h = a;
  r.cache.arch = Arch::rnn;
  r.cache.x = x;
  r.cache.h_prev = s.h;
  r.cache.acts.push_back(std::move(a));
  return r;
}

void rnn_backward(const CellParams& p, const StepCache& cache, const Matrix& d_h,
                  ParamSet& grads, Matrix& d_x, Matrix& d_h_prev) {
  const auto& w = p.arrays;
  const Matrix d_z = tanh_backward(cache.acts[0], d_h);
  weight_grad(d_z, cache.x, grads.value(W_x));
  weight_grad(d_z, cache.h_prev, grads.value(U_h));
  bias_grad(d_z, grads.value(b));
  input_grad(d_z, w.value(W_x), d_x);
  input_grad(d_z, w.value(U_h), d_h_prev);
}

}  // namespace rnnlab::detail
