#include "cell_impl.hpp"

namespace rnnlab::detail {
namespace {

enum Slot : std::size_t { W_fx, U_fh, W_fc, b_f, W_gx, U_gh, b_g };
enum Act : std::size_t { kInp, kF, kG, kCNew, kTanhC };

}  // namespace

StepResult litelstm_step(const CellParams& p, const Matrix& x, const CellState& s) {
  const auto& w = p.arrays;
  Matrix inp = pre_activation(w.value(b_f), {{&x, &w.value(W_fx)},
                                             {&s.h, &w.value(U_fh)},
                                             {&s.c, &w.value(W_fc)}});
  Matrix f = apply_gate(p.shape.gate, inp);
  Matrix g = tanh_of(pre_activation(w.value(b_g), {{&x, &w.value(W_gx)}, {&s.h, &w.value(U_gh)}}));

  // The one gate scales the carried memory and the candidate alike.
  Matrix c_new(x.rows(), p.shape.hidden);
  {
    auto fs = f.flat();
    auto cs = s.c.flat();
    auto gs = g.flat();
    auto out = c_new.flat();
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = fs[i] * cs[i] + fs[i] * gs[i];
    }
  }
  Matrix tanh_c = tanh_of(c_new);
  Matrix h = mul(f, tanh_c);

  StepResult r;
  r.state.h = std::move(h);
  r.state.c = c_new;
  r.cache.arch = Arch::litelstm;
  r.cache.x = x;
  r.cache.h_prev = s.h;
  r.cache.c_prev = s.c;
  r.cache.acts.reserve(5);
  r.cache.acts.push_back(std::move(inp));
  r.cache.acts.push_back(std::move(f));
  r.cache.acts.push_back(std::move(g));
  r.cache.acts.push_back(std::move(c_new));
  r.cache.acts.push_back(std::move(tanh_c));
  return r;
}

void litelstm_backward(const CellParams& p, const StepCache& cache, const Matrix& d_h,
                       const Matrix& d_c, ParamSet& grads, Matrix& d_x, Matrix& d_h_prev,
                       Matrix& d_c_prev) {
  const auto& w = p.arrays;
  const Matrix& f = cache.acts[kF];
  const Matrix& g = cache.acts[kG];
  const Matrix& tanh_c = cache.acts[kTanhC];
  const Matrix& c_prev = cache.c_prev;

  // f reaches the loss through h = f⊙tanh(c) and through both terms of c.
  Matrix d_f(f.rows(), f.cols());
  Matrix d_g(f.rows(), f.cols());
  {
    auto fs = f.flat();
    auto gs = g.flat();
    auto ts = tanh_c.flat();
    auto cp = c_prev.flat();
    auto dh = d_h.flat();
    auto df = d_f.flat();
    auto dg = d_g.flat();
    auto dcp = d_c_prev.flat();
    const bool has_dc = !d_c.empty();
    for (std::size_t i = 0; i < df.size(); ++i) {
      double dc = dh[i] * fs[i] * (1.0 - ts[i] * ts[i]);
      if (has_dc) dc += d_c.flat()[i];
      df[i] = dh[i] * ts[i] + dc * (cp[i] + gs[i]);
      dg[i] = dc * fs[i];
      dcp[i] = dc * fs[i];
    }
  }
  const Matrix d_inp = gate_backward(p.shape.gate, cache.acts[kInp], f, d_f);
  const Matrix d_zg = tanh_backward(g, d_g);

  weight_grad(d_inp, cache.x, grads.value(W_fx));
  weight_grad(d_inp, cache.h_prev, grads.value(U_fh));
  weight_grad(d_inp, c_prev, grads.value(W_fc));
  bias_grad(d_inp, grads.value(b_f));
  weight_grad(d_zg, cache.x, grads.value(W_gx));
  weight_grad(d_zg, cache.h_prev, grads.value(U_gh));
  bias_grad(d_zg, grads.value(b_g));

  input_grad(d_inp, w.value(W_fx), d_x);
  input_grad(d_zg, w.value(W_gx), d_x);
  input_grad(d_inp, w.value(U_fh), d_h_prev);
  input_grad(d_zg, w.value(U_gh), d_h_prev);
  // Second path from c_prev: the peephole into the gate.
  input_grad(d_inp, w.value(W_fc), d_c_prev);
}

}  // namespace rnnlab::detail
