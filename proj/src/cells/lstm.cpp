#include "cell_impl.hpp"

namespace rnnlab::detail {
namespace {

enum Slot : std::size_t {
  W_i, U_i, b_i, W_f, U_f, b_f, W_g, U_g, b_g, W_o, U_o, b_o,
  P_i, P_f, P_o  // plstm only
};
enum Act : std::size_t { kIIn, kI, kFIn, kF, kG, kOIn, kO, kCNew, kTanhC };

Matrix gate_input(const ParamSet& w, const Matrix& x, const Matrix& h, const Matrix* peek,
                  std::size_t wx, std::size_t uh, std::size_t bias, std::size_t pc) {
  if (peek == nullptr) {
    return pre_activation(w.value(bias), {{&x, &w.value(wx)}, {&h, &w.value(uh)}});
  }
  return pre_activation(w.value(bias),
                        {{&x, &w.value(wx)}, {&h, &w.value(uh)}, {peek, &w.value(pc)}});
}

}  // namespace

// i = G(W_i·x + U_i·h_prev [+ P_i·c_prev] + b_i)
// f = G(W_f·x + U_f·h_prev [+ P_f·c_prev] + b_f)
// g = tanh(W_g·x + U_g·h_prev + b_g)
// c = f⊙c_prev + i⊙g
// o = G(W_o·x + U_o·h_prev [+ P_o·c] + b_o)
// h = o⊙tanh(c)
// Bracketed peephole terms are present for plstm only.
StepResult lstm_step(const CellParams& p, const Matrix& x, const CellState& s) {
  const auto& w = p.arrays;
  const bool peep = p.shape.arch == Arch::plstm;
  const GateFn gate = p.shape.gate;

  Matrix i_in = gate_input(w, x, s.h, peep ? &s.c : nullptr, W_i, U_i, b_i, P_i);
  Matrix i = apply_gate(gate, i_in);
  Matrix f_in = gate_input(w, x, s.h, peep ? &s.c : nullptr, W_f, U_f, b_f, P_f);
  Matrix f = apply_gate(gate, f_in);
  Matrix g = tanh_of(pre_activation(w.value(b_g), {{&x, &w.value(W_g)}, {&s.h, &w.value(U_g)}}));

  Matrix c_new(x.rows(), p.shape.hidden);
  {
    auto is = i.flat();
    auto fs = f.flat();
    auto gs = g.flat();
    auto cs = s.c.flat();
    auto out = c_new.flat();
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = fs[k] * cs[k] + is[k] * gs[k];
    }
  }
  Matrix o_in = gate_input(w, x, s.h, peep ? &c_new : nullptr, W_o, U_o, b_o, P_o);
  Matrix o = apply_gate(gate, o_in);
  Matrix tanh_c = tanh_of(c_new);

  StepResult r;
  r.state.h = mul(o, tanh_c);
  r.state.c = c_new;
  r.cache.arch = p.shape.arch;
  r.cache.x = x;
  r.cache.h_prev = s.h;
  r.cache.c_prev = s.c;
  r.cache.acts.reserve(9);
  r.cache.acts.push_back(std::move(i_in));
  r.cache.acts.push_back(std::move(i));
  r.cache.acts.push_back(std::move(f_in));
  r.cache.acts.push_back(std::move(f));
  r.cache.acts.push_back(std::move(g));
  r.cache.acts.push_back(std::move(o_in));
  r.cache.acts.push_back(std::move(o));
  r.cache.acts.push_back(std::move(c_new));
  r.cache.acts.push_back(std::move(tanh_c));
  return r;
}

void lstm_backward(const CellParams& p, const StepCache& cache, const Matrix& d_h,
                   const Matrix& d_c, ParamSet& grads, Matrix& d_x, Matrix& d_h_prev,
                   Matrix& d_c_prev) {
  const auto& w = p.arrays;
  const bool peep = p.shape.arch == Arch::plstm;
  const GateFn gate = p.shape.gate;
  const Matrix& i = cache.acts[kI];
  const Matrix& f = cache.acts[kF];
  const Matrix& g = cache.acts[kG];
  const Matrix& o = cache.acts[kO];
  const Matrix& c_new = cache.acts[kCNew];
  const Matrix& tanh_c = cache.acts[kTanhC];
  const Matrix& c_prev = cache.c_prev;

  const Matrix d_o = mul(d_h, tanh_c);
  const Matrix d_o_in = gate_backward(gate, cache.acts[kOIn], o, d_o);

  Matrix d_c_total(o.rows(), o.cols());
  {
    auto dh = d_h.flat();
    auto os = o.flat();
    auto ts = tanh_c.flat();
    auto out = d_c_total.flat();
    const bool has_dc = !d_c.empty();
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = dh[k] * os[k] * (1.0 - ts[k] * ts[k]);
      if (has_dc) out[k] += d_c.flat()[k];
    }
  }
  if (peep) {
    // The output gate reads the fresh cell.
    input_grad(d_o_in, w.value(P_o), d_c_total);
    weight_grad(d_o_in, c_new, grads.value(P_o));
  }

  const Matrix d_f = mul(d_c_total, c_prev);
  const Matrix d_i = mul(d_c_total, g);
  const Matrix d_g = mul(d_c_total, i);
  {
    auto dct = d_c_total.flat();
    auto fs = f.flat();
    auto dcp = d_c_prev.flat();
    for (std::size_t k = 0; k < dcp.size(); ++k) {
      dcp[k] = dct[k] * fs[k];
    }
  }
  const Matrix d_i_in = gate_backward(gate, cache.acts[kIIn], i, d_i);
  const Matrix d_f_in = gate_backward(gate, cache.acts[kFIn], f, d_f);
  const Matrix d_g_in = tanh_backward(g, d_g);

  const std::pair<const Matrix*, std::size_t> blocks[] = {
      {&d_i_in, W_i}, {&d_f_in, W_f}, {&d_g_in, W_g}, {&d_o_in, W_o}};
  for (const auto& [dz, base] : blocks) {
    weight_grad(*dz, cache.x, grads.value(base));
    weight_grad(*dz, cache.h_prev, grads.value(base + 1));
    bias_grad(*dz, grads.value(base + 2));
    input_grad(*dz, w.value(base), d_x);
    input_grad(*dz, w.value(base + 1), d_h_prev);
  }
  if (peep) {
    weight_grad(d_i_in, c_prev, grads.value(P_i));
    weight_grad(d_f_in, c_prev, grads.value(P_f));
    input_grad(d_i_in, w.value(P_i), d_c_prev);
    input_grad(d_f_in, w.value(P_f), d_c_prev);
  }
}

}  // namespace rnnlab::detail
