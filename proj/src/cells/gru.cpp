#include "cell_impl.hpp"

namespace rnnlab::detail {
namespace {

enum Slot : std::size_t { W_z, U_z, b_z, W_r, U_r, b_r, W_h, U_h, b_h };
enum Act : std::size_t { kZIn, kZ, kRIn, kR, kRh, kHh };

}  // namespace

// z  = G(W_z·x + U_z·h_prev + b_z)
// r  = G(W_r·x + U_r·h_prev + b_r)
// hh = tanh(W_h·x + U_h·(r⊙h_prev) + b_h)
// h  = z⊙h_prev + (1 − z)⊙hh
StepResult gru_step(const CellParams& p, const Matrix& x, const CellState& s) {
  const auto& w = p.arrays;
  Matrix z_in = pre_activation(w.value(b_z), {{&x, &w.value(W_z)}, {&s.h, &w.value(U_z)}});
  Matrix z = apply_gate(p.shape.gate, z_in);
  Matrix r_in = pre_activation(w.value(b_r), {{&x, &w.value(W_r)}, {&s.h, &w.value(U_r)}});
  Matrix r = apply_gate(p.shape.gate, r_in);
  Matrix rh = mul(r, s.h);
  Matrix hh = tanh_of(pre_activation(w.value(b_h), {{&x, &w.value(W_h)}, {&rh, &w.value(U_h)}}));

  Matrix h(x.rows(), p.shape.hidden);
  {
    auto zs = z.flat();
    auto hp = s.h.flat();
    auto hs = hh.flat();
    auto out = h.flat();
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = zs[i] * hp[i] + (1.0 - zs[i]) * hs[i];
    }
  }

  StepResult res;
  res.state.h = std::move(h);
  res.cache.arch = Arch::gru;
  res.cache.x = x;
  res.cache.h_prev = s.h;
  res.cache.acts.reserve(6);
  res.cache.acts.push_back(std::move(z_in));
  res.cache.acts.push_back(std::move(z));
  res.cache.acts.push_back(std::move(r_in));
  res.cache.acts.push_back(std::move(r));
  res.cache.acts.push_back(std::move(rh));
  res.cache.acts.push_back(std::move(hh));
  return res;
}

void gru_backward(const CellParams& p, const StepCache& cache, const Matrix& d_h,
                  ParamSet& grads, Matrix& d_x, Matrix& d_h_prev) {
  const auto& w = p.arrays;
  const Matrix& z = cache.acts[kZ];
  const Matrix& r = cache.acts[kR];
  const Matrix& hh = cache.acts[kHh];
  const Matrix& h_prev = cache.h_prev;

  Matrix d_z(z.rows(), z.cols());
  Matrix d_hh(z.rows(), z.cols());
  {
    auto zs = z.flat();
    auto hs = hh.flat();
    auto hp = h_prev.flat();
    auto dh = d_h.flat();
    auto dz = d_z.flat();
    auto dhh = d_hh.flat();
    auto dhp = d_h_prev.flat();
    for (std::size_t i = 0; i < dz.size(); ++i) {
      dz[i] = dh[i] * (hp[i] - hs[i]);
      dhh[i] = dh[i] * (1.0 - zs[i]);
      dhp[i] = dh[i] * zs[i];
    }
  }
  const Matrix d_hh_in = tanh_backward(hh, d_hh);
  weight_grad(d_hh_in, cache.x, grads.value(W_h));
  weight_grad(d_hh_in, cache.acts[kRh], grads.value(U_h));
  bias_grad(d_hh_in, grads.value(b_h));

  Matrix d_rh(z.rows(), z.cols());
  input_grad(d_hh_in, w.value(U_h), d_rh);
  Matrix d_r = mul(d_rh, h_prev);
  {
    auto acc = d_h_prev.flat();
    auto drh = d_rh.flat();
    auto rs = r.flat();
    for (std::size_t i = 0; i < acc.size(); ++i) {
      acc[i] += drh[i] * rs[i];
    }
  }

  const Matrix d_z_in = gate_backward(p.shape.gate, cache.acts[kZIn], z, d_z);
  const Matrix d_r_in = gate_backward(p.shape.gate, cache.acts[kRIn], r, d_r);
  weight_grad(d_z_in, cache.x, grads.value(W_z));
  weight_grad(d_z_in, h_prev, grads.value(U_z));
  bias_grad(d_z_in, grads.value(b_z));
  weight_grad(d_r_in, cache.x, grads.value(W_r));
  weight_grad(d_r_in, h_prev, grads.value(U_r));
  bias_grad(d_r_in, grads.value(b_r));

  input_grad(d_z_in, w.value(W_z), d_x);
  input_grad(d_r_in, w.value(W_r), d_x);
  input_grad(d_hh_in, w.value(W_h), d_x);
  input_grad(d_z_in, w.value(U_z), d_h_prev);
  input_grad(d_r_in, w.value(U_r), d_h_prev);
}

}  // namespace rnnlab::detail
