#pragma once

// Shared pieces of the per-architecture step implementations.

#include <initializer_list>
#include <span>
#include <utility>

#include "rnnlab/cells.hpp"

namespace rnnlab::detail {

enum class Dim : char { hidden, input, one };

struct SlotSpec {
  const char* name;
  SlotKind kind;
  Dim rows;
  Dim cols;
};

std::span<const SlotSpec> layout(Arch arch) noexcept;

// bias broadcast over the batch plus Σ input·Wᵀ over the given terms.
Matrix pre_activation(const Matrix& bias,
                      std::initializer_list<std::pair<const Matrix*, const Matrix*>> terms);

Matrix apply_gate(GateFn gate, const Matrix& z);
// d_z = d_out ⊙ G'(z). The hard sigmoid uses slope 0.2 on |z| <= 2.5.
Matrix gate_backward(GateFn gate, const Matrix& z, const Matrix& out, const Matrix& d_out);

Matrix tanh_of(const Matrix& z);
// d_z = d_y ⊙ (1 − y²) for y = tanh(z).
Matrix tanh_backward(const Matrix& y, const Matrix& d_y);

Matrix mul(const Matrix& a, const Matrix& b);

// d_w += d_zᵀ·input.
void weight_grad(const Matrix& d_z, const Matrix& input, Matrix& d_w);
// d_input += d_z·w.
void input_grad(const Matrix& d_z, const Matrix& w, Matrix& d_input);
// d_b += column sums of d_z.
void bias_grad(const Matrix& d_z, Matrix& d_b);

void check_step_inputs(const CellParams& params, const Matrix& x, const CellState& state);
void check_backward_inputs(const CellParams& params, const StepCache& cache, const Matrix& d_h,
                           const Matrix& d_c);

StepResult rnn_step(const CellParams& p, const Matrix& x, const CellState& s);
void rnn_backward(const CellParams& p, const StepCache& cache, const Matrix& d_h,
                  ParamSet& g, Matrix& d_x, Matrix& d_h_prev);

StepResult gru_step(const CellParams& p, const Matrix& x, const CellState& s);
void gru_backward(const CellParams& p, const StepCache& cache, const Matrix& d_h,
                  ParamSet& g, Matrix& d_x, Matrix& d_h_prev);

// Handles both lstm and plstm (peepholes present iff arch == plstm).
StepResult lstm_step(const CellParams& p, const Matrix& x, const CellState& s);
void lstm_backward(const CellParams& p, const StepCache& cache, const Matrix& d_h,
                   const Matrix& d_c, ParamSet& g, Matrix& d_x, Matrix& d_h_prev,
                   Matrix& d_c_prev);

StepResult litelstm_step(const CellParams& p, const Matrix& x, const CellState& s);
void litelstm_backward(const CellParams& p, const StepCache& cache, const Matrix& d_h,
                       const Matrix& d_c, ParamSet& g, Matrix& d_x, Matrix& d_h_prev,
                       Matrix& d_c_prev);

}  // namespace rnnlab::detail
