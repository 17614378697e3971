#pragma once

// Recurrent cells: LiteLSTM and the four comparison baselines.
//
// Every cell runs on a batch: rows of x, h and c are independent sequences.
// A single sample is the one-row case. Gradients are derived by hand for
// each architecture and accumulated over time by backward_sequence.
//
// LiteLSTM has one gate f that is shared by the memory carry, the candidate
// admission and the output:
//
//   inp = W_fx·x + U_fh·h_prev + W_fc·c_prev + b_f
//   f   = G(inp)                      G = logistic or hard sigmoid
//   g   = tanh(W_gx·x + U_gh·h_prev + b_g)
//   c   = f⊙c_prev + f⊙g
//   h   = f⊙tanh(c)

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rnnlab/linalg.hpp"

namespace rnnlab {

enum class Arch { rnn, gru, lstm, plstm, litelstm };
enum class GateFn { logistic, hard };

// Column order of the comparison tables: RNN, GRU, LSTM, pLSTM, LiteLSTM.
inline constexpr Arch kAllArchs[] = {Arch::rnn, Arch::gru, Arch::lstm, Arch::plstm,
                                     Arch::litelstm};

std::string_view to_string(Arch arch) noexcept;
std::string_view display_name(Arch arch) noexcept;
Arch parse_arch(std::string_view text);
std::string_view to_string(GateFn gate) noexcept;
GateFn parse_gate(std::string_view text);

// Whether the architecture carries a memory cell c alongside h.
bool has_memory_cell(Arch arch) noexcept;

// ---- parameters --------------------------------------------------------------

enum class SlotKind { weight, bias };

struct ParamSlot {
  std::string name;
  SlotKind kind;
  Matrix value;  // biases are stored as [n x 1]

  friend bool operator==(const ParamSlot&, const ParamSlot&) = default;
};

// Ordered collection of named arrays. The order is part of the contract:
// serialization, optimizer state and gradients all index by position.
class ParamSet {
 public:
  void add(std::string name, SlotKind kind, Matrix value);

  std::size_t size() const noexcept { return slots_.size(); }
  ParamSlot& operator[](std::size_t i) { return slots_[i]; }
  const ParamSlot& operator[](std::size_t i) const { return slots_[i]; }
  Matrix& value(std::size_t i) { return slots_[i].value; }
  const Matrix& value(std::size_t i) const { return slots_[i].value; }

  // Throws std::out_of_range naming the slot when absent.
  const ParamSlot& find(std::string_view name) const;
  ParamSlot& find(std::string_view name);

  auto begin() noexcept { return slots_.begin(); }
  auto end() noexcept { return slots_.end(); }
  auto begin() const noexcept { return slots_.begin(); }
  auto end() const noexcept { return slots_.end(); }

  ParamSet zeros_like() const;
  bool same_layout(const ParamSet& other) const noexcept;
  std::size_t scalar_count() const noexcept;
  void set_zero();

  friend bool operator==(const ParamSet&, const ParamSet&) = default;

 private:
  std::vector<ParamSlot> slots_;
};

struct CellShape {
  Arch arch = Arch::litelstm;
  std::size_t hidden = 1;  // n
  std::size_t input = 1;   // m
  GateFn gate = GateFn::logistic;

  friend bool operator==(const CellShape&, const CellShape&) = default;
};

struct CellParams {
  CellShape shape;
  ParamSet arrays;

  friend bool operator==(const CellParams&, const CellParams&) = default;
};

// Glorot-uniform weights (recurrent and peephole matrices included), zero
// biases. Slots are drawn in layout order from one generator.
CellParams init_cell_params(const CellShape& shape, std::mt19937_64& rng);
CellParams zero_cell_params(const CellShape& shape);

// Slot names in storage order, e.g. litelstm:
// W_fx U_fh W_fc b_f W_gx U_gh b_g.
std::vector<std::string> slot_names(Arch arch);

// ---- state and caches ---------------------------------------------------------

struct CellState {
  Matrix h;  // [batch x n]
  Matrix c;  // [batch x n]; empty for architectures without a memory cell

  static CellState zeros(const CellShape& shape, std::size_t batch = 1);
  // Single-sample state; c must be empty iff the architecture has no cell.
  static CellState single(const Vector& h, const Vector& c = {});
  std::size_t batch() const noexcept { return h.rows(); }
  bool has_memory() const noexcept { return !c.empty(); }
};

// Everything one forward step produced, kept for the backward pass.
// Named activations per architecture (see cache_names):
//   rnn       a
//   gru       z_in z r_in r rh hh
//   lstm      i_in i f_in f g o_in o c_new tanh_c
//   plstm     same as lstm
//   litelstm  inp f g c_new tanh_c
struct StepCache {
  Arch arch = Arch::litelstm;
  Matrix x;
  Matrix h_prev;
  Matrix c_prev;
  std::vector<Matrix> acts;

  const Matrix& act(std::string_view name) const;
};

std::vector<std::string> cache_names(Arch arch);

struct StepResult {
  CellState state;
  StepCache cache;
};

// One forward step on a batch. x is [batch x m].
StepResult step(const CellParams& params, const Matrix& x, const CellState& state);
StepResult step(const CellParams& params, const Vector& x, const CellState& state);

struct StepGradients {
  ParamSet params;  // mirrors CellParams::arrays
  Matrix d_x;
  Matrix d_h_prev;
  Matrix d_c_prev;  // empty for architectures without a memory cell
};

// Gradients of one step given upstream d_h and d_c (d_c may be empty, read
// as zero; it must be empty for rnn/gru).
StepGradients backward_step(const CellParams& params, const StepCache& cache,
                            const Matrix& d_h, const Matrix& d_c);

// Accumulating form used by backward_sequence. Parameter gradients are added
// into grads; d_x, d_h_prev, d_c_prev are overwritten.
void backward_step_into(const CellParams& params, const StepCache& cache, const Matrix& d_h,
                        const Matrix& d_c, ParamSet& grads, Matrix& d_x, Matrix& d_h_prev,
                        Matrix& d_c_prev);

// ---- sequences ---------------------------------------------------------------

struct SequenceForward {
  std::vector<CellState> states;  // states[t] is the state after step t
  std::vector<StepCache> caches;
};

// Unrolls the cell over a time-major sequence of [batch x m] inputs.
SequenceForward forward_sequence(const CellParams& params, std::span<const Matrix> seq,
                                 const CellState& s0);

// Forward pass that keeps only the final state.
CellState run_sequence(const CellParams& params, std::span<const Matrix> seq, CellState s0);

struct SequenceGradients {
  ParamSet params;
  std::vector<Matrix> d_x;  // per time step
  Matrix d_h0;
  Matrix d_c0;
};

// Backpropagation through time. d_h[t] is the loss gradient flowing into
// h_t from outside the recurrence (an empty matrix means zero). d_c_last is
// the external gradient into the final memory cell (empty means zero).
// truncate > 0 stops the reverse sweep after that many steps.
SequenceGradients backward_sequence(const CellParams& params, std::span<const StepCache> caches,
                                    std::span<const Matrix> d_h, const Matrix& d_c_last = {},
                                    std::size_t truncate = 0);

// ---- component census --------------------------------------------------------

// Structural components as tabulated in the published architecture
// comparison. These are declared per architecture; the counts that can be
// measured from stored arrays live in Census.
struct ComponentProfile {
  int gates;
  int activations;
  bool memory_cell;
  bool peephole;
  int elementwise_mults;
  int published_weight_matrices;
};

const ComponentProfile& component_profile(Arch arch) noexcept;

struct Census {
  Arch arch;
  ComponentProfile profile;
  std::size_t matrices;   // enumerated from stored weight arrays
  std::size_t biases;     // enumerated from stored bias arrays
  std::size_t scalars;    // total trainable scalars in the cell
  std::uint64_t macs_per_step;  // measured on a batch-of-one forward step
  std::string note;
};

Census param_census(const CellParams& params);

}  // namespace rnnlab
