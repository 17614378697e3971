#include "rnnlab/cells.hpp"

namespace rnnlab {
namespace {

constexpr ComponentProfile kRnn{0, 1, false, false, 2, 2};
constexpr ComponentProfile kGru{2, 1, false, false, 3, 6};
constexpr ComponentProfile kLstm{3, 2, true, false, 3, 8};
constexpr ComponentProfile kPlstm{3, 2, true, true, 6, 11};
constexpr ComponentProfile kLite{1, 2, true, true, 3, 6};

}  // namespace

const ComponentProfile& component_profile(Arch arch) noexcept {
  switch (arch) {
    case Arch::rnn: return kRnn;
    case Arch::gru: return kGru;
    case Arch::lstm: return kLstm;
    case Arch::plstm: return kPlstm;
    case Arch::litelstm: return kLite;
  }
  return kRnn;
}

Census param_census(const CellParams& params) {
  Census c{params.shape.arch, component_profile(params.shape.arch), 0, 0, 0, 0, {}};
  for (const auto& slot : params.arrays) {
    if (slot.kind == SlotKind::weight) {
      ++c.matrices;
    } else {
      ++c.biases;
    }
    c.scalars += slot.value.size();
  }

  const CellState s0 = CellState::zeros(params.shape, 1);
  const Matrix x(1, params.shape.input);
  const auto before = mac_count();
  (void)step(params, x, s0);
  c.macs_per_step = mac_count() - before;

  if (params.shape.arch == Arch::litelstm &&
      c.matrices != static_cast<std::size_t>(c.profile.published_weight_matrices)) {
    c.note = "stores " + std::to_string(c.matrices) + " weight matrices; the published table lists " +
             std::to_string(c.profile.published_weight_matrices) +
             " (gate equations define W_fx, U_fh, W_fc, W_gx, U_gh only)";
  }
  return c;
}

}  // namespace rnnlab
