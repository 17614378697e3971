#include <algorithm>
#include <stdexcept>

#include "cell_impl.hpp"
#include "rnnlab/errors.hpp"

namespace rnnlab {
namespace detail {
namespace {

using enum SlotKind;
constexpr Dim H = Dim::hidden;
constexpr Dim I = Dim::input;
constexpr Dim O = Dim::one;

constexpr SlotSpec kRnn[] = {
    {"W_x", weight, H, I}, {"U_h", weight, H, H}, {"b", bias, H, O}};

constexpr SlotSpec kGru[] = {
    {"W_z", weight, H, I}, {"U_z", weight, H, H}, {"b_z", bias, H, O},
    {"W_r", weight, H, I}, {"U_r", weight, H, H}, {"b_r", bias, H, O},
    {"W_h", weight, H, I}, {"U_h", weight, H, H}, {"b_h", bias, H, O}};

#define RNNLAB_LSTM_SLOTS                                             \
  {"W_i", weight, H, I}, {"U_i", weight, H, H}, {"b_i", bias, H, O},  \
      {"W_f", weight, H, I}, {"U_f", weight, H, H}, {"b_f", bias, H, O}, \
      {"W_g", weight, H, I}, {"U_g", weight, H, H}, {"b_g", bias, H, O}, \
      {"W_o", weight, H, I}, {"U_o", weight, H, H}, {"b_o", bias, H, O}

constexpr SlotSpec kLstm[] = {RNNLAB_LSTM_SLOTS};
constexpr SlotSpec kPlstm[] = {RNNLAB_LSTM_SLOTS,
                               {"P_i", weight, H, H},
                               {"P_f", weight, H, H},
                               {"P_o", weight, H, H}};
#undef RNNLAB_LSTM_SLOTS

constexpr SlotSpec kLite[] = {
    {"W_fx", weight, H, I}, {"U_fh", weight, H, H}, {"W_fc", weight, H, H},
    {"b_f", bias, H, O},    {"W_gx", weight, H, I}, {"U_gh", weight, H, H},
    {"b_g", bias, H, O}};

std::size_t extent(Dim d, const CellShape& shape) {
  switch (d) {
    case Dim::hidden: return shape.hidden;
    case Dim::input: return shape.input;
    case Dim::one: return 1;
  }
  return 1;
}

}  // namespace

std::span<const SlotSpec> layout(Arch arch) noexcept {
  switch (arch) {
    case Arch::rnn: return kRnn;
    case Arch::gru: return kGru;
    case Arch::lstm: return kLstm;
    case Arch::plstm: return kPlstm;
    case Arch::litelstm: return kLite;
  }
  return {};
}

}  // namespace detail

// ---- names -------------------------------------------------------------------

std::string_view to_string(Arch arch) noexcept {
  switch (arch) {
    case Arch::rnn: return "rnn";
    case Arch::gru: return "gru";
    case Arch::lstm: return "lstm";
    case Arch::plstm: return "plstm";
    case Arch::litelstm: return "litelstm";
  }
  return "?";
}

std::string_view display_name(Arch arch) noexcept {
  switch (arch) {
    case Arch::rnn: return "RNN";
    case Arch::gru: return "GRU";
    case Arch::lstm: return "LSTM";
    case Arch::plstm: return "pLSTM";
    case Arch::litelstm: return "LiteLSTM";
  }
  return "?";
}

Arch parse_arch(std::string_view text) {
  for (Arch a : kAllArchs) {
    if (text == to_string(a)) {
      return a;
    }
  }
  throw std::invalid_argument("unknown architecture '" + std::string(text) +
                              "' (expected rnn, gru, lstm, plstm or litelstm)");
}

std::string_view to_string(GateFn gate) noexcept {
  return gate == GateFn::logistic ? "logistic" : "hard";
}

GateFn parse_gate(std::string_view text) {
  if (text == "logistic") return GateFn::logistic;
  if (text == "hard") return GateFn::hard;
  throw std::invalid_argument("unknown gate function '" + std::string(text) +
                              "' (expected logistic or hard)");
}

bool has_memory_cell(Arch arch) noexcept {
  return arch == Arch::lstm || arch == Arch::plstm || arch == Arch::litelstm;
}

// ---- ParamSet ----------------------------------------------------------------

void ParamSet::add(std::string name, SlotKind kind, Matrix value) {
  slots_.push_back({std::move(name), kind, std::move(value)});
}

const ParamSlot& ParamSet::find(std::string_view name) const {
  auto it = std::find_if(slots_.begin(), slots_.end(),
                         [&](const ParamSlot& s) { return s.name == name; });
  if (it == slots_.end()) {
    throw std::out_of_range("no parameter slot named '" + std::string(name) + "'");
  }
  return *it;
}

ParamSlot& ParamSet::find(std::string_view name) {
  return const_cast<ParamSlot&>(std::as_const(*this).find(name));
}

ParamSet ParamSet::zeros_like() const {
  ParamSet out;
  for (const auto& s : slots_) {
    out.add(s.name, s.kind, Matrix(s.value.rows(), s.value.cols()));
  }
  return out;
}

bool ParamSet::same_layout(const ParamSet& other) const noexcept {
  if (slots_.size() != other.slots_.size()) {
    return false;
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    if (slots_[i].name != other.slots_[i].name ||
        !slots_[i].value.same_shape(other.slots_[i].value)) {
      return false;
    }
  }
  return true;
}

std::size_t ParamSet::scalar_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : slots_) {
    n += s.value.size();
  }
  return n;
}

void ParamSet::set_zero() {
  for (auto& s : slots_) {
    s.value.fill(0.0);
  }
}

// ---- construction --------------------------------------------------------------

namespace {

void check_shape(const CellShape& shape) {
  if (shape.hidden == 0 || shape.input == 0) {
    throw ShapeError("cell shape requires hidden >= 1 and input >= 1");
  }
}

}  // namespace

CellParams zero_cell_params(const CellShape& shape) {
  check_shape(shape);
  CellParams p{shape, {}};
  for (const auto& spec : detail::layout(shape.arch)) {
    p.arrays.add(spec.name, spec.kind,
                 Matrix(detail::extent(spec.rows, shape), detail::extent(spec.cols, shape)));
  }
  return p;
}

CellParams init_cell_params(const CellShape& shape, std::mt19937_64& rng) {
  CellParams p = zero_cell_params(shape);
  for (auto& slot : p.arrays) {
    if (slot.kind == SlotKind::weight) {
      slot.value = glorot_init(slot.value.rows(), slot.value.cols(), rng);
    }
  }
  return p;
}

std::vector<std::string> slot_names(Arch arch) {
  std::vector<std::string> out;
  for (const auto& spec : detail::layout(arch)) {
    out.emplace_back(spec.name);
  }
  return out;
}

// ---- state ---------------------------------------------------------------------

CellState CellState::zeros(const CellShape& shape, std::size_t batch) {
  CellState s;
  s.h = Matrix(batch, shape.hidden);
  if (has_memory_cell(shape.arch)) {
    s.c = Matrix(batch, shape.hidden);
  }
  return s;
}

CellState CellState::single(const Vector& h, const Vector& c) {
  CellState s;
  s.h = Matrix::row_vector(h);
  if (!c.empty()) {
    if (c.size() != h.size()) {
      throw ShapeError("CellState: h has length " + std::to_string(h.size()) + " but c has " +
                       std::to_string(c.size()));
    }
    s.c = Matrix::row_vector(c);
  }
  return s;
}

}  // namespace rnnlab
