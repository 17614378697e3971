#pragma once

// Weight files: a flat little-endian binary container plus a JSON sidecar.
//
// Binary layout (all integers u32 LE, all values f64 LE):
//
//   offset  field
//   0       magic "RNNLABW1" (8 bytes)
//   8       format version (1)
//   12      architecture tag: 0 rnn, 1 gru, 2 lstm, 3 plstm, 4 litelstm
//   16      hidden size n
//   20      input size m
//   24      gate function: 0 logistic, 1 hard
//   28      classes k of the dense head (0 when no head is stored)
//   32      number of arrays
//   36      reserved (0)
//   40      arrays, row-major, in slot order: the cell's slots (see
//           slot_names), then W_out [k x n] and b_out [k x 1] if k > 0
//
// The sidecar (<file>.json) lists each array's name, shape and byte offset.

#include <filesystem>

#include "rnnlab/cells.hpp"

namespace rnnlab {

inline constexpr std::size_t kWeightsHeaderBytes = 40;

struct StoredWeights {
  CellParams cell;
  ParamSet head;  // empty when the file holds no head
};

// head may be null. Writes `path` and `path + ".json"`.
void save_weights(const std::filesystem::path& path, const CellParams& cell,
                  const ParamSet* head = nullptr);

// Throws FormatError (with byte offset) on malformed input.
StoredWeights load_weights(const std::filesystem::path& path);

}  // namespace rnnlab
