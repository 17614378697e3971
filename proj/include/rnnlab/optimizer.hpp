#pragma once

#include <cstdint>
#include <span>

#include "rnnlab/cells.hpp"

namespace rnnlab {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-7;  // added outside the square root
};

// Moment estimates for one ParamSet.
struct AdamState {
  AdamConfig config;
  ParamSet m;
  ParamSet v;
  std::uint64_t t = 0;
};

// Zero moments shaped like params; validates the hyperparameters.
AdamState make_adam_state(const ParamSet& params, const AdamConfig& config = {});

// One bias-corrected Adam update. Throws NumericError naming the array on a
// non-finite gradient, before anything is modified.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state);

// Global L2 norm over all gradient arrays.
double global_norm(std::span<const ParamSet* const> grads);

// Scales every gradient so the global norm is at most max_norm; returns the
// norm before clipping. max_norm <= 0 disables clipping.
double clip_global_norm(std::span<ParamSet* const> grads, double max_norm);

}  // namespace rnnlab
