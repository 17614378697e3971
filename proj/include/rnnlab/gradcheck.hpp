#pragma once

// Central finite differences as the ground truth for every hand-derived
// gradient in the library.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rnnlab/cells.hpp"

namespace rnnlab {

using LossFn = std::function<double(const ParamSet&)>;

// Per-coordinate (L(θ+ε) − L(θ−ε)) / 2ε over every scalar of every array.
// Throws NumericError when the loss is non-finite at any probe.
ParamSet finite_diff(const LossFn& loss, const ParamSet& params, double epsilon);

struct SlotReport {
  std::string name;
  double max_abs_err = 0.0;
  double max_rel_err = 0.0;
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  std::size_t compared = 0;
  std::size_t excluded = 0;  // coordinates skipped near hard-sigmoid knees
  bool pass = true;
};

struct GradReport {
  Arch arch = Arch::litelstm;
  GateFn gate = GateFn::logistic;
  std::vector<SlotReport> slots;  // merged over seeds, worst case kept
  std::size_t seeds = 0;
  bool pass = true;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  double rel_tol = 1e-4;
  double abs_tol = 1e-7;  // a coordinate passes if either tolerance holds
  // Relative error is reported for coordinates with max(|analytic|, |numeric|)
  // at least this large, or an absolute error above abs_tol.
  double rel_floor = 1e-4;
  std::size_t batch = 2;
  GateFn gate = GateFn::logistic;
  // Coordinates whose perturbation moves a gate pre-activation lying within
  // this distance of ±2.5 are excluded when the gate is hard.
  double knee_margin = 1e-3;
};

// Compares the analytic gradient of a random rollout with finite
// differences. Per seed: random params (scaled Glorot, random biases),
// random inputs and initial state; loss = Σ_t Σ h_t + Σ c_T. Checked slots
// are every parameter array plus the input sequence and initial state.
GradReport check_cell(Arch arch, std::size_t hidden, std::size_t input, std::size_t steps,
                      const std::vector<std::uint64_t>& seeds,
                      const GradCheckOptions& options = {});

// Seeds 1..count.
std::vector<std::uint64_t> seed_range(std::size_t count);

std::string format_report(const GradReport& report);

}  // namespace rnnlab
