#include "rnnlab/optimizer.hpp"

#include <cmath>
#include <vector>

#include "rnnlab/errors.hpp"

namespace rnnlab {

AdamState make_adam_state(const ParamSet& params, const AdamConfig& config) {
  if (!(config.lr > 0.0) || !(config.eps > 0.0) || !(config.beta1 >= 0.0 && config.beta1 < 1.0) ||
      !(config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    throw std::invalid_argument("Adam: need lr > 0, eps > 0 and 0 <= beta1, beta2 < 1");
  }
  return AdamState{config, params.zeros_like(), params.zeros_like(), 0};
}

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state) {
  if (!params.same_layout(grads) || !params.same_layout(state.m)) {
    throw ShapeError("adam_step: parameters, gradients and moments do not share a layout");
  }
  for (const auto& slot : grads) {
    if (!slot.value.all_finite()) {
      throw NumericError("adam_step: non-finite gradient in " + slot.name);
    }
  }

  const auto& cfg = state.config;
  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);

  for (std::size_t s = 0; s < params.size(); ++s) {
    auto theta = params.value(s).flat();
    auto g = grads.value(s).flat();
    auto m = state.m.value(s).flat();
    auto v = state.v.value(s).flat();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      theta[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

double global_norm(std::span<const ParamSet* const> grads) {
  double sq = 0.0;
  for (const ParamSet* set : grads) {
    for (const auto& slot : *set) {
      for (double g : slot.value.flat()) {
        sq += g * g;
      }
    }
  }
  return std::sqrt(sq);
}

double clip_global_norm(std::span<ParamSet* const> grads, double max_norm) {
  const std::vector<const ParamSet*> view(grads.begin(), grads.end());
  const double norm = global_norm(view);
  if (max_norm > 0.0 && norm > max_norm) {
    const double scale = max_norm / norm;
    for (ParamSet* set : grads) {
      for (auto& slot : *set) {
        for (double& g : slot.value.flat()) {
          g *= scale;
        }
      }
    }
  }
  return norm;
}

}  // namespace rnnlab
