#include "ads/nn/adam.hpp"

#include <cmath>

#include "ads/error.hpp"

namespace ads::nn {

void adam_step(std::span<ParamTensor* const> params, AdamState& state, const AdamConfig& config) {
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.emplace_back(p->value.shape());
      state.v.emplace_back(p->value.shape());
    }
  }
  if (state.m.size() != params.size()) throw Error(ErrorCode::ShapeMismatch, "Adam state/parameter mismatch");

  ++state.step;
  const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& p = *params[i];
    double* m = state.m[i].data();
    double* v = state.v[i].data();
    double* w = p.value.data();
    const double* g = p.grad.data();
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * g[k];
      v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * g[k] * g[k];
      w[k] -= config.lr * (m[k] / c1) / (std::sqrt(v[k] / c2) + config.eps);
    }
  }
}

}  // namespace ads::nn
