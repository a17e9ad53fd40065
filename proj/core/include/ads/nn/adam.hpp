#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ads/nn/tensor.hpp"

namespace ads::nn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  std::int64_t step = 0;
};

// Bias-corrected Adam update of every parameter from its accumulated grad.
// An empty state is initialized to zero moments on first use.
void adam_step(std::span<ParamTensor* const> params, AdamState& state, const AdamConfig& config);

}  // namespace ads::nn
