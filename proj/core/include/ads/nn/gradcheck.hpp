#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ads/nn/model.hpp"

namespace ads::nn {

// Evaluates a scalar loss of the model on a fixed batch. When `backward` is
// true the closure must also leave d(loss)/d(param) in the model's grads
// (after zeroing them).
using LossClosure = std::function<double(Model& model, bool backward)>;

struct GradCheckReport {
  double max_relative_error = 0.0;
  std::size_t checked = 0;
  std::string worst_param;
  std::size_t worst_index = 0;
  bool passed = false;
};

// Relative error |a - n| / max(|a|, |n|, floor); the floor keeps near-zero
// gradients from dominating through round-off.
inline constexpr double kGradCheckFloor = 1e-6;
inline constexpr double kGradCheckStep = 1e-4;

std::vector<Tensor> analytic_gradients(Model& model, const LossClosure& loss);

// Compares `analytic` (one tensor per parameter) against central finite
// differences with step h.
GradCheckReport finite_difference_check(Model& model, const LossClosure& loss, const std::vector<Tensor>& analytic,
                                        double tol, double h = kGradCheckStep);

GradCheckReport grad_check(Model& model, const LossClosure& loss, double tol, double h = kGradCheckStep);

}  // namespace ads::nn
