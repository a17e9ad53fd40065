#include "ads/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "ads/error.hpp"

namespace ads::nn {

std::vector<Tensor> analytic_gradients(Model& model, const LossClosure& loss) {
  model.zero_grad();
  (void)loss(model, true);
  std::vector<Tensor> out;
  for (const auto* p : model.params()) out.push_back(p->grad);
  return out;
}

GradCheckReport finite_difference_check(Model& model, const LossClosure& loss, const std::vector<Tensor>& analytic,
                                        double tol, double h) {
  auto params = model.params();
  if (analytic.size() != params.size()) throw Error(ErrorCode::ShapeMismatch, "one gradient per parameter");
  GradCheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i]->value;
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double saved = value[k];
      value[k] = saved + h;
      const double up = loss(model, false);
      value[k] = saved - h;
      const double down = loss(model, false);
      value[k] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[i][k];
      const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), kGradCheckFloor});
      ++report.checked;
      if (rel > report.max_relative_error || !std::isfinite(rel)) {
        report.max_relative_error = rel;
        report.worst_param = std::to_string(i) + ":" + params[i]->name;
        report.worst_index = k;
      }
    }
  }
  report.passed = std::isfinite(report.max_relative_error) && report.max_relative_error < tol;
  return report;
}

GradCheckReport grad_check(Model& model, const LossClosure& loss, double tol, double h) {
  const auto analytic = analytic_gradients(model, loss);
  return finite_difference_check(model, loss, analytic, tol, h);
}

}  // namespace ads::nn
