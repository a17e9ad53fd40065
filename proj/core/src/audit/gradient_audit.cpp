#include "ads/audit/gradient_audit.hpp"

#include <random>

#include "ads/nn/losses.hpp"
#include "ads/random.hpp"
#include "ads/wta/autoencoder.hpp"

namespace ads::audit {

namespace {

using namespace ads::nn;

constexpr std::size_t kBatch = 4;
// Whole networks have thousands of ReLU/max/top-k switch points; a smaller
// step keeps the central difference from straddling one.
constexpr double kModelStep = 1e-6;

Tensor gaussian(Shape per_sample, std::size_t batch, Rng& rng) {
  Shape s{batch};
  s.insert(s.end(), per_sample.begin(), per_sample.end());
  Tensor t(s);
  std::normal_distribution<double> unit(0.0, 1.0);
  for (auto& v : t.values()) v = unit(rng);
  return t;
}

// MSE of the model output against a fixed random target.
AuditEntry check_mse(std::string name, const ModelSpec& spec, std::uint64_t seed, double tol,
                     double h = kGradCheckStep) {
  Rng rng(derive_seed(seed, 1));
  Model model(spec, derive_seed(seed, 2));
  const auto x = gaussian(spec.input, kBatch, rng);
  const auto target = gaussian(spec.output_shape(), kBatch, rng);
  auto loss = [&](Model& m, bool backward) {
    const auto r = mse_loss(m.forward(x), target);
    if (backward) m.backward(r.grad);
    return r.loss;
  };
  return {std::move(name), grad_check(model, loss, tol, h)};
}

AuditEntry check_cross_entropy(std::string name, const ModelSpec& spec, std::uint64_t seed, double tol,
                               double h = kGradCheckStep) {
  Rng rng(derive_seed(seed, 1));
  Model model(spec, derive_seed(seed, 2));
  const auto x = gaussian(spec.input, kBatch, rng);
  const std::vector<int> labels{0, 1, 1, 0};
  auto loss = [&](Model& m, bool backward) {
    const auto r = cross_entropy_loss(m.forward(x), labels);
    if (backward) m.backward(r.grad);
    return r.loss;
  };
  return {std::move(name), grad_check(model, loss, tol, h)};
}

// One forward over the stacked [anchor; positive; negative] batch, as in training.
AuditEntry check_triplet(std::string name, const ModelSpec& spec, std::uint64_t seed, double tol,
                         double h = kGradCheckStep) {
  Rng rng(derive_seed(seed, 1));
  Model model(spec, derive_seed(seed, 2));
  const auto x = gaussian(spec.input, 3 * kBatch, rng);
  // A margin this wide keeps every triplet off the clamp.
  constexpr double kMargin = 2.5;
  auto loss = [&](Model& m, bool backward) {
    const auto z = m.forward(x);
    const auto r = triplet_cosine_loss(z.slice_rows(0, kBatch), z.slice_rows(kBatch, 2 * kBatch),
                                       z.slice_rows(2 * kBatch, 3 * kBatch), kMargin);
    if (backward) {
      const Tensor* parts[] = {&r.grad_anchor, &r.grad_positive, &r.grad_negative};
      m.backward(Tensor::concat_rows(parts));
    }
    return r.loss;
  };
  return {std::move(name), grad_check(model, loss, tol, h)};
}

}  // namespace

std::vector<AuditEntry> gradient_audit(std::uint64_t seed, double tol) {
  std::vector<AuditEntry> out;
  auto s = [&](std::uint64_t k) { return derive_seed(seed, k); };

  out.push_back(check_mse("layer:dense", {{6}, {dense(6, 5)}}, s(1), tol));
  out.push_back(check_mse("layer:conv1d", {{3, 12}, {conv1d(3, 4, 5)}}, s(2), tol));
  out.push_back(check_mse("layer:conv1d-stride2", {{3, 13}, {conv1d(3, 4, 3, 2)}}, s(3), tol));
  out.push_back(check_mse("layer:conv_transpose1d", {{3, 8}, {conv_transpose1d(3, 4, 5)}}, s(4), tol));
  out.push_back(check_mse("layer:conv_transpose1d-stride2", {{3, 6}, {conv_transpose1d(3, 2, 3, 2)}}, s(5), tol));
  out.push_back(check_mse("layer:relu", {{6}, {dense(6, 8), relu()}}, s(6), tol));
  out.push_back(check_mse("layer:maxpool1d", {{3, 12}, {conv1d(3, 4, 3), maxpool1d(2)}}, s(7), tol));
  out.push_back(check_mse("layer:upsample1d", {{3, 8}, {conv1d(3, 2, 3), upsample1d(2)}}, s(8), tol));
  out.push_back(check_mse("layer:global_avg_pool", {{3, 10}, {conv1d(3, 4, 3), global_avg_pool()}}, s(9), tol));
  out.push_back(check_mse("layer:reshape", {{6}, {dense(6, 8), reshape(2, 4), conv1d(2, 3, 3)}}, s(10), tol));
  out.push_back(check_mse("layer:l2_normalize", {{6}, {dense(6, 5), l2_normalize()}}, s(11), tol));
  out.push_back(check_mse("layer:winner_take_all", {{6}, {dense(6, 8), winner_take_all(0.25)}}, s(12), tol));

  out.push_back(check_cross_entropy("loss:cross_entropy", {{6}, {dense(6, 2)}}, s(20), tol));
  out.push_back(check_mse("loss:mse", {{6}, {dense(6, 3)}}, s(21), tol));
  out.push_back(check_triplet("loss:triplet_cosine", {{6}, {dense(6, 4)}}, s(22), tol));

  out.push_back(check_cross_entropy("model:classifier", classifier_spec(32), s(30), tol, kModelStep));
  out.push_back(check_triplet("model:embedding", embedding_spec(32, 8), s(31), tol, kModelStep));
  auto joint = wta::wta_encoder_spec(24, 8, 0.25);
  const auto decoder = wta::wta_decoder_spec(24, 8);
  joint.layers.insert(joint.layers.end(), decoder.layers.begin(), decoder.layers.end());
  out.push_back(check_mse("model:wta_autoencoder", joint, s(32), tol, kModelStep));
  return out;
}

}  // namespace ads::audit
