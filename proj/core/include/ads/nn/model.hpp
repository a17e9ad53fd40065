#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ads/nn/layers.hpp"
#include "ads/nn/tensor.hpp"

namespace ads::nn {

struct ModelSpec {
  Shape input;  // per-sample input shape, e.g. {3, 64}
  std::vector<LayerSpec> layers;

  // Per-sample output shape; throws ShapeMismatch if adjacent layers do not compose.
  Shape output_shape() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

void to_json(nlohmann::json& j, const ModelSpec& spec);
void from_json(const nlohmann::json& j, ModelSpec& spec);

// Sequential stack of layers with value semantics: copying a Model copies its
// parameters. A training step (forward/backward/update) must not run
// concurrently with anything else on the same Model; infer() is const and may.
class Model {
 public:
  Model() = default;
  Model(ModelSpec spec, std::uint64_t seed);

  Model(const Model& other);
  Model& operator=(const Model& other);
  Model(Model&&) noexcept = default;
  Model& operator=(Model&&) noexcept = default;

  const ModelSpec& spec() const { return spec_; }
  bool empty() const { return layers_.empty(); }

  Tensor forward(const Tensor& batch);
  Tensor backward(const Tensor& grad_out);
  Tensor infer(const Tensor& batch) const;

  std::vector<ParamTensor*> params();
  std::vector<const ParamTensor*> params() const;
  void zero_grad();
  std::size_t num_params() const;

  std::vector<double> flat_values() const;
  void set_flat_values(std::span<const double> values);

 private:
  void check_input(const Tensor& batch) const;

  ModelSpec spec_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

// conv(3->8,k5) relu maxpool2 conv(8->16,k5) relu gap dense(16->out)
ModelSpec classifier_spec(std::size_t window, std::size_t classes = 2);
// Same trunk with an L2-normalized embedding head.
ModelSpec embedding_spec(std::size_t window, std::size_t embedding_dim = 16);

}  // namespace ads::nn
