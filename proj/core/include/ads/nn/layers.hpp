#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "ads/nn/tensor.hpp"
#include "ads/random.hpp"

namespace ads::nn {

enum class LayerKind {
  Conv1d,
  ConvTranspose1d,
  Dense,
  ReLU,
  MaxPool1d,
  Upsample1d,
  GlobalAvgPool,
  Reshape,
  L2Normalize,
  WinnerTakeAll,
};

std::string_view to_string(LayerKind kind);
LayerKind parse_layer_kind(std::string_view name);

// Descriptor used both to build a layer and to serialize it. Only the fields
// relevant to `kind` are meaningful.
struct LayerSpec {
  LayerKind kind = LayerKind::ReLU;
  std::size_t in = 0;       // input channels / features
  std::size_t out = 0;      // output channels / features
  std::size_t kernel = 0;
  std::size_t stride = 1;
  std::size_t factor = 2;   // pooling / upsampling factor
  std::size_t channels = 0; // reshape target
  std::size_t length = 0;   // reshape target
  double sparsity = 1.0;    // fraction of winners kept by WinnerTakeAll

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

LayerSpec conv1d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride = 1);
LayerSpec conv_transpose1d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride = 1);
LayerSpec dense(std::size_t in, std::size_t out);
LayerSpec relu();
LayerSpec maxpool1d(std::size_t factor = 2);
LayerSpec upsample1d(std::size_t factor = 2);
LayerSpec global_avg_pool();
LayerSpec reshape(std::size_t channels, std::size_t length);
LayerSpec l2_normalize();
LayerSpec winner_take_all(double sparsity);

// Number of winners kept for an n-wide activation at the given sparsity.
std::size_t wta_winners(std::size_t n, double sparsity);

// A layer maps a batch [B, ...] to a batch [B, ...]. forward() keeps the input
// so that backward() can recompute whatever it needs; infer() is the const,
// cache-free path used for scoring.
class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(spec) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }

  virtual Tensor infer(const Tensor& in) const = 0;
  Tensor forward(const Tensor& in) {
    cached_input_ = in;
    return infer(in);
  }
  // Accumulates parameter gradients and returns d(loss)/d(input).
  virtual Tensor backward(const Tensor& grad_out) = 0;

  // Per-sample output shape for a per-sample input shape; throws ShapeMismatch.
  virtual Shape output_shape(const Shape& in) const = 0;

  virtual std::vector<ParamTensor*> params() { return {}; }
  virtual void initialize(Rng& /*rng*/) {}
  virtual std::unique_ptr<Layer> clone() const = 0;

 protected:
  LayerSpec spec_;
  Tensor cached_input_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

}  // namespace ads::nn
