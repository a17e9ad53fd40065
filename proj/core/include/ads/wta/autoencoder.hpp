#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

#include "ads/data/dataset.hpp"
#include "ads/nn/adam.hpp"
#include "ads/nn/model.hpp"
#include "ads/random.hpp"

namespace ads::wta {

// Which latent components receive Gaussian noise: `Printed` perturbs
// y_j > sigma_e, `Prose` perturbs |y_j - mean(y)| > sigma_e.
enum class MaskMode { Printed, Prose };

std::string_view to_string(MaskMode mode);
MaskMode parse_mask_mode(std::string_view text);

struct WtaConfig {
  std::size_t latent_dim = 32;
  double sparsity = 0.1;
  std::size_t epochs = 15;
  std::size_t batch_size = 32;
  nn::AdamConfig adam{};

  friend bool operator==(const WtaConfig&, const WtaConfig&) = default;
};

// Encoder: conv trunk -> dense(latent) -> ReLU -> spatial winner-take-all.
// Decoder: dense -> ReLU -> reshape -> transposed convs back to [3, T].
// The decoder mirrors the encoder exactly only for even windows (>= 20).
nn::ModelSpec wta_encoder_spec(std::size_t window, std::size_t latent_dim, double sparsity);
nn::ModelSpec wta_decoder_spec(std::size_t window, std::size_t latent_dim);

class WtaAutoencoder {
 public:
  WtaAutoencoder() = default;
  WtaAutoencoder(std::size_t window, std::size_t latent_dim, double sparsity, std::uint64_t seed);
  WtaAutoencoder(nn::Model encoder, nn::Model decoder, double sparsity);

  std::size_t latent_dim() const { return latent_dim_; }
  double sparsity() const { return sparsity_; }
  std::size_t window() const { return window_; }

  // [B, 3, T] -> [B, n] sparse latent codes.
  nn::Tensor encode(const nn::Tensor& batch) const { return encoder_.infer(batch); }
  // [B, n] -> [B, 3, T].
  nn::Tensor decode(const nn::Tensor& latent) const { return decoder_.infer(latent); }
  nn::Tensor reconstruct(const nn::Tensor& batch) const { return decode(encode(batch)); }
  double reconstruction_mse(const nn::Tensor& batch) const;

  // One joint encoder+decoder step on the reconstruction MSE; returns the loss.
  double train_step(const nn::Tensor& batch, nn::AdamState& encoder_state, nn::AdamState& decoder_state,
                    const nn::AdamConfig& adam);

  nn::Model& encoder() { return encoder_; }
  nn::Model& decoder() { return decoder_; }
  const nn::Model& encoder() const { return encoder_; }
  const nn::Model& decoder() const { return decoder_; }

 private:
  nn::Model encoder_;
  nn::Model decoder_;
  std::size_t latent_dim_ = 0;
  std::size_t window_ = 0;
  double sparsity_ = 1.0;
};

// Unsupervised training on (normalized) samples. Throws Diverged.
WtaAutoencoder train_wta(const data::Dataset& samples, const WtaConfig& config, std::uint64_t seed);

// Population standard deviation of the components of y.
double latent_sd(std::span<const double> y);

std::vector<double> augment_gaussian(std::span<const double> y, Rng& rng, MaskMode mode = MaskMode::Printed);
std::vector<double> augment_gaussian(std::span<const double> y, std::uint64_t seed,
                                     MaskMode mode = MaskMode::Printed);
// Binary indicator of y_j * |y_j| > sigma_e.
std::vector<double> augment_threshold(std::span<const double> y);

enum class Augmentation { Gaussian = 0, Threshold = 1 };

struct PositivePair {
  data::Sample gaussian;
  data::Sample threshold;
};

PositivePair make_positive_pair(const data::Sample& sample, const WtaAutoencoder& wta, std::uint64_t seed,
                                MaskMode mode = MaskMode::Printed);

// Batched form: row b of `batch` is augmented with kinds[b] using the noise
// stream derive_seed(seeds[b]); returns decoded [B, 3, T].
nn::Tensor augment_batch(const WtaAutoencoder& wta, const nn::Tensor& batch, std::span<const Augmentation> kinds,
                         std::span<const std::uint64_t> seeds, MaskMode mode = MaskMode::Printed);

// Checkpoint with a `wta` sidecar section recording sparsity and latent size.
void save_wta(const std::filesystem::path& stem, const WtaAutoencoder& wta);
WtaAutoencoder load_wta(const std::filesystem::path& stem);

}  // namespace ads::wta
