#include "ads/wta/autoencoder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ads/error.hpp"
#include "ads/nn/batch.hpp"
#include "ads/nn/checkpoint.hpp"
#include "ads/nn/losses.hpp"

namespace ads::wta {

namespace {

constexpr std::size_t kKernel = 5;
constexpr std::size_t kTrunkChannels = 16;

std::size_t trunk_length(std::size_t window) { return (window - (kKernel - 1)) / 2 - (kKernel - 1); }

void check_window(std::size_t window) {
  if (window < 20 || window % 2 != 0) {
    throw Error(ErrorCode::InvalidArgument, "WTA autoencoder needs an even window >= 20");
  }
}

}  // namespace

std::string_view to_string(MaskMode mode) { return mode == MaskMode::Printed ? "printed" : "prose"; }

MaskMode parse_mask_mode(std::string_view text) {
  if (text == "printed") return MaskMode::Printed;
  if (text == "prose") return MaskMode::Prose;
  throw Error(ErrorCode::InvalidConfig, "mask_mode must be printed|prose, got '" + std::string(text) + "'");
}

nn::ModelSpec wta_encoder_spec(std::size_t window, std::size_t latent_dim, double sparsity) {
  check_window(window);
  const std::size_t flat = kTrunkChannels * trunk_length(window);
  return nn::ModelSpec{
      .input = {data::kChannels, window},
      .layers = {nn::conv1d(data::kChannels, 8, kKernel), nn::relu(), nn::maxpool1d(2),
                 nn::conv1d(8, kTrunkChannels, kKernel), nn::relu(), nn::dense(flat, latent_dim), nn::relu(),
                 nn::winner_take_all(sparsity)},
  };
}

nn::ModelSpec wta_decoder_spec(std::size_t window, std::size_t latent_dim) {
  check_window(window);
  const std::size_t len = trunk_length(window);
  return nn::ModelSpec{
      .input = {latent_dim},
      .layers = {nn::dense(latent_dim, kTrunkChannels * len), nn::relu(), nn::reshape(kTrunkChannels, len),
                 nn::conv_transpose1d(kTrunkChannels, 8, kKernel), nn::relu(), nn::upsample1d(2),
                 nn::conv_transpose1d(8, data::kChannels, kKernel)},
  };
}

WtaAutoencoder::WtaAutoencoder(std::size_t window, std::size_t latent_dim, double sparsity, std::uint64_t seed)
    : encoder_(wta_encoder_spec(window, latent_dim, sparsity), derive_seed(seed, 1)),
      decoder_(wta_decoder_spec(window, latent_dim), derive_seed(seed, 2)),
      latent_dim_(latent_dim),
      window_(window),
      sparsity_(sparsity) {}

WtaAutoencoder::WtaAutoencoder(nn::Model encoder, nn::Model decoder, double sparsity)
    : encoder_(std::move(encoder)), decoder_(std::move(decoder)), sparsity_(sparsity) {
  const auto& in = encoder_.spec().input;
  if (in.size() != 2 || decoder_.spec().output_shape() != in ||
      encoder_.spec().output_shape() != decoder_.spec().input) {
    throw Error(ErrorCode::ShapeMismatch, "encoder and decoder do not compose");
  }
  window_ = in[1];
  latent_dim_ = decoder_.spec().input.at(0);
}

double WtaAutoencoder::reconstruction_mse(const nn::Tensor& batch) const {
  return nn::mse_loss(reconstruct(batch), batch).loss;
}

double WtaAutoencoder::train_step(const nn::Tensor& batch, nn::AdamState& encoder_state,
                                  nn::AdamState& decoder_state, const nn::AdamConfig& adam) {
  encoder_.zero_grad();
  decoder_.zero_grad();
  const auto latent = encoder_.forward(batch);
  const auto recon = decoder_.forward(latent);
  const auto loss = nn::mse_loss(recon, batch);
  if (!std::isfinite(loss.loss)) throw Error(ErrorCode::Diverged, "WTA reconstruction loss is not finite");
  const auto grad_latent = decoder_.backward(loss.grad);
  (void)encoder_.backward(grad_latent);
  auto enc = encoder_.params();
  auto dec = decoder_.params();
  nn::adam_step(enc, encoder_state, adam);
  nn::adam_step(dec, decoder_state, adam);
  return loss.loss;
}

WtaAutoencoder train_wta(const data::Dataset& samples, const WtaConfig& config, std::uint64_t seed) {
  if (samples.empty()) throw Error(ErrorCode::InsufficientData, "no samples to train the WTA autoencoder");
  if (config.batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be positive");
  WtaAutoencoder ae(samples.window(), config.latent_dim, config.sparsity, seed);
  nn::AdamState enc_state, dec_state;
  Rng rng(derive_seed(seed, 3));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const auto batch = nn::to_batch(samples, std::span(order).subspan(begin, end - begin));
      total += ae.train_step(batch, enc_state, dec_state, config.adam) * static_cast<double>(end - begin);
    }
    spdlog::debug("wta epoch {} mse {:.6f}", epoch, total / static_cast<double>(order.size()));
  }
  return ae;
}

double latent_sd(std::span<const double> y) {
  if (y.empty()) return 0.0;
  const double n = static_cast<double>(y.size());
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / n);
}

std::vector<double> augment_gaussian(std::span<const double> y, Rng& rng, MaskMode mode) {
  const double sd = latent_sd(y);
  const double mean = y.empty() ? 0.0 : std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(y.begin(), y.end());
  for (std::size_t j = 0; j < y.size(); ++j) {
    // One draw per component regardless of the mask keeps the stream aligned.
    const double r = normal(rng);
    const bool masked = mode == MaskMode::Printed ? y[j] > sd : std::abs(y[j] - mean) > sd;
    if (masked) out[j] += r * sd / 5.0;
  }
  return out;
}

std::vector<double> augment_gaussian(std::span<const double> y, std::uint64_t seed, MaskMode mode) {
  Rng rng(seed);
  return augment_gaussian(y, rng, mode);
}

std::vector<double> augment_threshold(std::span<const double> y) {
  const double sd = latent_sd(y);
  std::vector<double> out(y.size());
  for (std::size_t j = 0; j < y.size(); ++j) out[j] = y[j] * std::abs(y[j]) > sd ? 1.0 : 0.0;
  return out;
}

nn::Tensor augment_batch(const WtaAutoencoder& wta, const nn::Tensor& batch, std::span<const Augmentation> kinds,
                         std::span<const std::uint64_t> seeds, MaskMode mode) {
  if (kinds.size() != batch.batch() || seeds.size() != batch.batch()) {
    throw Error(ErrorCode::LengthMismatch, "one augmentation kind and seed per batch row");
  }
  auto latent = wta.encode(batch);
  for (std::size_t b = 0; b < latent.batch(); ++b) {
    auto row = latent.row(b);
    const auto aug = kinds[b] == Augmentation::Gaussian ? augment_gaussian(row, seeds[b], mode)
                                                        : augment_threshold(row);
    std::copy(aug.begin(), aug.end(), row.begin());
  }
  return wta.decode(latent);
}

PositivePair make_positive_pair(const data::Sample& sample, const WtaAutoencoder& wta, std::uint64_t seed,
                                MaskMode mode) {
  const data::Sample* ptrs[] = {&sample, &sample};
  const auto batch = nn::to_batch(ptrs, sample.window());
  const Augmentation kinds[] = {Augmentation::Gaussian, Augmentation::Threshold};
  const std::uint64_t seeds[] = {seed, seed};
  const auto out = augment_batch(wta, batch, kinds, seeds, mode);
  return {nn::from_batch_row(out, 0, sample.id), nn::from_batch_row(out, 1, sample.id)};
}

void save_wta(const std::filesystem::path& stem, const WtaAutoencoder& wta) {
  nn::ModelSpec joint = wta.encoder().spec();
  const auto& dec = wta.decoder().spec().layers;
  joint.layers.insert(joint.layers.end(), dec.begin(), dec.end());
  nn::Model model(joint, 0);
  auto values = wta.encoder().flat_values();
  const auto dv = wta.decoder().flat_values();
  values.insert(values.end(), dv.begin(), dv.end());
  model.set_flat_values(values);
  nlohmann::json extra;
  extra["wta"] = {{"sparsity", wta.sparsity()},
                  {"latent_dim", wta.latent_dim()},
                  {"encoder_layers", wta.encoder().spec().layers.size()}};
  nn::save_checkpoint(stem, model, extra);
}

WtaAutoencoder load_wta(const std::filesystem::path& stem) {
  auto loaded = nn::load_checkpoint(stem);
  if (!loaded.sidecar.contains("wta")) throw Error(ErrorCode::IoFailure, "checkpoint has no wta section");
  const auto& w = loaded.sidecar.at("wta");
  const auto split = w.at("encoder_layers").get<std::size_t>();
  const auto latent = w.at("latent_dim").get<std::size_t>();
  const auto& joint = loaded.model.spec();
  if (split > joint.layers.size()) throw Error(ErrorCode::IoFailure, "bad encoder_layers in wta section");

  nn::ModelSpec enc_spec{.input = joint.input, .layers = {joint.layers.begin(), joint.layers.begin() + split}};
  nn::ModelSpec dec_spec{.input = {latent}, .layers = {joint.layers.begin() + split, joint.layers.end()}};
  nn::Model enc(enc_spec, 0), dec(dec_spec, 0);
  const auto values = loaded.model.flat_values();
  const auto ne = enc.num_params();
  enc.set_flat_values(std::span(values).first(ne));
  dec.set_flat_values(std::span(values).subspan(ne));
  return WtaAutoencoder(std::move(enc), std::move(dec), w.at("sparsity").get<double>());
}

}  // namespace ads::wta
