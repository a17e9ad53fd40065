#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ads/data/dataset.hpp"
#include "ads/nn/adam.hpp"
#include "ads/nn/model.hpp"
#include "ads/wta/autoencoder.hpp"

namespace ads::contrastive {

inline constexpr double kDefaultMargin = 0.2;
inline constexpr double kDefaultTopFraction = 0.25;

struct Triplet {
  data::Sample anchor;
  data::Sample positive;  // decoded augmentation of the anchor
  data::Sample negative;
  wta::Augmentation kind = wta::Augmentation::Gaussian;
};

// Triplet i uses anchor i mod |S| and augmentation (i / |S|) mod 2, so each
// anchor appears with both augmentations once count reaches 2|S|. Negatives are
// drawn uniformly from labeled_L. Throws EmptyNegativePool and
// InsufficientData (no anchors).
std::vector<Triplet> build_triplets(const data::Dataset& labeled_S, const data::Dataset& labeled_L,
                          const wta::WtaAutoencoder& wta, std::size_t count, std::uint64_t seed,
                          wta::MaskMode mode = wta::MaskMode::Printed);

struct SimilarityConfig {
  std::size_t embedding_dim = 16;
  double margin = kDefaultMargin;
  std::size_t epochs = 40;
  std::size_t batch_size = 32;
  nn::AdamConfig adam{};
  // Triplets per epoch = augmentations_per_anchor * |S|.
  std::size_t augmentations_per_anchor = 2;
  // Redraw augmentations and negatives every epoch instead of once.
  bool resample_each_epoch = true;
  wta::MaskMode mask_mode = wta::MaskMode::Printed;

  friend bool operator==(const SimilarityConfig&, const SimilarityConfig&) = default;
};

struct SimilarityTrainLog {
  std::vector<double> epoch_loss;
};

// Trains theta_s on a fixed triplet set. Throws Diverged, InsufficientData.
nn::Model train_similarity_model(std::span<const Triplet> triplets, const SimilarityConfig& config, std::uint64_t seed,
                                 SimilarityTrainLog* log = nullptr);

// Trains theta_s from labeled S/L data, building triplets with the WTA
// augmenter (once, or per epoch when config.resample_each_epoch).
nn::Model train_similarity_model(const data::Dataset& labeled_S, const data::Dataset& labeled_L,
                                 const wta::WtaAutoencoder& wta, const SimilarityConfig& config,
                                 std::uint64_t seed, SimilarityTrainLog* log = nullptr);

// Mean batch triplet loss of a model over a triplet set (no training).
double triplet_set_loss(const nn::Model& model, std::span<const Triplet> triplets, double margin);

// Row embeddings Z_s of every sample in `samples`, [N, d].
nn::Tensor embed(const nn::Model& model, const data::Dataset& samples, std::size_t batch_size = 256);

// s_i = max_j cos(F^L_j, F^U_i) over rows of precomputed embeddings.
// Throws EmptyLabeledPool, LengthMismatch (embedding widths differ).
std::vector<double> similarity_scores(const nn::Tensor& labeled_embeddings, const nn::Tensor& unlabeled_embeddings);

std::vector<double> similarity_scores(const nn::Model& model, const data::Dataset& labeled,
                                      const data::Dataset& unlabeled);

// Indicator of the n largest entries, ties toward the lower index.
std::vector<int> locmax(std::span<const double> values, std::size_t n);

// locmax with n = floor(w * d_u). Throws InvalidArgument (w outside (0, 1])
// and ZeroBudget.
std::vector<int> binarize_topw(std::span<const double> s_prime, double w);

// Smallest w' >= w with floor(w' * d_u) >= min_count (capped at 1).
double adjusted_top_fraction(double w, std::size_t d_u, std::size_t min_count);

}  // namespace ads::contrastive
