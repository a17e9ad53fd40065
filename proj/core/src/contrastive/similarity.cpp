#include "ads/contrastive/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <spdlog/spdlog.h>

#include "ads/error.hpp"
#include "ads/nn/batch.hpp"
#include "ads/nn/losses.hpp"

namespace ads::contrastive {

namespace {

constexpr std::size_t kAugmentChunk = 256;

struct TripletBatch {
  nn::Tensor stacked;  // [3B, 3, T]: anchors, positives, negatives
  std::size_t size = 0;
};

TripletBatch stack_triplets(std::span<const Triplet> triplets, std::span<const std::size_t> order,
                            std::size_t window) {
  std::vector<const data::Sample*> ptrs;
  ptrs.reserve(3 * order.size());
  for (auto i : order) ptrs.push_back(&triplets[i].anchor);
  for (auto i : order) ptrs.push_back(&triplets[i].positive);
  for (auto i : order) ptrs.push_back(&triplets[i].negative);
  return {nn::to_batch(ptrs, window), order.size()};
}

double train_epoch(nn::Model& model, nn::AdamState& state, std::span<const Triplet> triplets,
                   const SimilarityConfig& config, Rng& rng) {
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const std::size_t window = triplets.front().anchor.window();
  double total = 0.0;
  for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
    const std::size_t end = std::min(order.size(), begin + config.batch_size);
    const auto batch = stack_triplets(triplets, std::span(order).subspan(begin, end - begin), window);
    const std::size_t B = batch.size;

    model.zero_grad();
    const auto emb = model.forward(batch.stacked);
    const auto a = emb.slice_rows(0, B), p = emb.slice_rows(B, 2 * B), n = emb.slice_rows(2 * B, 3 * B);
    const auto loss = nn::triplet_cosine_loss(a, p, n, config.margin);
    if (!std::isfinite(loss.loss)) throw Error(ErrorCode::Diverged, "triplet loss is not finite");
    const nn::Tensor* parts[] = {&loss.grad_anchor, &loss.grad_positive, &loss.grad_negative};
    (void)model.backward(nn::Tensor::concat_rows(parts));
    auto params = model.params();
    nn::adam_step(params, state, config.adam);
    total += loss.loss * static_cast<double>(B);
  }
  return total / static_cast<double>(order.size());
}

void check_config(const SimilarityConfig& config) {
  if (config.batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be positive");
  if (!(config.margin > 0.0)) throw Error(ErrorCode::InvalidConfig, "triplet margin must be positive");
  if (config.embedding_dim == 0) throw Error(ErrorCode::InvalidConfig, "embedding_dim must be positive");
}

}  // namespace

std::vector<Triplet> build_triplets(const data::Dataset& labeled_S, const data::Dataset& labeled_L,
                                    const wta::WtaAutoencoder& wta, std::size_t count, std::uint64_t seed,
                                    wta::MaskMode mode) {
  if (labeled_L.empty()) throw Error(ErrorCode::EmptyNegativePool, "no labeled L samples to use as negatives");
  if (labeled_S.empty()) throw Error(ErrorCode::InsufficientData, "no labeled S samples to use as anchors");
  const std::size_t nS = labeled_S.size();
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, labeled_L.size() - 1);

  std::vector<Triplet> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].anchor = labeled_S[i % nS];
    out[i].negative = labeled_L[pick(rng)];
    out[i].kind = (i / nS) % 2 == 0 ? wta::Augmentation::Gaussian : wta::Augmentation::Threshold;
  }
  for (std::size_t begin = 0; begin < count; begin += kAugmentChunk) {
    const std::size_t end = std::min(count, begin + kAugmentChunk);
    std::vector<const data::Sample*> ptrs;
    std::vector<wta::Augmentation> kinds;
    std::vector<std::uint64_t> seeds;
    for (std::size_t i = begin; i < end; ++i) {
      ptrs.push_back(&out[i].anchor);
      kinds.push_back(out[i].kind);
      seeds.push_back(derive_seed(seed, stream::kAugment, i));
    }
    const auto decoded = wta::augment_batch(wta, nn::to_batch(ptrs, labeled_S.window()), kinds, seeds, mode);
    for (std::size_t i = begin; i < end; ++i) {
      out[i].positive = nn::from_batch_row(decoded, i - begin, out[i].anchor.id);
    }
  }
  return out;
}

nn::Model train_similarity_model(std::span<const Triplet> triplets, const SimilarityConfig& config,
                                 std::uint64_t seed, SimilarityTrainLog* log) {
  check_config(config);
  if (triplets.empty()) throw Error(ErrorCode::InsufficientData, "no triplets to train on");
  nn::Model model(nn::embedding_spec(triplets.front().anchor.window(), config.embedding_dim), derive_seed(seed, 1));
  nn::AdamState state;
  Rng rng(derive_seed(seed, 2));
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double loss = train_epoch(model, state, triplets, config, rng);
    if (log) log->epoch_loss.push_back(loss);
  }
  return model;
}

nn::Model train_similarity_model(const data::Dataset& labeled_S, const data::Dataset& labeled_L,
                                 const wta::WtaAutoencoder& wta, const SimilarityConfig& config,
                                 std::uint64_t seed, SimilarityTrainLog* log) {
  check_config(config);
  const std::size_t count = config.augmentations_per_anchor * labeled_S.size();
  if (count == 0) throw Error(ErrorCode::InsufficientData, "no triplets to train on");
  auto triplets = build_triplets(labeled_S, labeled_L, wta, count, derive_seed(seed, stream::kTriplets, 0),
                                 config.mask_mode);
  nn::Model model(nn::embedding_spec(labeled_S.window(), config.embedding_dim), derive_seed(seed, 1));
  nn::AdamState state;
  Rng rng(derive_seed(seed, 2));
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.resample_each_epoch && epoch > 0) {
      triplets = build_triplets(labeled_S, labeled_L, wta, count, derive_seed(seed, stream::kTriplets, epoch),
                                config.mask_mode);
    }
    const double loss = train_epoch(model, state, triplets, config, rng);
    if (log) log->epoch_loss.push_back(loss);
    spdlog::debug("similarity epoch {} loss {:.6f}", epoch, loss);
  }
  return model;
}

double triplet_set_loss(const nn::Model& model, std::span<const Triplet> triplets, double margin) {
  if (triplets.empty()) return 0.0;
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto batch = stack_triplets(triplets, order, triplets.front().anchor.window());
  const auto emb = model.infer(batch.stacked);
  const std::size_t B = batch.size;
  return nn::triplet_cosine_loss(emb.slice_rows(0, B), emb.slice_rows(B, 2 * B), emb.slice_rows(2 * B, 3 * B),
                                 margin)
      .loss;
}

nn::Tensor embed(const nn::Model& model, const data::Dataset& samples, std::size_t batch_size) {
  if (batch_size == 0) batch_size = 1;
  std::vector<nn::Tensor> parts;
  for (std::size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const std::size_t end = std::min(samples.size(), begin + batch_size);
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    parts.push_back(model.infer(nn::to_batch(samples, idx)));
  }
  if (parts.empty()) return nn::Tensor({0, model.spec().output_shape().at(0)});
  std::vector<const nn::Tensor*> ptrs;
  for (const auto& p : parts) ptrs.push_back(&p);
  return nn::Tensor::concat_rows(ptrs);
}

std::vector<double> similarity_scores(const nn::Tensor& labeled_embeddings, const nn::Tensor& unlabeled_embeddings) {
  if (labeled_embeddings.batch() == 0) throw Error(ErrorCode::EmptyLabeledPool, "no labeled reference samples");
  if (unlabeled_embeddings.batch() > 0 && labeled_embeddings.row_size() != unlabeled_embeddings.row_size()) {
    throw Error(ErrorCode::LengthMismatch, "embedding widths differ");
  }
  std::vector<double> s(unlabeled_embeddings.batch(), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto u = unlabeled_embeddings.row(i);
    for (std::size_t j = 0; j < labeled_embeddings.batch(); ++j) {
      s[i] = std::max(s[i], nn::cosine_similarity(labeled_embeddings.row(j), u));
    }
  }
  return s;
}

std::vector<double> similarity_scores(const nn::Model& model, const data::Dataset& labeled,
                                      const data::Dataset& unlabeled) {
  if (labeled.empty()) throw Error(ErrorCode::EmptyLabeledPool, "no labeled reference samples");
  return similarity_scores(embed(model, labeled), embed(model, unlabeled));
}

std::vector<int> locmax(std::span<const double> values, std::size_t n) {
  std::vector<int> flags(values.size(), 0);
  n = std::min(n, values.size());
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
  for (std::size_t k = 0; k < n; ++k) flags[idx[k]] = 1;
  return flags;
}

std::vector<int> binarize_topw(std::span<const double> s_prime, double w) {
  if (!(w > 0.0 && w <= 1.0)) throw Error(ErrorCode::InvalidArgument, "w must lie in (0, 1]");
  const auto n = static_cast<std::size_t>(std::floor(w * static_cast<double>(s_prime.size())));
  if (n == 0) throw Error(ErrorCode::ZeroBudget, "floor(w * d_u) is zero");
  return locmax(s_prime, n);
}

double adjusted_top_fraction(double w, std::size_t d_u, std::size_t min_count) {
  if (d_u == 0) return w;
  const auto n = static_cast<double>(d_u);
  if (std::floor(w * n) >= static_cast<double>(min_count)) return w;
  if (min_count >= d_u) return 1.0;
  double adjusted = static_cast<double>(min_count) / n;
  while (std::floor(adjusted * n) < static_cast<double>(min_count)) adjusted = std::nextafter(adjusted, 2.0);
  return std::min(adjusted, 1.0);
}

}  // namespace ads::contrastive
