#pragma once

#include <span>

#include "ads/nn/tensor.hpp"

namespace ads::nn {

// Probability clamp applied before any log of a predicted probability.
inline constexpr double kProbFloor = 1e-12;

// Row-wise softmax of [B, K] logits.
Tensor softmax(const Tensor& logits);

struct LossResult {
  double loss = 0.0;
  Tensor grad;  // d(loss)/d(input), same shape as the input
};

// Mean over the batch of -log softmax(logits)[label]. Throws NonFinite.
LossResult cross_entropy_loss(const Tensor& logits, std::span<const int> labels);

// Mean squared error over all elements.
LossResult mse_loss(const Tensor& prediction, const Tensor& target);

// u.v / (|u||v|). Throws ZeroVector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

// max(cos(a, n) - cos(a, p) + margin, 0) for one triplet.
double triplet_cosine(std::span<const double> anchor, std::span<const double> positive,
                      std::span<const double> negative, double margin);

struct TripletLossResult {
  double loss = 0.0;
  Tensor grad_anchor;
  Tensor grad_positive;
  Tensor grad_negative;
};

// Batch mean of triplet_cosine over rows of [B, d] embeddings. Rows exactly on
// the clamp boundary receive zero gradient.
TripletLossResult triplet_cosine_loss(const Tensor& anchor, const Tensor& positive, const Tensor& negative,
                                      double margin);

}  // namespace ads::nn
