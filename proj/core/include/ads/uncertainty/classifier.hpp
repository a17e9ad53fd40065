#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ads/data/dataset.hpp"
#include "ads/nn/adam.hpp"
#include "ads/nn/model.hpp"

namespace ads::uncertainty {

using ProbRow = std::array<double, 2>;

struct ClassifierConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  // Small labeled sets get extra epochs until this many Adam steps are taken.
  std::size_t min_steps = 1200;
  nn::AdamConfig adam{.lr = 3e-3};

  friend bool operator==(const ClassifierConfig&, const ClassifierConfig&) = default;
};

// Cross-entropy training of theta_u from a fresh initialization, or continuing
// from `warm_start` when given. Throws SingleClass, Diverged, LengthMismatch.
nn::Model train_classifier(const data::Dataset& samples, std::span<const data::ClassLabel> labels,
                           const ClassifierConfig& config, std::uint64_t seed,
                           const nn::Model* warm_start = nullptr);

// Softmax rows clamped into [kProbFloor, 1 - kProbFloor] and renormalized.
std::vector<ProbRow> predict_proba(const nn::Model& model, const data::Dataset& samples,
                                   std::size_t batch_size = 256);

// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(const ProbRow& p);
// Binary entropy of probability q in bits.
double binary_entropy(double q);
std::vector<double> entropy_scores(std::span<const ProbRow> rows);

struct Confusion {
  std::size_t tp = 0;  // abnormal predicted abnormal
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Metrics {
  double accuracy = 0.0;
  double f1 = 0.0;  // abnormal is the positive class
  Confusion confusion{};

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

Metrics metrics_from_confusion(const Confusion& c);
Metrics metrics_from_predictions(std::span<const data::ClassLabel> predicted,
                                 std::span<const data::ClassLabel> truth);

std::vector<data::ClassLabel> predict(const nn::Model& model, const data::Dataset& samples);

// Throws InsufficientData on an empty test set.
Metrics evaluate(const nn::Model& model, const data::Dataset& test, std::span<const data::ClassLabel> labels);

}  // namespace ads::uncertainty
