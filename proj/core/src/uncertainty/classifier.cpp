#include "ads/uncertainty/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ads/error.hpp"
#include "ads/nn/batch.hpp"
#include "ads/nn/losses.hpp"

namespace ads::uncertainty {

nn::Model train_classifier(const data::Dataset& samples, std::span<const data::ClassLabel> labels,
                           const ClassifierConfig& config, std::uint64_t seed, const nn::Model* warm_start) {
  if (labels.size() != samples.size()) throw Error(ErrorCode::LengthMismatch, "one label per sample");
  if (config.batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch_size must be positive");
  const auto abnormal = std::count(labels.begin(), labels.end(), data::ClassLabel::Abnormal);
  if (abnormal == 0 || abnormal == static_cast<std::ptrdiff_t>(labels.size())) {
    throw Error(ErrorCode::SingleClass, "classifier training needs both classes");
  }

  nn::Model model = warm_start ? *warm_start : nn::Model(nn::classifier_spec(samples.window()), derive_seed(seed, 1));
  nn::AdamState state;
  Rng rng(derive_seed(seed, 2));
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<int> batch_labels;
  const std::size_t batches = (order.size() + config.batch_size - 1) / config.batch_size;
  const std::size_t epochs = std::max(config.epochs, (config.min_steps + batches - 1) / batches);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
      const std::size_t end = std::min(order.size(), begin + config.batch_size);
      const auto idx = std::span(order).subspan(begin, end - begin);
      batch_labels.clear();
      for (auto i : idx) batch_labels.push_back(static_cast<int>(labels[i]));

      model.zero_grad();
      const auto logits = model.forward(nn::to_batch(samples, idx));
      const auto loss = nn::cross_entropy_loss(logits, batch_labels);
      if (!std::isfinite(loss.loss)) throw Error(ErrorCode::Diverged, "classifier loss is not finite");
      (void)model.backward(loss.grad);
      auto params = model.params();
      nn::adam_step(params, state, config.adam);
    }
  }
  return model;
}

std::vector<ProbRow> predict_proba(const nn::Model& model, const data::Dataset& samples, std::size_t batch_size) {
  if (batch_size == 0) batch_size = 1;
  std::vector<ProbRow> rows;
  rows.reserve(samples.size());
  for (std::size_t begin = 0; begin < samples.size(); begin += batch_size) {
    const std::size_t end = std::min(samples.size(), begin + batch_size);
    std::vector<std::size_t> idx(end - begin);
    std::iota(idx.begin(), idx.end(), begin);
    const auto probs = nn::softmax(model.infer(nn::to_batch(samples, idx)));
    for (std::size_t b = 0; b < probs.batch(); ++b) {
      double p1 = std::clamp(probs[b * 2 + 1], nn::kProbFloor, 1.0 - nn::kProbFloor);
      rows.push_back({1.0 - p1, p1});
    }
  }
  return rows;
}

double entropy(const ProbRow& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

double binary_entropy(double q) { return entropy({1.0 - q, q}); }

std::vector<double> entropy_scores(std::span<const ProbRow> rows) {
  std::vector<double> u(rows.size());
  std::transform(rows.begin(), rows.end(), u.begin(), [](const ProbRow& p) { return entropy(p); });
  return u;
}

Metrics metrics_from_confusion(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const auto total = static_cast<double>(c.tp + c.fp + c.fn + c.tn);
  m.accuracy = total > 0 ? static_cast<double>(c.tp + c.tn) / total : 0.0;
  const auto denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
  m.f1 = denom > 0 ? 2.0 * static_cast<double>(c.tp) / denom : 0.0;
  return m;
}

Metrics metrics_from_predictions(std::span<const data::ClassLabel> predicted,
                                 std::span<const data::ClassLabel> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::LengthMismatch, "one prediction per label");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool pred_pos = predicted[i] == data::ClassLabel::Abnormal;
    const bool true_pos = truth[i] == data::ClassLabel::Abnormal;
    if (pred_pos && true_pos) ++c.tp;
    else if (pred_pos) ++c.fp;
    else if (true_pos) ++c.fn;
    else ++c.tn;
  }
  return metrics_from_confusion(c);
}

std::vector<data::ClassLabel> predict(const nn::Model& model, const data::Dataset& samples) {
  const auto rows = predict_proba(model, samples);
  std::vector<data::ClassLabel> out(rows.size());
  std::transform(rows.begin(), rows.end(), out.begin(), [](const ProbRow& p) {
    return p[1] > p[0] ? data::ClassLabel::Abnormal : data::ClassLabel::Normal;
  });
  return out;
}

Metrics evaluate(const nn::Model& model, const data::Dataset& test, std::span<const data::ClassLabel> labels) {
  if (test.empty()) throw Error(ErrorCode::InsufficientData, "empty test set");
  return metrics_from_predictions(predict(model, test), labels);
}

}  // namespace ads::uncertainty
