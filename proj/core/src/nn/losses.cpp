#include "ads/nn/losses.hpp"

#include <algorithm>
#include <cmath>

#include "ads/error.hpp"

namespace ads::nn {

namespace {

void require_finite(const Tensor& t, const char* what) {
  for (double v : t.values()) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, std::string(what) + " contains NaN/Inf");
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// d cos(u, v) / du accumulated into `out` with weight `scale`.
void add_cos_grad(std::span<const double> u, std::span<const double> v, double scale, std::span<double> out) {
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  const double c = dot(u, v) / (nu * nv);
  for (std::size_t i = 0; i < u.size(); ++i) {
    out[i] += scale * (v[i] / (nu * nv) - c * u[i] / (nu * nu));
  }
}

}  // namespace

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 2) throw Error(ErrorCode::ShapeMismatch, "softmax expects [B, K]");
  Tensor out(logits.shape());
  for (std::size_t b = 0; b < logits.batch(); ++b) {
    auto z = logits.row(b);
    auto p = out.row(b);
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) s += (p[k] = std::exp(z[k] - m));
    for (auto& v : p) v /= s;
  }
  return out;
}

LossResult cross_entropy_loss(const Tensor& logits, std::span<const int> labels) {
  if (logits.rank() != 2 || logits.batch() != labels.size()) {
    throw Error(ErrorCode::ShapeMismatch, "cross entropy expects [B, K] logits and B labels");
  }
  require_finite(logits, "logits");
  const std::size_t B = logits.batch(), K = logits.dim(1);
  LossResult r{0.0, Tensor(logits.shape())};
  for (std::size_t b = 0; b < B; ++b) {
    const auto label = static_cast<std::size_t>(labels[b]);
    if (labels[b] < 0 || label >= K) throw Error(ErrorCode::InvalidArgument, "label out of range");
    auto z = logits.row(b);
    auto g = r.grad.row(b);
    const auto arg = static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    const double m = z[arg];
    double others = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (k != arg) others += std::exp(z[k] - m);
    }
    // log-sum-exp = m + log1p(others); keeps precision for confident rows.
    const double lse = m + std::log1p(others);
    r.loss += (m - z[label]) + std::log1p(others);
    for (std::size_t k = 0; k < K; ++k) {
      g[k] = (std::exp(z[k] - lse) - (k == label ? 1.0 : 0.0)) / static_cast<double>(B);
    }
  }
  r.loss /= static_cast<double>(B);
  return r;
}

LossResult mse_loss(const Tensor& prediction, const Tensor& target) {
  if (prediction.shape() != target.shape()) throw Error(ErrorCode::ShapeMismatch, "mse shapes differ");
  LossResult r{0.0, Tensor(prediction.shape())};
  const auto n = static_cast<double>(prediction.size());
  for (std::size_t i = 0; i < prediction.size(); ++i) {
    const double d = prediction[i] - target[i];
    r.loss += d * d;
    r.grad[i] = 2.0 * d / n;
  }
  r.loss /= n;
  if (!std::isfinite(r.loss)) throw Error(ErrorCode::NonFinite, "mse loss is not finite");
  return r;
}

double cosine_similarity(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw Error(ErrorCode::LengthMismatch, "cosine of vectors with different lengths");
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  if (!(nu > 0.0) || !(nv > 0.0)) throw Error(ErrorCode::ZeroVector, "cosine similarity of a zero vector");
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

double triplet_cosine(std::span<const double> anchor, std::span<const double> positive,
                      std::span<const double> negative, double margin) {
  return std::max(cosine_similarity(anchor, negative) - cosine_similarity(anchor, positive) + margin, 0.0);
}

TripletLossResult triplet_cosine_loss(const Tensor& anchor, const Tensor& positive, const Tensor& negative,
                                      double margin) {
  if (anchor.shape() != positive.shape() || anchor.shape() != negative.shape() || anchor.rank() != 2) {
    throw Error(ErrorCode::ShapeMismatch, "triplet embeddings must share one [B, d] shape");
  }
  const std::size_t B = anchor.batch();
  TripletLossResult r{0.0, Tensor(anchor.shape()), Tensor(anchor.shape()), Tensor(anchor.shape())};
  if (B == 0) return r;
  const double w = 1.0 / static_cast<double>(B);
  for (std::size_t b = 0; b < B; ++b) {
    auto a = anchor.row(b), p = positive.row(b), n = negative.row(b);
    const double value = cosine_similarity(a, n) - cosine_similarity(a, p) + margin;
    if (value <= 0.0) continue;
    r.loss += value;
    add_cos_grad(a, n, w, r.grad_anchor.row(b));
    add_cos_grad(a, p, -w, r.grad_anchor.row(b));
    add_cos_grad(n, a, w, r.grad_negative.row(b));
    add_cos_grad(p, a, -w, r.grad_positive.row(b));
  }
  r.loss *= w;
  return r;
}

}  // namespace ads::nn
