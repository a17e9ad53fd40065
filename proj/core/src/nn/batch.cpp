#include "ads/nn/batch.hpp"

#include <numeric>

#include "ads/error.hpp"

namespace ads::nn {

Tensor to_batch(std::span<const data::Sample* const> samples, std::size_t window) {
  constexpr std::size_t C = data::kChannels;
  Tensor out({samples.size(), C, window});
  for (std::size_t b = 0; b < samples.size(); ++b) {
    const auto& s = *samples[b];
    if (s.window() != window) throw Error(ErrorCode::ShapeMismatch, "sample window differs from batch window");
    double* dst = out.data() + b * C * window;
    for (std::size_t t = 0; t < window; ++t) {
      for (std::size_t ch = 0; ch < C; ++ch) dst[ch * window + t] = s.at(t, ch);
    }
  }
  return out;
}

Tensor to_batch(const data::Dataset& dataset, std::span<const std::size_t> indices) {
  std::vector<const data::Sample*> ptrs;
  ptrs.reserve(indices.size());
  for (auto i : indices) ptrs.push_back(&dataset[i]);
  return to_batch(ptrs, dataset.window());
}

Tensor to_batch(const data::Dataset& dataset) {
  std::vector<std::size_t> all(dataset.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return to_batch(dataset, all);
}

data::Sample from_batch_row(const Tensor& batch, std::size_t row, data::SampleId id) {
  constexpr std::size_t C = data::kChannels;
  if (batch.rank() != 3 || batch.dim(1) != C) throw Error(ErrorCode::ShapeMismatch, "expected [B, 3, T]");
  const std::size_t T = batch.dim(2);
  data::Sample s;
  s.id = id;
  s.signal.resize(T * C);
  const double* src = batch.data() + row * C * T;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t ch = 0; ch < C; ++ch) s.at(t, ch) = src[ch * T + t];
  }
  return s;
}

}  // namespace ads::nn
