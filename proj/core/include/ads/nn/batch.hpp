#pragma once

#include <span>

#include "ads/data/dataset.hpp"
#include "ads/nn/tensor.hpp"

namespace ads::nn {

// Packs (T, 3) row-major samples into a channel-first [B, 3, T] batch.
Tensor to_batch(std::span<const data::Sample* const> samples, std::size_t window);
Tensor to_batch(const data::Dataset& dataset, std::span<const std::size_t> indices);
Tensor to_batch(const data::Dataset& dataset);

// Inverse of to_batch for one row of a [B, 3, T] tensor.
data::Sample from_batch_row(const Tensor& batch, std::size_t row, data::SampleId id);

}  // namespace ads::nn
