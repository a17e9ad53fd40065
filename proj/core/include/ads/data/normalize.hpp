#pragma once

#include <array>

#include "ads/data/dataset.hpp"

namespace ads::data {

struct ChannelRange {
  double min = 0.0;
  double max = 1.0;
};

using ChannelRanges = std::array<ChannelRange, kChannels>;

struct Normalized {
  Dataset dataset;
  ChannelRanges ranges{};
  // Set for channels whose max == min; such channels are mapped to zeros.
  std::array<bool, kChannels> constant_channel{};

  bool degenerate() const { return constant_channel[0] || constant_channel[1] || constant_channel[2]; }
};

// Global per-channel min-max scaling into [0, 1] over the whole dataset.
Normalized normalize_minmax(const Dataset& dataset);

// Applies previously computed ranges (e.g. read back from meta.json).
Dataset apply_minmax(const Dataset& dataset, const ChannelRanges& ranges);

Dataset invert_minmax(const Dataset& normalized, const ChannelRanges& ranges);

}  // namespace ads::data
