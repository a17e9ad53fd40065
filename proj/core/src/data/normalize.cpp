#include "ads/data/normalize.hpp"

#include <algorithm>
#include <limits>

#include <spdlog/spdlog.h>

#include "ads/error.hpp"

namespace ads::data {

Normalized normalize_minmax(const Dataset& dataset) {
  if (dataset.empty()) throw Error(ErrorCode::InsufficientData, "cannot normalize an empty dataset");

  Normalized out;
  for (std::size_t ch = 0; ch < kChannels; ++ch) {
    out.ranges[ch] = {std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  }
  for (const auto& s : dataset.samples()) {
    for (std::size_t t = 0; t < s.window(); ++t) {
      for (std::size_t ch = 0; ch < kChannels; ++ch) {
        out.ranges[ch].min = std::min(out.ranges[ch].min, s.at(t, ch));
        out.ranges[ch].max = std::max(out.ranges[ch].max, s.at(t, ch));
      }
    }
  }
  for (std::size_t ch = 0; ch < kChannels; ++ch) {
    out.constant_channel[ch] = !(out.ranges[ch].max > out.ranges[ch].min);
    if (out.constant_channel[ch]) {
      spdlog::warn("ConstantChannel: channel {} is constant ({}); mapped to zeros", ch, out.ranges[ch].min);
    }
  }
  out.dataset = apply_minmax(dataset, out.ranges);
  return out;
}

Dataset apply_minmax(const Dataset& dataset, const ChannelRanges& ranges) {
  std::vector<Sample> samples = dataset.samples();
  for (auto& s : samples) {
    for (std::size_t t = 0; t < s.window(); ++t) {
      for (std::size_t ch = 0; ch < kChannels; ++ch) {
        const double span = ranges[ch].max - ranges[ch].min;
        double& v = s.at(t, ch);
        v = span > 0.0 ? (v - ranges[ch].min) / span : 0.0;
      }
    }
  }
  return Dataset(dataset.window(), std::move(samples));
}

Dataset invert_minmax(const Dataset& normalized, const ChannelRanges& ranges) {
  std::vector<Sample> samples = normalized.samples();
  for (auto& s : samples) {
    for (std::size_t t = 0; t < s.window(); ++t) {
      for (std::size_t ch = 0; ch < kChannels; ++ch) {
        double& v = s.at(t, ch);
        v = ranges[ch].min + v * (ranges[ch].max - ranges[ch].min);
      }
    }
  }
  return Dataset(normalized.window(), std::move(samples));
}

}  // namespace ads::data
