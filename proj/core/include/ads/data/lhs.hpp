#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ads/data/dataset.hpp"

namespace ads::data {

inline constexpr int kDefaultStrata = 10;
inline constexpr std::size_t kSummaryDims = 2 * kChannels;

// Per-channel mean followed by per-channel population standard deviation.
using SummaryFeatures = std::array<double, kSummaryDims>;

SummaryFeatures summary_features(const Sample& sample);

// Equal-probability quantile bin of every sample in every summary dimension,
// indexed [sample][dim]. Ranks are taken with ties broken by dataset order.
std::vector<std::array<int, kSummaryDims>> quantile_bins(const Dataset& dataset, int num_strata);

// Latin hypercube selection of floor(fraction * |dataset|) sample ids.
//
// The summary space is cut into num_strata quantile bins per dimension. Picks
// are made in rounds of num_strata: each round draws an independent random
// permutation of bins per dimension, giving num_strata design cells whose
// projections cover every bin exactly once. For each design cell the sampler
// takes a uniformly random unselected member of the cell; if the cell is empty
// it restricts to the design bin of the first (stratifying) dimension and
// takes the member nearest in bin-index distance over the other dimensions.
// The stratifying dimension therefore receives floor(n/k) or ceil(n/k) picks
// per bin, while the remaining dimensions stay close to balanced.
std::vector<SampleId> lhs_initial_sample(const Dataset& dataset, double fraction,
                                         int num_strata, std::uint64_t seed);

}  // namespace ads::data
