#include "ads/data/lhs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "ads/error.hpp"
#include "ads/random.hpp"

namespace ads::data {

SummaryFeatures summary_features(const Sample& sample) {
  SummaryFeatures f{};
  const auto n = static_cast<double>(sample.window());
  for (std::size_t ch = 0; ch < kChannels; ++ch) {
    double mean = 0.0;
    for (std::size_t t = 0; t < sample.window(); ++t) mean += sample.at(t, ch);
    mean /= n;
    double var = 0.0;
    for (std::size_t t = 0; t < sample.window(); ++t) {
      const double d = sample.at(t, ch) - mean;
      var += d * d;
    }
    f[ch] = mean;
    f[kChannels + ch] = std::sqrt(var / n);
  }
  return f;
}

std::vector<std::array<int, kSummaryDims>> quantile_bins(const Dataset& dataset, int num_strata) {
  const std::size_t n = dataset.size();
  std::vector<SummaryFeatures> features;
  features.reserve(n);
  for (const auto& s : dataset.samples()) features.push_back(summary_features(s));

  std::vector<std::array<int, kSummaryDims>> bins(n);
  std::vector<std::size_t> order(n);
  for (std::size_t d = 0; d < kSummaryDims; ++d) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return features[a][d] < features[b][d]; });
    for (std::size_t rank = 0; rank < n; ++rank) {
      bins[order[rank]][d] = static_cast<int>(rank * static_cast<std::size_t>(num_strata) / n);
    }
  }
  return bins;
}

std::vector<SampleId> lhs_initial_sample(const Dataset& dataset, double fraction, int num_strata,
                                         std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "LHS fraction must lie in (0, 1)");
  }
  const double target = fraction * static_cast<double>(dataset.size());
  if (target < 1.0) throw Error(ErrorCode::InsufficientData, "fraction * |dataset| < 1");
  const auto budget = static_cast<std::size_t>(std::floor(target));
  if (num_strata < 1 || static_cast<std::size_t>(num_strata) > budget) {
    throw Error(ErrorCode::InvalidArgument, "need 1 <= num_strata <= floor(fraction * |dataset|)");
  }

  const auto bins = quantile_bins(dataset, num_strata);
  const auto k = static_cast<std::size_t>(num_strata);

  // Members of each first-dimension stratum; fraction < 1 guarantees every
  // stratum keeps at least ceil(budget / k) members.
  std::vector<std::vector<std::size_t>> by_primary(k);
  std::map<std::array<int, kSummaryDims>, std::vector<std::size_t>> by_cell;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    by_primary[static_cast<std::size_t>(bins[i][0])].push_back(i);
    by_cell[bins[i]].push_back(i);
  }

  Rng rng(derive_seed(seed, stream::kLhs));
  std::vector<bool> taken(dataset.size(), false);
  std::vector<SampleId> picked;
  picked.reserve(budget);

  auto draw_free = [&](const std::vector<std::size_t>& members) -> std::optional<std::size_t> {
    std::vector<std::size_t> free;
    for (auto m : members) {
      if (!taken[m]) free.push_back(m);
    }
    if (free.empty()) return std::nullopt;
    std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
    return free[pick(rng)];
  };

  std::array<std::vector<int>, kSummaryDims> perm;
  while (picked.size() < budget) {
    for (auto& p : perm) {
      p.resize(k);
      std::iota(p.begin(), p.end(), 0);
      std::shuffle(p.begin(), p.end(), rng);
    }
    const std::size_t round = std::min(k, budget - picked.size());
    for (std::size_t c = 0; c < round; ++c) {
      std::array<int, kSummaryDims> cell{};
      for (std::size_t d = 0; d < kSummaryDims; ++d) cell[d] = perm[d][c];

      std::optional<std::size_t> choice;
      if (auto it = by_cell.find(cell); it != by_cell.end()) choice = draw_free(it->second);
      if (!choice) {
        // Nearest free member inside the design's first-dimension stratum.
        int best = std::numeric_limits<int>::max();
        std::vector<std::size_t> nearest;
        for (auto m : by_primary[static_cast<std::size_t>(cell[0])]) {
          if (taken[m]) continue;
          int dist = 0;
          for (std::size_t d = 1; d < kSummaryDims; ++d) dist += std::abs(bins[m][d] - cell[d]);
          if (dist < best) {
            best = dist;
            nearest.clear();
          }
          if (dist == best) nearest.push_back(m);
        }
        choice = draw_free(nearest);
      }
      if (!choice) {
        throw Error(ErrorCode::InsufficientData, "LHS stratum exhausted");
      }
      taken[*choice] = true;
      picked.push_back(dataset[*choice].id);
    }
  }
  return picked;
}

}  // namespace ads::data
