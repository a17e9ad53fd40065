#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ads/data/dataset.hpp"
#include "ads/loop/config.hpp"
#include "ads/loop/report.hpp"

namespace ads::loop {

inline constexpr std::size_t kAblationCycleCounts[] = {2,  4,  5,  8,  10, 16,  20,  25,
                                                       32, 40, 50, 80, 100, 160, 200, 400};

struct AblationCell {
  bool cl = true;  // ads when set, ads-no-cl otherwise
  std::size_t budget = 800;
  double init_fraction = 0.2;
  std::size_t cycles = 5;      // effective count, ceil(budget / per_cycle)
  std::size_t per_cycle = 80;  // ceil(budget / requested cycles)
  std::uint64_t seed = 0;

  friend bool operator==(const AblationCell&, const AblationCell&) = default;
};

struct AblationGrid {
  std::vector<std::size_t> budgets{800};
  std::vector<double> init_fractions{0.2};
  std::vector<std::size_t> cycle_counts{std::begin(kAblationCycleCounts), std::end(kAblationCycleCounts)};
  std::vector<bool> cl{true, false};
  std::vector<std::uint64_t> seeds{0};

  // Cartesian product in (seed, init, budget, cl, cycles) order. Throws InvalidConfig.
  std::vector<AblationCell> cells() const;
};

void to_json(nlohmann::json& j, const AblationGrid& g);
// Missing keys keep their defaults.
void from_json(const nlohmann::json& j, AblationGrid& g);

// The run configuration of one cell on top of `base`.
ExperimentConfig cell_config(const ExperimentConfig& base, const AblationCell& cell);

struct AblationResult {
  AblationCell cell;
  RunReport report;
};

struct AblationOptions {
  std::size_t jobs = 1;
  // Called after each finished cell, from worker threads, serialized.
  std::function<void(const AblationResult&, std::size_t done, std::size_t total)> on_result;
};

// Runs every cell with a simulated oracle. The initial annotation and the
// trained augmenter/theta_s are shared by all cells with the same seed and
// init fraction. Results come back in cells() order.
std::vector<AblationResult> run_ablation(const AblationGrid& grid, const ExperimentConfig& base,
                                         const data::Dataset& normalized, const data::ProvenanceStore& provenance,
                                         const AblationOptions& options = {});

inline constexpr char kSweepCsvHeader[] = "setting,cl,budget,init_pct,per_cycle,seed,pctL,accuracy,f1";

// Throws IoFailure.
void write_sweep_csv(const std::filesystem::path& path, const std::vector<AblationResult>& results);

struct SweepRow {
  std::string setting;
  AblationCell cell;
  double pct_l = 0.0;
  double accuracy = 0.0;
  double f1 = 0.0;
};

// Throws IoFailure.
std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path);
SweepRow sweep_row(const AblationResult& result);

}  // namespace ads::loop
