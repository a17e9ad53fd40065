#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ads/contrastive/similarity.hpp"
#include "ads/uncertainty/classifier.hpp"
#include "ads/wta/autoencoder.hpp"

namespace ads::loop {

enum class Setting { Supervised, RandomS, RandomSL, AdsNoCl, Ads };

inline constexpr Setting kAllSettings[] = {Setting::Supervised, Setting::RandomS, Setting::RandomSL,
                                           Setting::AdsNoCl, Setting::Ads};

std::string_view to_string(Setting s);
Setting parse_setting(std::string_view text);

// Which labeled samples the classifier trains on.
enum class TrainSet {
  SAttributed,  // initial S annotations plus everything queried
  AllLabeled,   // every labeled sample, including initial L annotations
};

std::string_view to_string(TrainSet t);
TrainSet parse_train_set(std::string_view text);

struct ExperimentConfig {
  Setting setting = Setting::Ads;
  std::uint64_t seed = 0;
  // Seed of the held-out test split; the run seed when unset.
  std::optional<std::uint64_t> split_seed;
  double test_fraction = 0.2;
  double init_fraction = 0.2;
  int num_strata = 10;
  // Total queried on top of the initial annotation. Zero means cycles * per_cycle.
  std::size_t total_query_budget = 0;
  std::size_t cycles = 5;
  std::size_t samples_per_cycle = 80;
  double w = contrastive::kDefaultTopFraction;
  // Unset means the setting's default (ads: SAttributed, others: AllLabeled).
  std::optional<TrainSet> train_set;
  bool warm_start_classifier = false;
  bool retrain_similarity_each_cycle = false;
  // Replace the binarized similarity by all ones (diagnostic; ads only).
  bool force_s_binary_ones = false;
  // Keep per-cycle score vectors in the report (needed for scores CSVs).
  bool keep_scores = true;

  uncertainty::ClassifierConfig classifier{};
  // Per-cycle theta_u used only for selection; `classifier` when unset. The
  // final model always uses `classifier`.
  std::optional<uncertainty::ClassifierConfig> cycle_classifier;
  contrastive::SimilarityConfig similarity{};
  wta::WtaConfig wta{};

  std::uint64_t effective_split_seed() const { return split_seed.value_or(seed); }
  std::size_t budget() const { return total_query_budget == 0 ? cycles * samples_per_cycle : total_query_budget; }
  TrainSet effective_train_set() const;
  bool uses_similarity() const { return setting == Setting::Ads; }
  bool is_active() const { return setting == Setting::Ads || setting == Setting::AdsNoCl; }

  // Per-cycle query counts. Either cycles * per_cycle == budget, or the last
  // cycle is truncated (cycles == ceil(budget / per_cycle)). Throws InvalidConfig.
  std::vector<std::size_t> schedule() const;
  // Throws InvalidConfig.
  void validate() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
// Missing keys keep their defaults, so a partial file acts as overrides.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

}  // namespace ads::loop
