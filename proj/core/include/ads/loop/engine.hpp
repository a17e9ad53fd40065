#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ads/contrastive/similarity.hpp"
#include "ads/data/dataset.hpp"
#include "ads/data/pool.hpp"
#include "ads/loop/config.hpp"
#include "ads/loop/oracle.hpp"
#include "ads/loop/report.hpp"
#include "ads/wta/autoencoder.hpp"

namespace ads::loop {

// What a run may see: the candidate pool and a held-out test set. Provenance
// stays with the evaluation layer that builds this.
struct ExperimentData {
  data::Dataset pool;
  data::Dataset test;
  std::vector<data::ClassLabel> test_labels;
};

// Held-out ids: test_fraction of every S machine, stratified by class.
std::vector<data::SampleId> split_test_ids(const data::Dataset& dataset, const data::ProvenanceStore& provenance,
                                           double test_fraction, std::uint64_t seed);

// Evaluation layer. The supervised and random-s settings see S machines only.
ExperimentData make_experiment_data(const data::Dataset& normalized, const data::ProvenanceStore& provenance,
                                    const ExperimentConfig& config);

// Mutable state of a run between cycles; enough to resume it.
struct RunState {
  data::Pool pool;
  std::set<data::SampleId> s_attributed;  // labeled ids treated as target-distribution data
  std::set<data::SampleId> initial_l;     // negatives for theta_s
  std::size_t initial_labeled = 0;
  std::size_t cycles_done = 0;
  std::vector<CycleRecord> records;

  friend bool operator==(const RunState&, const RunState&) = default;
};

void to_json(nlohmann::json& j, const RunState& s);
void from_json(const nlohmann::json& j, RunState& s);

// WTA augmenter and theta_s; depend only on the pool and initial annotation.
struct SimilarityArtifacts {
  wta::WtaAutoencoder wta;
  nn::Model model;
};

struct RunHooks {
  // "training" while models are fitted and scored, "done" at the end.
  std::function<void(std::string_view state, int cycle)> on_state;
  // After selection, before the oracle is asked; `record` has queries and scores.
  std::function<void(const CycleRecord& record)> on_selection;
  // After every completed cycle (labels revealed).
  std::function<void(const RunState&, const SimilarityArtifacts*)> on_checkpoint;
};

// LHS initial sample + initial annotation (source and class).
RunState initialize_run(const ExperimentConfig& config, const ExperimentData& data, Oracle& oracle);

SimilarityArtifacts train_artifacts(const ExperimentConfig& config, const ExperimentData& data,
                                    const RunState& state);

// Runs the remaining cycles of `state` and the final evaluation. Pass
// artifacts to reuse a trained augmenter/theta_s; they are trained otherwise.
RunReport continue_run(const ExperimentConfig& config, const ExperimentData& data, Oracle& oracle, RunState state,
                       std::shared_ptr<const SimilarityArtifacts> artifacts = nullptr, const RunHooks& hooks = {});

// Full run of config.setting from scratch.
RunReport run_experiment(const ExperimentConfig& config, const ExperimentData& data, Oracle& oracle,
                         const RunHooks& hooks = {});

// run_experiment with config.setting forced to ads.
RunReport run_ads(ExperimentConfig config, const ExperimentData& data, Oracle& oracle);

// Builds the setting's data view from the full dataset, runs it with a
// simulated oracle and attaches %L.
RunReport run_setting(Setting setting, const data::Dataset& normalized, const data::ProvenanceStore& provenance,
                      ExperimentConfig config);

}  // namespace ads::loop
