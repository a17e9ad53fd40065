#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ads/data/dataset.hpp"
#include "ads/loop/config.hpp"
#include "ads/loop/oracle.hpp"
#include "ads/uncertainty/classifier.hpp"

namespace ads::loop {

struct ScoreRow {
  data::SampleId id = 0;
  double s_prime = 0.0;
  int s_binary = 0;
  double u = 0.0;
  double j = 0.0;

  friend bool operator==(const ScoreRow&, const ScoreRow&) = default;
};

struct CycleRecord {
  int cycle = 0;
  std::size_t labeled_before = 0;
  std::size_t train_size = 0;  // 0 when no classifier was trained this cycle
  double w_used = 0.0;
  std::size_t shortfall = 0;
  std::size_t selected_s0 = 0;
  std::optional<bool> pareto_passed;
  // Evaluation of the classifier that scored this cycle.
  std::optional<uncertainty::Metrics> metrics;
  std::vector<QueryRow> queries;
  std::vector<ScoreRow> scores;  // every unlabeled candidate, pool order
  // Filled by the evaluation layer from hidden provenance.
  std::optional<double> pct_l;

  friend bool operator==(const CycleRecord&, const CycleRecord&) = default;
};

struct RunReport {
  ExperimentConfig config{};
  std::size_t pool_size = 0;
  std::size_t test_size = 0;
  std::size_t initial_labeled = 0;
  std::size_t initial_s = 0;
  std::size_t initial_l = 0;
  std::vector<CycleRecord> cycles;
  std::size_t final_train_size = 0;
  std::size_t final_labeled = 0;
  uncertainty::Metrics final_metrics{};
  std::optional<double> pct_l;
  std::optional<std::size_t> queried_l;

  std::vector<data::SampleId> queried_ids() const;
  // Percentage of the whole pool (labeled + unlabeled) that was labeled.
  double pct_data() const;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// 100 * |queried from L1| / |queried|. Throws EmptyHistory, UnknownId.
double compute_pct_l(std::span<const data::SampleId> query_history, const data::ProvenanceStore& provenance);

// Evaluation layer: fills every pct_l field of the report.
void attach_pct_l(RunReport& report, const data::ProvenanceStore& provenance);

void to_json(nlohmann::json& j, const ScoreRow& r);
// Scores are left out of the JSON form (they go to scores_cycle_<k>.csv);
// from_json reads them back when a "scores" array is present.
void to_json(nlohmann::json& j, const CycleRecord& r);
void from_json(const nlohmann::json& j, CycleRecord& r);
void to_json(nlohmann::json& j, const RunReport& r);
void from_json(const nlohmann::json& j, RunReport& r);
nlohmann::json metrics_json(const uncertainty::Metrics& m);

void write_scores_csv(const std::filesystem::path& path, std::span<const ScoreRow> rows);
void write_queries_csv(const std::filesystem::path& path, std::span<const QueryRow> rows);

// report.json, cycles.csv, eval.json and the per-cycle scores/queries CSVs.
// Returns the files written, relative to dir.
std::vector<std::filesystem::path> write_run_outputs(const std::filesystem::path& dir, const RunReport& report);

RunReport read_report(const std::filesystem::path& report_json);

}  // namespace ads::loop
