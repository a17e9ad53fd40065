#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ads/data/dataset.hpp"
#include "ads/loop/config.hpp"
#include "ads/loop/engine.hpp"
#include "ads/loop/report.hpp"

namespace ads::service {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::chrono::milliseconds idle_timeout{0};  // 0 waits forever
  // Checkpoints and run outputs; empty disables both.
  std::filesystem::path out_dir;
  bool resume = true;
};

// Run lifecycle as reported by GET /status.
enum class RunPhase { Training, AwaitingLabels, Done, Failed, TimedOut };
std::string_view to_string(RunPhase p);

// Runs one experiment with an interactive oracle behind an HTTP API:
//   GET  /status            {cycle, pending, state, ...}
//   GET  /queries?cycle=k   queried samples of cycle k with their signals
//   POST /labels            {sample_id, label, annotator_id} or {labels: [...]}
//   GET  /report            final RunReport once done
//   GET  /scores?cycle=k    per-sample scores of cycle k
// Responses never carry machine provenance. The initial annotation comes from
// `initial_provenance`, as the one-off expert step before the loop.
class OracleService {
 public:
  OracleService(loop::ExperimentConfig config, loop::ExperimentData data, data::ProvenanceStore initial_provenance,
                ServiceConfig service);
  ~OracleService();
  OracleService(const OracleService&) = delete;
  OracleService& operator=(const OracleService&) = delete;

  // Binds and starts the HTTP listener and the run thread. Throws BindFailure.
  void start();
  int port() const;
  // Blocks until the run leaves the training/awaiting states.
  RunPhase wait();
  void stop();

  RunPhase phase() const;
  std::optional<loop::RunReport> report() const;
  // Error text of a failed or timed-out run.
  std::string error() const;

  // Endpoint bodies, callable without HTTP.
  nlohmann::json status_json() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Checkpoint layout inside out_dir.
std::filesystem::path state_path(const std::filesystem::path& out_dir);
std::filesystem::path wta_stem(const std::filesystem::path& out_dir);
std::filesystem::path similarity_stem(const std::filesystem::path& out_dir);

void save_run_checkpoint(const std::filesystem::path& out_dir, const loop::ExperimentConfig& config,
                         const loop::RunState& state, const loop::SimilarityArtifacts* artifacts);
struct LoadedRun {
  loop::RunState state;
  std::shared_ptr<const loop::SimilarityArtifacts> artifacts;
};
// nullopt when out_dir holds no checkpoint. Throws IoFailure, InvalidConfig
// when the stored config differs from `config`.
std::optional<LoadedRun> load_run_checkpoint(const std::filesystem::path& out_dir,
                                             const loop::ExperimentConfig& config);

}  // namespace ads::service
