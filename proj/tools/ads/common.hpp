#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ads/data/dataset.hpp"
#include "ads/loop/config.hpp"

namespace ads::cli {

// Shared experiment flags; each one overrides the --config file only when given.
struct ExperimentFlags {
  std::filesystem::path config_file;
  std::string setting;
  std::uint64_t seed = 0;
  std::uint64_t split_seed = 0;
  std::size_t cycles = 0;
  std::size_t per_cycle = 0;
  std::size_t budget = 0;
  double init_fraction = 0.0;
  double test_fraction = 0.0;
  double w = 0.0;
  std::string train_set;
  bool warm_start = false;
  bool retrain_similarity = false;
  bool no_scores = false;

  CLI::Option* seed_opt = nullptr;
  CLI::Option* split_seed_opt = nullptr;
  CLI::Option* cycles_opt = nullptr;
  CLI::Option* per_cycle_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
  CLI::Option* init_opt = nullptr;
  CLI::Option* test_opt = nullptr;
  CLI::Option* w_opt = nullptr;

  // with_setting adds --setting.
  void add_to(CLI::App& app, bool with_setting);
  // Throws InvalidConfig, IoFailure.
  loop::ExperimentConfig build() const;
};

struct LoadedData {
  data::Dataset normalized;
  data::ProvenanceStore provenance;
};

// Normalized samples plus provenance (the latter for the evaluation layer and
// the simulated oracle only).
LoadedData load_data(const std::filesystem::path& dir);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

// Echo of the command line for manifests.
nlohmann::json invocation(const std::string& command, const std::vector<std::string>& argv);

// Markdown table with right-aligned numeric columns.
std::string markdown_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows);
std::string fixed(double v, int digits = 4);

struct Context {
  std::vector<std::string> argv;
};

void add_generate(CLI::App& app, Context& ctx, int& rc);
void add_run(CLI::App& app, Context& ctx, int& rc);
void add_bench(CLI::App& app, Context& ctx, int& rc);
void add_ablate(CLI::App& app, Context& ctx, int& rc);
void add_serve(CLI::App& app, Context& ctx, int& rc);
void add_gradcheck(CLI::App& app, Context& ctx, int& rc);
void add_report(CLI::App& app, Context& ctx, int& rc);

}  // namespace ads::cli
