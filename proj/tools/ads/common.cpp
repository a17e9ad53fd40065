#include "common.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ads/data/io.hpp"
#include "ads/error.hpp"

namespace ads::cli {

namespace fs = std::filesystem;

void ExperimentFlags::add_to(CLI::App& app, bool with_setting) {
  app.add_option("--config", config_file, "Experiment config JSON; flags override its values")
      ->check(CLI::ExistingFile);
  if (with_setting) {
    app.add_option("--setting", setting, "supervised | random-s | random-s+l | ads-no-cl | ads")
        ->check(CLI::IsMember({"supervised", "random-s", "random-s+l", "ads-no-cl", "ads"}));
  }
  seed_opt = app.add_option("--seed", seed, "Run seed");
  split_seed_opt = app.add_option("--split-seed", split_seed, "Test split seed (default: run seed)");
  cycles_opt = app.add_option("--cycles", cycles, "Query cycles")->check(CLI::PositiveNumber);
  per_cycle_opt = app.add_option("--per-cycle", per_cycle, "Queries per cycle")->check(CLI::PositiveNumber);
  budget_opt = app.add_option("--budget", budget, "Total query budget (default: cycles x per-cycle)")
                   ->check(CLI::PositiveNumber);
  init_opt = app.add_option("--init", init_fraction, "Initial annotation fraction of the pool")
                 ->check(CLI::Range(0.0, 1.0));
  test_opt = app.add_option("--test-fraction", test_fraction, "Held-out fraction of every S machine")
                 ->check(CLI::Range(0.0, 1.0));
  w_opt = app.add_option("--w", w, "Top fraction of the pool kept by binarization")->check(CLI::Range(0.0, 1.0));
  app.add_option("--train-set", train_set, "s-attributed | all-labeled")
      ->check(CLI::IsMember({"s-attributed", "all-labeled"}));
  app.add_flag("--warm-start", warm_start, "Continue the classifier from the previous cycle");
  app.add_flag("--retrain-similarity", retrain_similarity, "Retrain the similarity model every cycle");
  app.add_flag("--no-scores", no_scores, "Do not keep per-cycle score vectors");
}

loop::ExperimentConfig ExperimentFlags::build() const {
  loop::ExperimentConfig c;
  if (!config_file.empty()) c = read_json_file(config_file).get<loop::ExperimentConfig>();
  if (!setting.empty()) c.setting = loop::parse_setting(setting);
  if (*seed_opt) c.seed = seed;
  if (*split_seed_opt) c.split_seed = split_seed;
  if (*cycles_opt) c.cycles = cycles;
  if (*per_cycle_opt) c.samples_per_cycle = per_cycle;
  if (*budget_opt) c.total_query_budget = budget;
  if (*init_opt) c.init_fraction = init_fraction;
  if (*test_opt) c.test_fraction = test_fraction;
  if (*w_opt) c.w = w;
  if (!train_set.empty()) c.train_set = loop::parse_train_set(train_set);
  if (warm_start) c.warm_start_classifier = true;
  if (retrain_similarity) c.retrain_similarity_each_cycle = true;
  if (no_scores) c.keep_scores = false;
  try {
    c.validate();
  } catch (const Error& e) {
    throw CLI::ValidationError("config", e.what());
  }
  return c;
}

LoadedData load_data(const fs::path& dir) {
  return {data::load_normalized(dir).normalized, data::read_provenance(dir)};
}

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const nlohmann::json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

nlohmann::json invocation(const std::string& command, const std::vector<std::string>& argv) {
  return {{"command", command}, {"argv", argv}};
}

std::string markdown_table(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) width[c] = std::max<std::size_t>(header[c].size(), 3);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size() && c < width.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  auto line = [&](const std::vector<std::string>& cells) {
    os << '|';
    for (std::size_t c = 0; c < width.size(); ++c) {
      const std::string& cell = c < cells.size() ? cells[c] : std::string{};
      os << ' ' << (c == 0 ? fmt::format("{:<{}}", cell, width[c]) : fmt::format("{:>{}}", cell, width[c])) << " |";
    }
    os << '\n';
  };
  line(header);
  os << '|';
  for (std::size_t c = 0; c < width.size(); ++c) {
    os << (c == 0 ? std::string(width[c] + 2, '-') : " " + std::string(width[c] - 1, '-') + ": ") << '|';
  }
  os << '\n';
  for (const auto& row : rows) line(row);
  return os.str();
}

std::string fixed(double v, int digits) { return fmt::format("{:.{}f}", v, digits); }

}  // namespace ads::cli
