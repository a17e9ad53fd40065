#include "ads/loop/ablation.hpp"

#include <atomic>
#include <algorithm>
#include <exception>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "ads/error.hpp"
#include "ads/loop/engine.hpp"
#include "ads/loop/oracle.hpp"
#include "ads/util/csv.hpp"

namespace ads::loop {

using nlohmann::json;

std::vector<AblationCell> AblationGrid::cells() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (budgets.empty() || init_fractions.empty() || cycle_counts.empty() || cl.empty() || seeds.empty()) {
    fail("ablation grid has an empty axis");
  }
  std::vector<AblationCell> out;
  for (auto seed : seeds) {
    for (double init : init_fractions) {
      for (auto budget : budgets) {
        if (budget == 0) fail("ablation budget must be positive");
        for (bool with_cl : cl) {
          for (auto requested : cycle_counts) {
            if (requested == 0 || requested > budget) fail("cycle count must lie in [1, budget]");
            AblationCell c;
            c.cl = with_cl;
            c.budget = budget;
            c.init_fraction = init;
            c.per_cycle = (budget + requested - 1) / requested;
            c.cycles = (budget + c.per_cycle - 1) / c.per_cycle;
            c.seed = seed;
            out.push_back(c);
          }
        }
      }
    }
  }
  return out;
}

void to_json(json& j, const AblationGrid& g) {
  j = {{"budgets", g.budgets},
       {"init_fractions", g.init_fractions},
       {"cycle_counts", g.cycle_counts},
       {"cl", g.cl},
       {"seeds", g.seeds}};
}

void from_json(const json& j, AblationGrid& g) {
  try {
    g.budgets = j.value("budgets", g.budgets);
    g.init_fractions = j.value("init_fractions", g.init_fractions);
    g.cycle_counts = j.value("cycle_counts", g.cycle_counts);
    g.cl = j.value("cl", g.cl);
    g.seeds = j.value("seeds", g.seeds);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("ablation grid: ") + e.what());
  }
}

ExperimentConfig cell_config(const ExperimentConfig& base, const AblationCell& cell) {
  ExperimentConfig c = base;
  c.setting = cell.cl ? Setting::Ads : Setting::AdsNoCl;
  c.seed = cell.seed;
  c.init_fraction = cell.init_fraction;
  c.total_query_budget = cell.budget;
  c.cycles = cell.cycles;
  c.samples_per_cycle = cell.per_cycle;
  c.validate();
  return c;
}

namespace {

// Everything a cell can reuse from another cell with the same seed and init
// fraction.
struct SharedStart {
  std::once_flag init_once;
  std::once_flag artifacts_once;
  ExperimentData data;
  RunState state;
  std::shared_ptr<const SimilarityArtifacts> artifacts;
};

}  // namespace

std::vector<AblationResult> run_ablation(const AblationGrid& grid, const ExperimentConfig& base,
                                         const data::Dataset& normalized, const data::ProvenanceStore& provenance,
                                         const AblationOptions& options) {
  const auto cells = grid.cells();
  std::map<std::pair<std::uint64_t, double>, std::unique_ptr<SharedStart>> shared;
  for (const auto& c : cells) {
    auto& slot = shared[{c.seed, c.init_fraction}];
    if (!slot) slot = std::make_unique<SharedStart>();
  }

  std::vector<std::optional<RunReport>> reports(cells.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex mu;
  std::size_t done = 0;

  auto worker = [&] {
    while (!failed) {
      const std::size_t i = next++;
      if (i >= cells.size()) return;
      try {
        const auto config = cell_config(base, cells[i]);
        auto& start = *shared.at({cells[i].seed, cells[i].init_fraction});
        SimulatedOracle oracle(provenance);
        std::call_once(start.init_once, [&] {
          start.data = make_experiment_data(normalized, provenance, config);
          start.state = initialize_run(config, start.data, oracle);
        });
        std::shared_ptr<const SimilarityArtifacts> artifacts;
        if (config.uses_similarity() && !config.retrain_similarity_each_cycle) {
          std::call_once(start.artifacts_once, [&] {
            start.artifacts = std::make_shared<const SimilarityArtifacts>(
                train_artifacts(config, start.data, start.state));
          });
          artifacts = start.artifacts;
        }
        auto report = continue_run(config, start.data, oracle, start.state, artifacts);
        attach_pct_l(report, provenance);

        std::lock_guard lock(mu);
        reports[i] = std::move(report);
        ++done;
        if (options.on_result) options.on_result({cells[i], *reports[i]}, done, cells.size());
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, cells.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < jobs; ++k) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  std::vector<AblationResult> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) out.push_back({cells[i], std::move(*reports[i])});
  return out;
}

SweepRow sweep_row(const AblationResult& result) {
  SweepRow row;
  row.setting = std::string(to_string(result.cell.cl ? Setting::Ads : Setting::AdsNoCl));
  row.cell = result.cell;
  row.pct_l = result.report.pct_l.value_or(0.0);
  row.accuracy = result.report.final_metrics.accuracy;
  row.f1 = result.report.final_metrics.f1;
  return row;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<AblationResult>& results) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << kSweepCsvHeader << '\n';
  for (const auto& r : results) {
    const auto row = sweep_row(r);
    out << row.setting << ',' << (row.cell.cl ? 1 : 0) << ',' << row.cell.budget << ','
        << util::format_double(100.0 * row.cell.init_fraction) << ',' << row.cell.per_cycle << ','
        << row.cell.seed << ',' << util::format_double(row.pct_l) << ',' << util::format_double(row.accuracy)
        << ',' << util::format_double(row.f1) << '\n';
  }
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

std::vector<SweepRow> read_sweep_csv(const std::filesystem::path& path) {
  std::vector<SweepRow> rows;
  util::read_csv(path, kSweepCsvHeader, [&](const std::vector<std::string_view>& f) {
    if (f.size() != 9) throw Error(ErrorCode::IoFailure, "sweep.csv row needs 9 fields");
    SweepRow r;
    r.setting = std::string(f[0]);
    r.cell.cl = util::parse_int(f[1]) != 0;
    r.cell.budget = static_cast<std::size_t>(util::parse_int(f[2]));
    r.cell.init_fraction = util::parse_double(f[3]) / 100.0;
    r.cell.per_cycle = static_cast<std::size_t>(util::parse_int(f[4]));
    r.cell.cycles = r.cell.per_cycle == 0 ? 0 : (r.cell.budget + r.cell.per_cycle - 1) / r.cell.per_cycle;
    r.cell.seed = static_cast<std::uint64_t>(util::parse_int(f[5]));
    r.pct_l = util::parse_double(f[6]);
    r.accuracy = util::parse_double(f[7]);
    r.f1 = util::parse_double(f[8]);
    rows.push_back(std::move(r));
  });
  return rows;
}

}  // namespace ads::loop
