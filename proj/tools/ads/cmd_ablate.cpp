#include <iostream>
#include <map>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ads/error.hpp"
#include "ads/loop/ablation.hpp"
#include "ads/util/manifest.hpp"
#include "common.hpp"

namespace ads::cli {

namespace fs = std::filesystem;

namespace {

struct AblateFlags {
  ExperimentFlags experiment;
  fs::path data_dir;
  fs::path out;
  fs::path grid_file;
  std::vector<std::size_t> budgets;
  std::vector<double> inits;
  std::vector<std::size_t> cycle_counts;
  std::vector<std::uint64_t> seeds;
  std::string cl = "both";
  std::size_t jobs = 1;
};

// Cycle selection uses a lighter classifier than the final model so the
// 400-cycle cells stay affordable.
uncertainty::ClassifierConfig light_cycle_classifier(const uncertainty::ClassifierConfig& full) {
  auto c = full;
  c.epochs = 10;
  c.min_steps = 300;
  return c;
}

}  // namespace

void add_ablate(CLI::App& app, Context& ctx, int& rc) {
  auto f = std::make_shared<AblateFlags>();
  auto* cmd = app.add_subcommand("ablate", "Sweep CL on/off over cycle counts, budgets and initial fractions");
  cmd->add_option("--data", f->data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--out", f->out, "Output directory")->required();
  cmd->add_option("--grid", f->grid_file, "Grid JSON {budgets, init_fractions, cycle_counts, cl, seeds}")
      ->check(CLI::ExistingFile);
  cmd->add_option("--budgets", f->budgets, "Total query budgets (default 800 600)")->check(CLI::PositiveNumber);
  cmd->add_option("--inits", f->inits, "Initial fractions (default 0.2 0.15)")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--cycle-counts", f->cycle_counts, "Requested cycle counts (default the 16-value sweep)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seeds", f->seeds, "Seeds (default --seed)");
  cmd->add_option("--cl", f->cl, "on | off | both")->check(CLI::IsMember({"on", "off", "both"}));
  cmd->add_option("--jobs", f->jobs, "Cells run concurrently")->check(CLI::PositiveNumber);
  f->experiment.add_to(*cmd, false);

  cmd->callback([&ctx, &rc, f] {
    auto base = f->experiment.build();
    if (!base.cycle_classifier) base.cycle_classifier = light_cycle_classifier(base.classifier);

    loop::AblationGrid grid;
    grid.budgets = {800, 600};
    grid.init_fractions = {0.2, 0.15};
    grid.seeds = {base.seed};
    if (!f->grid_file.empty()) grid = read_json_file(f->grid_file).get<loop::AblationGrid>();
    if (!f->budgets.empty()) grid.budgets = f->budgets;
    if (!f->inits.empty()) grid.init_fractions = f->inits;
    if (!f->cycle_counts.empty()) grid.cycle_counts = f->cycle_counts;
    if (!f->seeds.empty()) grid.seeds = f->seeds;
    if (f->cl == "on") grid.cl = {true};
    if (f->cl == "off") grid.cl = {false};
    try {
      (void)grid.cells();
    } catch (const Error& e) {
      throw CLI::ValidationError("grid", e.what());
    }

    const auto data = load_data(f->data_dir);
    loop::AblationOptions options;
    options.jobs = f->jobs;
    options.on_result = [](const loop::AblationResult& r, std::size_t done, std::size_t total) {
      spdlog::info("[{}/{}] {} budget {} init {} per-cycle {} seed {}: acc {:.4f} %L {:.2f}", done, total,
                   r.cell.cl ? "cl" : "no-cl", r.cell.budget, r.cell.init_fraction, r.cell.per_cycle, r.cell.seed,
                   r.report.final_metrics.accuracy, r.report.pct_l.value_or(0.0));
    };
    const auto results = loop::run_ablation(grid, base, data.normalized, data.provenance, options);

    fs::create_directories(f->out);
    loop::write_sweep_csv(f->out / "sweep.csv", results);
    write_json_file(f->out / "grid.json", grid);
    write_json_file(f->out / "config.json", base);
    const std::vector<fs::path> files{"sweep.csv", "grid.json", "config.json"};
    util::write_manifest(f->out, invocation("ablate", ctx.argv), files);

    std::vector<std::vector<std::string>> rows;
    for (const auto& r : results) {
      rows.push_back({r.cell.cl ? "cl" : "no-cl", std::to_string(r.cell.budget),
                      fixed(100.0 * r.cell.init_fraction, 0), std::to_string(r.cell.per_cycle),
                      std::to_string(r.cell.cycles), std::to_string(r.cell.seed),
                      fixed(r.report.pct_l.value_or(0.0), 2), fixed(r.report.final_metrics.accuracy),
                      fixed(r.report.final_metrics.f1)});
    }
    std::cout << markdown_table({"CL", "Budget", "Init %", "Per cycle", "Cycles", "Seed", "%L", "Accuracy", "F1"},
                                rows);
    rc = 0;
  });
}

}  // namespace ads::cli
