#include <cmath>
#include <fstream>
#include <iostream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "ads/error.hpp"
#include "ads/loop/engine.hpp"
#include "ads/loop/report.hpp"
#include "ads/util/manifest.hpp"
#include "common.hpp"

namespace ads::cli {

namespace fs = std::filesystem;

namespace {

// Runs one setting and writes its outputs plus the echoed config to dir.
loop::RunReport run_into(const fs::path& dir, const loop::ExperimentConfig& config, const LoadedData& data,
                         std::vector<fs::path>& files, const fs::path& prefix) {
  spdlog::info("running {} (seed {})", loop::to_string(config.setting), config.seed);
  auto report = loop::run_setting(config.setting, data.normalized, data.provenance, config);
  for (const auto& f : loop::write_run_outputs(dir, report)) files.push_back(prefix / f);
  write_json_file(dir / "config.json", config);
  files.push_back(prefix / "config.json");
  return report;
}

std::string pct_l_text(const loop::RunReport& r) { return r.pct_l ? fixed(*r.pct_l, 2) : "-"; }

struct Stat {
  double mean = 0.0;
  double sd = 0.0;
};

Stat stat(const std::vector<double>& v) {
  Stat s;
  if (v.empty()) return s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() > 1) {
    for (double x : v) s.sd += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(s.sd / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

void add_run(CLI::App& app, Context& ctx, int& rc) {
  auto flags = std::make_shared<ExperimentFlags>();
  auto data_dir = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  auto* cmd = app.add_subcommand("run", "Run one setting and write its report");
  cmd->add_option("--data", *data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--out", *out, "Output directory")->required();
  flags->add_to(*cmd, true);

  cmd->callback([&ctx, &rc, flags, data_dir, out] {
    const auto config = flags->build();
    const auto data = load_data(*data_dir);
    std::vector<fs::path> files;
    const auto report = run_into(*out, config, data, files, {});
    util::write_manifest(*out, invocation("run", ctx.argv), files);
    std::cout << fmt::format("{} accuracy {} f1 {} pctL {}\n", loop::to_string(config.setting),
                             fixed(report.final_metrics.accuracy), fixed(report.final_metrics.f1), pct_l_text(report));
    rc = 0;
  });
}

void add_bench(CLI::App& app, Context& ctx, int& rc) {
  auto flags = std::make_shared<ExperimentFlags>();
  auto data_dir = std::make_shared<fs::path>();
  auto out = std::make_shared<fs::path>();
  auto random_seeds = std::make_shared<std::size_t>(10);
  auto* cmd = app.add_subcommand("bench", "Run all five settings and print the comparison table");
  cmd->add_option("--data", *data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--out", *out, "Output directory")->required();
  cmd->add_option("--random-seeds", *random_seeds, "Repetitions averaged for the random settings")
      ->check(CLI::PositiveNumber);
  flags->add_to(*cmd, false);

  cmd->callback([&ctx, &rc, flags, data_dir, out, random_seeds] {
    const auto base = flags->build();
    const auto data = load_data(*data_dir);
    std::vector<fs::path> files;
    std::vector<std::vector<std::string>> rows;
    fs::create_directories(*out);
    std::ofstream csv(*out / "comparison.csv");
    csv << "setting,runs,accuracy,accuracy_sd,f1,f1_sd,pctL,pctL_sd\n";

    for (const auto setting : loop::kAllSettings) {
      const bool random = setting == loop::Setting::RandomS || setting == loop::Setting::RandomSL;
      const std::size_t runs = random ? *random_seeds : 1;
      std::vector<double> acc, f1, pct_l;
      for (std::size_t r = 0; r < runs; ++r) {
        auto config = base;
        config.setting = setting;
        config.split_seed = base.effective_split_seed();
        config.seed = base.seed + r;
        fs::path prefix = std::string(loop::to_string(setting));
        if (random) prefix /= fmt::format("seed_{}", config.seed);
        const auto report = run_into(*out / prefix, config, data, files, prefix);
        acc.push_back(report.final_metrics.accuracy);
        f1.push_back(report.final_metrics.f1);
        if (report.pct_l) pct_l.push_back(*report.pct_l);
      }
      const auto a = stat(acc), f = stat(f1), l = stat(pct_l);
      const bool has_l = !pct_l.empty();
      csv << fmt::format("{},{},{},{},{},{},{},{}\n", loop::to_string(setting), runs, a.mean, a.sd, f.mean, f.sd,
                         has_l ? fmt::format("{}", l.mean) : "", has_l ? fmt::format("{}", l.sd) : "");
      auto cell = [&](Stat s, int digits) {
        return runs > 1 ? fmt::format("{} ± {}", fixed(s.mean, digits), fixed(s.sd, digits)) : fixed(s.mean, digits);
      };
      rows.push_back({std::string(loop::to_string(setting)), cell(a, 4), cell(f, 4), has_l ? cell(l, 2) : "-"});
    }
    csv.close();
    if (!csv) throw Error(ErrorCode::IoFailure, "cannot write comparison.csv");
    files.emplace_back("comparison.csv");
    util::write_manifest(*out, invocation("bench", ctx.argv), files);
    std::cout << markdown_table({"Setting", "Accuracy", "F1 Score", "%L"}, rows);
    rc = 0;
  });
}

}  // namespace ads::cli
