#include <algorithm>
#include <iostream>
#include <map>
#include <tuple>

#include <fmt/format.h>

#include "ads/error.hpp"
#include "ads/loop/ablation.hpp"
#include "ads/loop/report.hpp"
#include "common.hpp"

namespace ads::cli {

namespace fs = std::filesystem;

namespace {

struct Inputs {
  std::vector<fs::path> reports;
  std::vector<fs::path> sweeps;
};

// A directory contributes every report.json and sweep.csv below it.
Inputs collect(const std::vector<fs::path>& paths) {
  Inputs in;
  auto add = [&](const fs::path& p) {
    if (p.filename() == "report.json") in.reports.push_back(p);
    if (p.extension() == ".csv" && p.filename() != "cycles.csv") in.sweeps.push_back(p);
  };
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::recursive_directory_iterator(p)) {
        if (e.is_regular_file() && (e.path().filename() == "report.json" || e.path().filename() == "sweep.csv")) {
          found.push_back(e.path());
        }
      }
      std::sort(found.begin(), found.end());
      for (const auto& f : found) add(f);
    } else if (p.extension() == ".json") {
      in.reports.push_back(p);
    } else {
      in.sweeps.push_back(p);
    }
  }
  return in;
}

void print(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows, bool csv) {
  if (!csv) {
    std::cout << markdown_table(header, rows);
    return;
  }
  auto line = [](const std::vector<std::string>& cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) std::cout << (c ? "," : "") << cells[c];
    std::cout << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

void report_runs(const std::vector<fs::path>& paths, bool csv) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : paths) {
    const auto r = loop::read_report(p);
    rows.push_back({p.parent_path().string(), std::string(loop::to_string(r.config.setting)),
                    std::to_string(r.config.seed), fixed(r.final_metrics.accuracy), fixed(r.final_metrics.f1),
                    r.pct_l ? fixed(*r.pct_l, 2) : "-", fixed(r.pct_data(), 2)});
  }
  print({"Run", "Setting", "Seed", "Accuracy", "F1 Score", "%L", "%Data"}, rows, csv);
}

// Means over seeds per (setting, budget, init, per_cycle).
void report_sweep(const fs::path& path, bool csv) {
  using Key = std::tuple<std::string, std::size_t, double, std::size_t>;
  struct Acc {
    std::size_t n = 0;
    double pct_l = 0.0, accuracy = 0.0, f1 = 0.0;
  };
  std::map<Key, Acc> cells;
  for (const auto& row : loop::read_sweep_csv(path)) {
    auto& a = cells[{row.setting, row.cell.budget, row.cell.init_fraction, row.cell.per_cycle}];
    ++a.n;
    a.pct_l += row.pct_l;
    a.accuracy += row.accuracy;
    a.f1 += row.f1;
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& [key, a] : cells) {
    const auto& [setting, budget, init, per_cycle] = key;
    const double n = static_cast<double>(a.n);
    rows.push_back({setting, std::to_string(budget), fixed(100.0 * init, 0), std::to_string(per_cycle),
                    std::to_string(a.n), fixed(a.pct_l / n, 2), fixed(a.accuracy / n), fixed(a.f1 / n)});
  }
  if (!csv) std::cout << path.string() << "\n\n";
  print({"Setting", "Budget", "Init %", "Per cycle", "Seeds", "%L", "Accuracy", "F1 Score"}, rows, csv);
}

}  // namespace

void add_report(CLI::App& app, Context&, int& rc) {
  auto paths = std::make_shared<std::vector<fs::path>>();
  auto csv = std::make_shared<bool>(false);
  auto* cmd = app.add_subcommand("report", "Render tables from stored reports and sweeps");
  cmd->add_option("paths", *paths, "report.json files, run or bench directories, sweep.csv files")
      ->required()
      ->check(CLI::ExistingPath);
  cmd->add_flag("--csv", *csv, "CSV instead of markdown");

  cmd->callback([&rc, paths, csv] {
    const auto in = collect(*paths);
    if (in.reports.empty() && in.sweeps.empty()) throw Error(ErrorCode::IoFailure, "no report.json or sweep.csv found");
    if (!in.reports.empty()) report_runs(in.reports, *csv);
    for (const auto& s : in.sweeps) {
      if (!in.reports.empty() || &s != &in.sweeps.front()) std::cout << '\n';
      report_sweep(s, *csv);
    }
    rc = 0;
  });
}

}  // namespace ads::cli
