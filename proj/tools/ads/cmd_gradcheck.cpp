#include <iostream>

#include <fmt/format.h>

#include "ads/audit/gradient_audit.hpp"
#include "common.hpp"

namespace ads::cli {

void add_gradcheck(CLI::App& app, Context&, int& rc) {
  auto seed = std::make_shared<std::uint64_t>(0);
  auto tol = std::make_shared<double>(1e-3);
  auto* cmd = app.add_subcommand("gradcheck", "Finite-difference audit of every layer, loss and network");
  cmd->add_option("--seed", *seed, "Input and weight seed");
  cmd->add_option("--tol", *tol, "Maximum relative error")->check(CLI::PositiveNumber);

  cmd->callback([&rc, seed, tol] {
    const auto entries = audit::gradient_audit(*seed, *tol);
    std::vector<std::vector<std::string>> rows;
    bool ok = true;
    for (const auto& e : entries) {
      ok = ok && e.report.passed;
      rows.push_back({e.name, std::to_string(e.report.checked), fmt::format("{:.3e}", e.report.max_relative_error),
                      e.report.worst_param, e.report.passed ? "pass" : "FAIL"});
    }
    std::cout << markdown_table({"Entry", "Checked", "Max rel. error", "Worst", "Result"}, rows);
    rc = ok ? 0 : 1;
  });
}

}  // namespace ads::cli
