#include <iostream>

#include <spdlog/spdlog.h>

#include "ads/error.hpp"
#include "ads/loop/engine.hpp"
#include "ads/service/oracle_service.hpp"
#include "ads/util/manifest.hpp"
#include "common.hpp"

namespace ads::cli {

namespace fs = std::filesystem;

namespace {

struct ServeFlags {
  ExperimentFlags experiment;
  fs::path data_dir;
  fs::path out;
  std::string bind = "127.0.0.1:8080";
  double idle_timeout = 0.0;
  bool no_resume = false;
};

std::pair<std::string, int> parse_bind(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon == 0) throw CLI::ValidationError("--bind", "expected HOST:PORT");
  int port = -1;
  try {
    port = std::stoi(text.substr(colon + 1));
  } catch (const std::exception&) {
  }
  if (port < 0 || port > 65535) throw CLI::ValidationError("--bind", "bad port in " + text);
  return {text.substr(0, colon), port};
}

std::vector<fs::path> files_under(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(fs::relative(e.path(), dir));
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

void add_serve(CLI::App& app, Context& ctx, int& rc) {
  auto f = std::make_shared<ServeFlags>();
  auto* cmd = app.add_subcommand("serve", "Run ads with labels submitted over HTTP");
  cmd->add_option("--data", f->data_dir, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--out", f->out, "Checkpoint and output directory");
  cmd->add_option("--bind", f->bind, "HOST:PORT (port 0 picks a free one)");
  cmd->add_option("--idle-timeout", f->idle_timeout, "Seconds without a submission before giving up (0: never)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--no-resume", f->no_resume, "Ignore an existing checkpoint in --out");
  f->experiment.add_to(*cmd, false);

  cmd->callback([&ctx, &rc, f] {
    auto config = f->experiment.build();
    config.setting = loop::Setting::Ads;
    const auto [host, port] = parse_bind(f->bind);
    const auto data = load_data(f->data_dir);

    service::ServiceConfig sc;
    sc.host = host;
    sc.port = port;
    sc.idle_timeout = std::chrono::milliseconds(static_cast<long long>(f->idle_timeout * 1000.0));
    sc.out_dir = f->out;
    sc.resume = !f->no_resume;

    service::OracleService svc(config, loop::make_experiment_data(data.normalized, data.provenance, config),
                               data.provenance, sc);
    svc.start();
    std::cout << "listening on http://" << host << ':' << svc.port() << std::endl;
    const auto phase = svc.wait();
    svc.stop();

    if (!f->out.empty() && fs::exists(f->out)) {
      write_json_file(f->out / "config.json", config);
      util::write_manifest(f->out, invocation("serve", ctx.argv), files_under(f->out));
    }
    if (phase != service::RunPhase::Done) {
      spdlog::error("run {}: {}", service::to_string(phase), svc.error());
      rc = 1;
      return;
    }
    const auto report = svc.report();
    std::cout << "ads accuracy " << fixed(report->final_metrics.accuracy) << " f1 " << fixed(report->final_metrics.f1)
              << " pctL " << (report->pct_l ? fixed(*report->pct_l, 2) : "-") << '\n';
    rc = 0;
  });
}

}  // namespace ads::cli
