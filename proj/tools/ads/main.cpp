#include <iostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "ads/error.hpp"
#include "ads/util/manifest.hpp"
#include "common.hpp"

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("ads"));
  spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");

  ads::cli::Context ctx;
  ctx.argv.assign(argv, argv + argc);

  CLI::App app{"Active data-sharing for cross-machine anomaly detection"};
  app.set_version_flag("--version", std::string(ads::util::version()));
  app.require_subcommand(1);
  std::string log_level = "info";
  app.add_option("--log-level", log_level, "trace | debug | info | warn | error | off")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
  app.parse_complete_callback([&] { spdlog::set_level(spdlog::level::from_str(log_level)); });

  int rc = 0;
  ads::cli::add_generate(app, ctx, rc);
  ads::cli::add_run(app, ctx, rc);
  ads::cli::add_bench(app, ctx, rc);
  ads::cli::add_ablate(app, ctx, rc);
  ads::cli::add_serve(app, ctx, rc);
  ads::cli::add_gradcheck(app, ctx, rc);
  ads::cli::add_report(app, ctx, rc);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version exit 0; usage errors exit 2.
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ads::Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return rc;
}
