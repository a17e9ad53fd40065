#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <future>
#include <thread>

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "ads/error.hpp"
#include "ads/loop/engine.hpp"
#include "ads/loop/report.hpp"
#include "ads/service/interactive_oracle.hpp"
#include "ads/service/oracle_service.hpp"
#include "fixtures.hpp"

using namespace ads;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

service::ServiceConfig local_service(int port = 0, std::chrono::milliseconds idle = std::chrono::milliseconds{0}) {
  service::ServiceConfig sc;
  sc.host = "127.0.0.1";
  sc.port = port;
  sc.idle_timeout = idle;
  return sc;
}

const testing::NormalizedBenchmark& bench() {
  static const auto b = testing::normalized_benchmark(testing::small_generator(21));
  return b;
}

loop::ExperimentConfig service_config(std::size_t per_cycle) {
  auto c = testing::fast_config(loop::Setting::Ads, 13);
  c.samples_per_cycle = per_cycle;
  return c;
}

loop::RunReport simulated(const loop::ExperimentConfig& c) {
  return loop::run_setting(loop::Setting::Ads, bench().normalized, bench().provenance, c);
}

json get_json(httplib::Client& cli, const std::string& path, int expected_status = 200) {
  const auto res = cli.Get(path);
  REQUIRE(res);
  CHECK(res->status == expected_status);
  return json::parse(res->body);
}

json post_json(httplib::Client& cli, const json& body, int* status = nullptr) {
  const auto res = cli.Post("/labels", body.dump(), "application/json");
  REQUIRE(res);
  if (status) *status = res->status;
  return json::parse(res->body);
}

// Polls /status until the run waits for labels or ends.
json wait_for_labels(httplib::Client& cli) {
  for (int i = 0; i < 6000; ++i) {
    const auto s = get_json(cli, "/status");
    if (s.at("state") != "training") return s;
    std::this_thread::sleep_for(10ms);
  }
  FAIL("service never asked for labels");
  return {};
}

// True when any key or string value names a machine.
bool mentions_provenance(const json& j) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (k == "machine" || k == "source" || k == "provenance" || mentions_provenance(v)) return true;
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (mentions_provenance(v)) return true;
    }
  } else if (j.is_string()) {
    const auto s = j.get<std::string>();
    return s == "S1" || s == "S2" || s == "L1";
  }
  return false;
}

struct ScriptedLog {
  std::vector<std::size_t> pending_per_cycle;
  std::vector<int> status_cycles;
};

// Labels every pending query with the ground truth until the run ends or
// `stop_after_cycles` batches have been answered.
ScriptedLog label_until_done(httplib::Client& cli, int stop_after_cycles = -1) {
  ScriptedLog log;
  int answered = 0;
  while (true) {
    const auto status = wait_for_labels(cli);
    CHECK_FALSE(mentions_provenance(status));
    if (status.at("state") != "awaiting_labels") break;
    if (answered == stop_after_cycles) break;
    log.status_cycles.push_back(status.at("cycle").get<int>());
    const auto q = get_json(cli, "/queries");
    CHECK_FALSE(mentions_provenance(q));
    log.pending_per_cycle.push_back(q.at("pending").get<std::size_t>());
    json labels = json::array();
    for (const auto& item : q.at("items")) {
      if (!item.at("pending").get<bool>()) continue;
      CHECK(item.at("signal").size() == bench().normalized.window());
      CHECK(item.at("signal")[0].size() == 4);
      const auto id = item.at("sample_id").get<data::SampleId>();
      labels.push_back({{"sample_id", id},
                        {"label", std::string(data::to_string(bench().provenance.at(id).label))},
                        {"annotator_id", "script"}});
    }
    const auto ack = post_json(cli, {{"labels", labels}});
    CHECK(ack.at("rejected").empty());
    CHECK(ack.at("accepted").size() == labels.size());
    ++answered;
  }
  return log;
}

}  // namespace

TEST_SUITE("oracle-service") {
  TEST_CASE("interactive oracle accepts each pending id exactly once") {
    loop::SimulatedOracle initial(bench().provenance);
    service::InteractiveOracle oracle(initial, 0ms);
    loop::QueryBatch batch{1, {{1, 5}, {2, 7}}};
    auto answers = std::async(std::launch::async, [&] { return oracle.label(batch); });
    while (oracle.pending_count() < 2) std::this_thread::sleep_for(1ms);
    CHECK(oracle.pending().front().row.id == 5);
    CHECK(oracle.submit({5, "abnormal", "a"}).remaining == 1);
    try {
      oracle.submit({5, "normal", "a"});
      FAIL("expected NotPending");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NotPending);
    }
    try {
      oracle.submit({7, "maybe", "a"});
      FAIL("expected BadLabel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadLabel);
    }
    CHECK(oracle.pending_count() == 1);
    CHECK(oracle.submit({7, "normal", "a"}).remaining == 0);
    const auto got = answers.get();
    CHECK(got.at(5) == data::ClassLabel::Abnormal);
    CHECK(got.at(7) == data::ClassLabel::Normal);
  }

  TEST_CASE("interactive oracle times out and cancels") {
    loop::SimulatedOracle initial(bench().provenance);
    service::InteractiveOracle quiet(initial, 50ms);
    try {
      quiet.label({1, {{1, 3}}});
      FAIL("expected OracleTimeout");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OracleTimeout);
    }
    service::InteractiveOracle waiting(initial, 0ms);
    auto blocked = std::async(std::launch::async, [&] { return waiting.label({1, {{1, 3}}}); });
    while (waiting.pending_count() == 0) std::this_thread::sleep_for(1ms);
    waiting.cancel();
    CHECK_THROWS_AS(blocked.get(), Error);
  }

  TEST_CASE("initial status before any cycle") {
    const auto c = service_config(10);
    service::OracleService svc(c, loop::make_experiment_data(bench().normalized, bench().provenance, c),
                               bench().provenance, local_service());
    const auto s = svc.status_json();
    CHECK(s.at("cycle") == 0);
    CHECK(s.at("pending") == 0);
    CHECK(s.at("state") == "training");
    CHECK(s.at("total_cycles") == 2);
  }

  TEST_CASE("scripted client run matches the simulated-oracle run") {
    const auto c = service_config(80);
    service::OracleService svc(c, loop::make_experiment_data(bench().normalized, bench().provenance, c),
                               bench().provenance, local_service());
    svc.start();
    httplib::Client cli("127.0.0.1", svc.port());
    cli.set_read_timeout(60, 0);

    const auto early = get_json(cli, "/status");
    CHECK(early.at("state") != "done");
    get_json(cli, "/report", 409);
    get_json(cli, "/scores?cycle=9", 404);
    get_json(cli, "/queries?cycle=x", 400);

    // Cycle 1: bad and duplicate submissions are rejected without effect.
    const auto s1 = wait_for_labels(cli);
    CHECK(s1.at("state") == "awaiting_labels");
    CHECK(s1.at("cycle") == 1);
    CHECK(s1.at("pending") == 80);
    const auto q1 = get_json(cli, "/queries?cycle=1");
    REQUIRE(q1.at("items").size() == 80);
    CHECK(q1.at("pending") == 80);
    const auto first = q1.at("items")[0].at("sample_id").get<data::SampleId>();
    const auto truth = std::string(data::to_string(bench().provenance.at(first).label));
    int status = 0;
    auto bad = post_json(cli, {{"sample_id", first}, {"label", "maybe"}}, &status);
    CHECK(status == 400);
    CHECK(bad.at("error") == "BadLabel");
    auto ok = post_json(cli, {{"sample_id", first}, {"label", truth}, {"annotator_id", "t"}}, &status);
    CHECK(status == 200);
    CHECK(ok.at("remaining") == 79);
    auto dup = post_json(cli, {{"sample_id", first}, {"label", truth}}, &status);
    CHECK(status == 409);
    CHECK(dup.at("error") == "NotPending");
    CHECK(get_json(cli, "/status").at("pending") == 79);
    const auto scores = get_json(cli, "/scores?cycle=1");
    CHECK(scores.at("scores").size() > 80);
    CHECK_FALSE(mentions_provenance(scores));

    const auto log = label_until_done(cli);
    CHECK(log.pending_per_cycle == std::vector<std::size_t>{79, 80});
    CHECK(log.status_cycles == std::vector<int>{1, 2});

    CHECK(svc.wait() == service::RunPhase::Done);
    const auto over_http = get_json(cli, "/report");
    CHECK_FALSE(mentions_provenance(over_http));
    const auto expected = simulated(c);
    CHECK(*svc.report() == expected);
    CHECK(over_http == json(expected));
    CHECK(get_json(cli, "/status").at("state") == "done");
    svc.stop();
  }

  TEST_CASE("an interrupted session resumes from its checkpoint") {
    const auto c = service_config(10);
    const auto dir = std::filesystem::temp_directory_path() / "ads_test_resume";
    std::filesystem::remove_all(dir);
    const auto data = loop::make_experiment_data(bench().normalized, bench().provenance, c);
    auto sc = local_service();
    sc.out_dir = dir;
    {
      service::OracleService svc(c, data, bench().provenance, sc);
      svc.start();
      httplib::Client cli("127.0.0.1", svc.port());
      const auto log = label_until_done(cli, 1);
      CHECK(log.pending_per_cycle.size() == 1);
      wait_for_labels(cli);
      svc.stop();
      CHECK(svc.phase() == service::RunPhase::Failed);
    }
    CHECK(std::filesystem::exists(service::state_path(dir)));
    service::OracleService svc(c, data, bench().provenance, sc);
    svc.start();
    httplib::Client cli("127.0.0.1", svc.port());
    const auto s = wait_for_labels(cli);
    CHECK(s.at("cycle") == 2);
    label_until_done(cli);
    CHECK(svc.wait() == service::RunPhase::Done);
    CHECK(*svc.report() == simulated(c));
    CHECK(std::filesystem::exists(dir / "report.json"));
    svc.stop();

    auto other = c;
    other.seed = 99;
    CHECK_THROWS_AS(service::load_run_checkpoint(dir, other), Error);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("idle timeout ends the run") {
    const auto c = service_config(10);
    service::OracleService svc(c, loop::make_experiment_data(bench().normalized, bench().provenance, c),
                               bench().provenance, local_service(0, 100ms));
    svc.start();
    CHECK(svc.wait() == service::RunPhase::TimedOut);
    CHECK(svc.status_json().at("state") == "timeout");
    CHECK_FALSE(svc.error().empty());
  }

  TEST_CASE("binding a taken port fails") {
    const auto c = service_config(10);
    const auto data = loop::make_experiment_data(bench().normalized, bench().provenance, c);
    service::OracleService a(c, data, bench().provenance, local_service());
    a.start();
    service::OracleService b(c, data, bench().provenance, local_service(a.port()));
    try {
      b.start();
      FAIL("expected BindFailure");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BindFailure);
    }
  }
}
