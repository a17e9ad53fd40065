#include "ads/service/oracle_service.hpp"

#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ads/error.hpp"
#include "ads/loop/oracle.hpp"
#include "ads/nn/checkpoint.hpp"
#include "ads/service/interactive_oracle.hpp"

namespace ads::service {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(RunPhase p) {
  switch (p) {
    case RunPhase::Training: return "training";
    case RunPhase::AwaitingLabels: return "awaiting_labels";
    case RunPhase::Done: return "done";
    case RunPhase::Failed: return "failed";
    case RunPhase::TimedOut: return "timeout";
  }
  return "unknown";
}

fs::path state_path(const fs::path& out_dir) { return out_dir / "checkpoint" / "state.json"; }
fs::path wta_stem(const fs::path& out_dir) { return out_dir / "checkpoint" / "wta"; }
fs::path similarity_stem(const fs::path& out_dir) { return out_dir / "checkpoint" / "theta_s"; }

void save_run_checkpoint(const fs::path& out_dir, const loop::ExperimentConfig& config, const loop::RunState& state,
                         const loop::SimilarityArtifacts* artifacts) {
  std::error_code ec;
  fs::create_directories(state_path(out_dir).parent_path(), ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + state_path(out_dir).parent_path().string());
  if (artifacts) {
    wta::save_wta(wta_stem(out_dir), artifacts->wta);
    nn::save_checkpoint(similarity_stem(out_dir), artifacts->model);
  }
  // The state goes last and atomically, so it never points at missing models.
  const auto tmp = fs::path(state_path(out_dir)).concat(".tmp");
  {
    std::ofstream out(tmp);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + tmp.string());
    out << json{{"config", config}, {"state", state}, {"has_artifacts", artifacts != nullptr}}.dump();
    if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + tmp.string());
  }
  fs::rename(tmp, state_path(out_dir), ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot replace " + state_path(out_dir).string());
}

std::optional<LoadedRun> load_run_checkpoint(const fs::path& out_dir, const loop::ExperimentConfig& config) {
  const auto path = state_path(out_dir);
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("malformed checkpoint: ") + e.what());
  }
  if (j.at("config") != json(config)) {
    throw Error(ErrorCode::InvalidConfig, "checkpoint in " + out_dir.string() + " belongs to a different config");
  }
  LoadedRun run;
  try {
    run.state = j.at("state").get<loop::RunState>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("malformed checkpoint state: ") + e.what());
  }
  if (j.value("has_artifacts", false)) {
    run.artifacts = std::make_shared<const loop::SimilarityArtifacts>(
        loop::SimilarityArtifacts{wta::load_wta(wta_stem(out_dir)), nn::load_checkpoint(similarity_stem(out_dir)).model});
  }
  return run;
}

namespace {

json query_json(const loop::QueryRow& row, int cycle, bool pending, const data::Sample& sample, std::size_t window,
                std::optional<std::chrono::system_clock::time_point> queued_at) {
  json signal = json::array();
  for (std::size_t t = 0; t < window; ++t) signal.push_back({t, sample.at(t, 0), sample.at(t, 1), sample.at(t, 2)});
  json q = {{"sample_id", row.id}, {"cycle", cycle},     {"rank", row.rank}, {"s_prime", row.s_prime},
            {"s_binary", row.s_binary}, {"u", row.u}, {"j", row.j},       {"pending", pending},
            {"signal", std::move(signal)}};
  if (queued_at) {
    q["queued_at"] = std::chrono::duration_cast<std::chrono::milliseconds>(queued_at->time_since_epoch()).count();
  }
  return q;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotPending: return 409;
    case ErrorCode::BadLabel:
    case ErrorCode::InvalidArgument: return 400;
    case ErrorCode::UnknownId: return 404;
    default: return 500;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
  reply(res, status, {{"error", code}, {"message", message}});
}

}  // namespace

struct OracleService::Impl {
  loop::ExperimentConfig config;
  loop::ExperimentData data;
  data::ProvenanceStore provenance;
  ServiceConfig service;
  loop::SimulatedOracle initial{provenance};
  InteractiveOracle oracle{initial, service.idle_timeout};

  mutable std::mutex mu;
  std::condition_variable finished_cv;
  RunPhase phase = RunPhase::Training;
  int cycle = 0;
  std::size_t labeled = 0;
  std::map<int, loop::CycleRecord> records;  // selected cycles, completed or not
  std::optional<loop::RunReport> report;
  std::string error;

  httplib::Server server;
  int bound_port = -1;
  std::thread http_thread;
  std::thread run_thread;

  Impl(loop::ExperimentConfig c, loop::ExperimentData d, data::ProvenanceStore p, ServiceConfig s)
      : config(std::move(c)), data(std::move(d)), provenance(std::move(p)), service(std::move(s)) {}

  RunPhase current_phase() const {
    if (phase == RunPhase::Training && oracle.pending_count() > 0) return RunPhase::AwaitingLabels;
    return phase;
  }

  void finish(RunPhase p, std::string message = {}) {
    std::lock_guard lock(mu);
    phase = p;
    error = std::move(message);
    finished_cv.notify_all();
  }

  void run() {
    try {
      std::optional<LoadedRun> loaded;
      const bool persist = !service.out_dir.empty();
      if (persist && service.resume) loaded = load_run_checkpoint(service.out_dir, config);
      loop::RunState state;
      std::shared_ptr<const loop::SimilarityArtifacts> artifacts;
      if (loaded) {
        spdlog::info("resuming from {} after cycle {}", service.out_dir.string(), loaded->state.cycles_done);
        state = std::move(loaded->state);
        artifacts = std::move(loaded->artifacts);
        std::lock_guard lock(mu);
        for (const auto& r : state.records) records[r.cycle] = r;
      } else {
        state = loop::initialize_run(config, data, oracle);
        if (persist) save_run_checkpoint(service.out_dir, config, state, nullptr);
      }
      {
        std::lock_guard lock(mu);
        labeled = state.pool.labeled_ids().size();
      }

      loop::RunHooks hooks;
      hooks.on_state = [this](std::string_view, int c) {
        std::lock_guard lock(mu);
        cycle = c;
      };
      hooks.on_selection = [this](const loop::CycleRecord& rec) {
        std::lock_guard lock(mu);
        records[rec.cycle] = rec;
      };
      hooks.on_checkpoint = [this, persist](const loop::RunState& s, const loop::SimilarityArtifacts* a) {
        if (persist) save_run_checkpoint(service.out_dir, config, s, a);
        std::lock_guard lock(mu);
        labeled = s.pool.labeled_ids().size();
      };
      auto result = loop::continue_run(config, data, oracle, std::move(state), artifacts, hooks);
      loop::attach_pct_l(result, provenance);
      if (persist) loop::write_run_outputs(service.out_dir, result);
      {
        std::lock_guard lock(mu);
        report = std::move(result);
      }
      finish(RunPhase::Done);
    } catch (const Error& e) {
      spdlog::error("{}", e.what());
      finish(e.code() == ErrorCode::OracleTimeout ? RunPhase::TimedOut : RunPhase::Failed, e.what());
    } catch (const std::exception& e) {
      spdlog::error("{}", e.what());
      finish(RunPhase::Failed, e.what());
    }
  }

  json status() const {
    std::lock_guard lock(mu);
    json j = {{"cycle", cycle},
              {"pending", oracle.pending_count()},
              {"state", to_string(current_phase())},
              {"total_cycles", config.schedule().size()},
              {"labeled", labeled}};
    if (!error.empty()) j["error"] = error;
    return j;
  }

  // Parses ?cycle=k, defaulting to the current cycle.
  std::optional<int> cycle_param(const httplib::Request& req, httplib::Response& res) const {
    if (!req.has_param("cycle")) {
      std::lock_guard lock(mu);
      return cycle;
    }
    const auto text = req.get_param_value("cycle");
    try {
      std::size_t used = 0;
      const int k = std::stoi(text, &used);
      if (used == text.size()) return k;
    } catch (const std::exception&) {
    }
    reply_error(res, 400, "InvalidArgument", "cycle must be an integer");
    return std::nullopt;
  }

  void get_queries(const httplib::Request& req, httplib::Response& res) const {
    const auto k = cycle_param(req, res);
    if (!k) return;
    const auto pending = oracle.pending();
    std::map<data::SampleId, std::chrono::system_clock::time_point> open;
    for (const auto& p : pending) {
      if (p.cycle == *k) open[p.row.id] = p.queued_at;
    }
    std::optional<loop::CycleRecord> rec;
    {
      std::lock_guard lock(mu);
      if (auto it = records.find(*k); it != records.end()) rec = it->second;
    }
    json items = json::array();
    if (rec) {
      for (const auto& row : rec->queries) {
        const auto it = open.find(row.id);
        const bool is_open = it != open.end();
        items.push_back(query_json(row, *k, is_open, data.pool.by_id(row.id), data.pool.window(),
                                   is_open ? std::optional(it->second) : std::nullopt));
      }
    } else {
      for (const auto& p : pending) {
        if (p.cycle == *k) {
          items.push_back(query_json(p.row, *k, true, data.pool.by_id(p.row.id), data.pool.window(), p.queued_at));
        }
      }
    }
    reply(res, 200, {{"cycle", *k}, {"pending", open.size()}, {"items", std::move(items)}});
  }

  void post_labels(const httplib::Request& req, httplib::Response& res) {
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      reply_error(res, 400, "InvalidArgument", "body must be JSON");
      return;
    }
    auto parse_one = [](const json& j) {
      if (!j.is_object() || !j.contains("sample_id") || !j.at("sample_id").is_number_integer() ||
          !j.contains("label") || !j.at("label").is_string()) {
        throw Error(ErrorCode::InvalidArgument, "each submission needs integer sample_id and string label");
      }
      return LabelSubmission{j.at("sample_id").get<data::SampleId>(), j.at("label").get<std::string>(),
                             j.value("annotator_id", std::string())};
    };
    try {
      if (body.contains("labels")) {
        if (!body.at("labels").is_array()) throw Error(ErrorCode::InvalidArgument, "labels must be an array");
        json accepted = json::array();
        json rejected = json::array();
        for (const auto& item : body.at("labels")) {
          try {
            accepted.push_back(oracle.submit(parse_one(item)).sample_id);
          } catch (const Error& e) {
            rejected.push_back({{"sample_id", item.value("sample_id", json(nullptr))},
                                {"error", to_string(e.code())},
                                {"message", e.what()}});
          }
        }
        reply(res, 200, {{"accepted", accepted}, {"rejected", rejected}, {"remaining", oracle.pending_count()}});
        return;
      }
      const auto result = oracle.submit(parse_one(body));
      reply(res, 200, {{"accepted", true}, {"sample_id", result.sample_id}, {"remaining", result.remaining}});
    } catch (const Error& e) {
      reply_error(res, http_status(e.code()), to_string(e.code()), e.what());
    }
  }

  void get_report(httplib::Response& res) const {
    std::lock_guard lock(mu);
    if (!report) {
      reply(res, 409, {{"error", "NotReady"}, {"state", to_string(current_phase())}});
      return;
    }
    reply(res, 200, json(*report));
  }

  void get_scores(const httplib::Request& req, httplib::Response& res) const {
    const auto k = cycle_param(req, res);
    if (!k) return;
    std::lock_guard lock(mu);
    const auto it = records.find(*k);
    if (it == records.end()) {
      reply_error(res, 404, "InvalidArgument", "no scores for cycle " + std::to_string(*k));
      return;
    }
    reply(res, 200, {{"cycle", *k}, {"scores", it->second.scores}});
  }

  void routes() {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    server.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Get("/status", [this](const httplib::Request&, httplib::Response& res) { reply(res, 200, status()); });
    server.Get("/queries", [this](const httplib::Request& req, httplib::Response& res) { get_queries(req, res); });
    server.Post("/labels", [this](const httplib::Request& req, httplib::Response& res) { post_labels(req, res); });
    server.Get("/report", [this](const httplib::Request&, httplib::Response& res) { get_report(res); });
    server.Get("/scores", [this](const httplib::Request& req, httplib::Response& res) { get_scores(req, res); });
  }
};

OracleService::OracleService(loop::ExperimentConfig config, loop::ExperimentData data,
                             data::ProvenanceStore provenance, ServiceConfig service)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(data), std::move(provenance), std::move(service))) {
  impl_->config.setting = loop::Setting::Ads;
  impl_->config.validate();
}

OracleService::~OracleService() { stop(); }

void OracleService::start() {
  auto& m = *impl_;
  if (m.bound_port >= 0) return;
  m.routes();
  // httplib's default adds SO_REUSEPORT, which would let a second service
  // share a taken port.
  m.server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  if (m.service.port == 0) {
    m.bound_port = m.server.bind_to_any_port(m.service.host);
  } else if (m.server.bind_to_port(m.service.host, m.service.port)) {
    m.bound_port = m.service.port;
  }
  if (m.bound_port < 0) {
    throw Error(ErrorCode::BindFailure,
                "cannot bind " + m.service.host + ":" + std::to_string(m.service.port));
  }
  m.http_thread = std::thread([&m] { m.server.listen_after_bind(); });
  m.run_thread = std::thread([&m] { m.run(); });
  spdlog::info("oracle service listening on {}:{}", m.service.host, m.bound_port);
}

int OracleService::port() const { return impl_->bound_port; }

RunPhase OracleService::wait() {
  auto& m = *impl_;
  std::unique_lock lock(m.mu);
  m.finished_cv.wait(lock, [&] {
    return m.phase == RunPhase::Done || m.phase == RunPhase::Failed || m.phase == RunPhase::TimedOut;
  });
  return m.phase;
}

void OracleService::stop() {
  if (!impl_) return;
  auto& m = *impl_;
  m.oracle.cancel();
  if (m.run_thread.joinable()) m.run_thread.join();
  m.server.stop();
  if (m.http_thread.joinable()) m.http_thread.join();
}

RunPhase OracleService::phase() const {
  std::lock_guard lock(impl_->mu);
  return impl_->current_phase();
}

std::optional<loop::RunReport> OracleService::report() const {
  std::lock_guard lock(impl_->mu);
  return impl_->report;
}

std::string OracleService::error() const {
  std::lock_guard lock(impl_->mu);
  return impl_->error;
}

json OracleService::status_json() const { return impl_->status(); }

}  // namespace ads::service
