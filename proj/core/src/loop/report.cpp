#include "ads/loop/report.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "ads/error.hpp"
#include "ads/util/csv.hpp"

namespace ads::loop {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_double(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

uncertainty::Metrics read_metrics(const json& j) {
  uncertainty::Metrics m;
  m.accuracy = j.at("accuracy").get<double>();
  m.f1 = j.at("f1").get<double>();
  const auto& c = j.at("confusion");
  m.confusion = {c.at("tp").get<std::size_t>(), c.at("fp").get<std::size_t>(), c.at("fn").get<std::size_t>(),
                 c.at("tn").get<std::size_t>()};
  return m;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  return out;
}

using util::format_double;

}  // namespace

std::vector<data::SampleId> RunReport::queried_ids() const {
  std::vector<data::SampleId> ids;
  for (const auto& c : cycles) {
    for (const auto& q : c.queries) ids.push_back(q.id);
  }
  return ids;
}

double RunReport::pct_data() const {
  return pool_size == 0 ? 0.0 : 100.0 * static_cast<double>(final_labeled) / static_cast<double>(pool_size);
}

double compute_pct_l(std::span<const data::SampleId> query_history, const data::ProvenanceStore& provenance) {
  if (query_history.empty()) throw Error(ErrorCode::EmptyHistory, "no queried samples");
  std::size_t l = 0;
  for (auto id : query_history) {
    if (provenance.at(id).machine == data::Machine::L1) ++l;
  }
  return 100.0 * static_cast<double>(l) / static_cast<double>(query_history.size());
}

void attach_pct_l(RunReport& report, const data::ProvenanceStore& provenance) {
  for (auto& c : report.cycles) {
    if (c.queries.empty()) continue;
    std::vector<data::SampleId> ids;
    for (const auto& q : c.queries) ids.push_back(q.id);
    c.pct_l = compute_pct_l(ids, provenance);
  }
  const auto all = report.queried_ids();
  if (all.empty()) {
    report.pct_l.reset();
    report.queried_l.reset();
    return;
  }
  report.pct_l = compute_pct_l(all, provenance);
  std::size_t l = 0;
  for (auto id : all) l += provenance.at(id).machine == data::Machine::L1 ? 1 : 0;
  report.queried_l = l;
}

json metrics_json(const uncertainty::Metrics& m) {
  const auto& c = m.confusion;
  return {{"accuracy", m.accuracy},
          {"f1", m.f1},
          {"confusion", {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}}}};
}

void to_json(json& j, const ScoreRow& r) {
  j = {{"sample_id", r.id}, {"s_prime", r.s_prime}, {"s_binary", r.s_binary}, {"u", r.u}, {"j", r.j}};
}

void to_json(json& j, const CycleRecord& r) {
  json queries = json::array();
  for (const auto& q : r.queries) {
    queries.push_back({{"rank", q.rank},
                       {"sample_id", q.id},
                       {"s_prime", q.s_prime},
                       {"s_binary", q.s_binary},
                       {"u", q.u},
                       {"j", q.j}});
  }
  j = {{"cycle", r.cycle},
       {"labeled_before", r.labeled_before},
       {"train_size", r.train_size},
       {"w_used", r.w_used},
       {"shortfall", r.shortfall},
       {"selected_s0", r.selected_s0},
       {"pareto_passed", r.pareto_passed ? json(*r.pareto_passed) : json(nullptr)},
       {"metrics", r.metrics ? metrics_json(*r.metrics) : json(nullptr)},
       {"pct_l", optional_json(r.pct_l)},
       {"queries", queries}};
}

void from_json(const json& j, CycleRecord& c) {
  c = CycleRecord{};
  c.cycle = j.at("cycle").get<int>();
  c.labeled_before = j.at("labeled_before").get<std::size_t>();
  c.train_size = j.at("train_size").get<std::size_t>();
  c.w_used = j.at("w_used").get<double>();
  c.shortfall = j.at("shortfall").get<std::size_t>();
  c.selected_s0 = j.at("selected_s0").get<std::size_t>();
  if (!j.at("pareto_passed").is_null()) c.pareto_passed = j.at("pareto_passed").get<bool>();
  if (!j.at("metrics").is_null()) c.metrics = read_metrics(j.at("metrics"));
  c.pct_l = optional_double(j, "pct_l");
  for (const auto& q : j.at("queries")) {
    c.queries.push_back({q.at("rank").get<std::size_t>(), q.at("sample_id").get<data::SampleId>(),
                         q.at("s_prime").get<double>(), q.at("s_binary").get<int>(), q.at("u").get<double>(),
                         q.at("j").get<double>()});
  }
  if (j.contains("scores")) {
    for (const auto& sc : j.at("scores")) {
      c.scores.push_back({sc.at("sample_id").get<data::SampleId>(), sc.at("s_prime").get<double>(),
                          sc.at("s_binary").get<int>(), sc.at("u").get<double>(), sc.at("j").get<double>()});
    }
  }
}

void to_json(json& j, const RunReport& r) {
  j = {{"setting", std::string(to_string(r.config.setting))},
       {"seed", r.config.seed},
       {"config", r.config},
       {"pool_size", r.pool_size},
       {"test_size", r.test_size},
       {"initial_labeled", r.initial_labeled},
       {"initial_s", r.initial_s},
       {"initial_l", r.initial_l},
       {"cycles", r.cycles},
       {"final",
        {{"train_size", r.final_train_size},
         {"labeled", r.final_labeled},
         {"pct_data", r.pct_data()},
         {"metrics", metrics_json(r.final_metrics)},
         {"accuracy", r.final_metrics.accuracy},
         {"f1", r.final_metrics.f1},
         {"pct_l", optional_json(r.pct_l)},
         {"queried", r.queried_ids().size()},
         {"queried_l", r.queried_l ? json(*r.queried_l) : json(nullptr)}}}};
}

void from_json(const json& j, RunReport& r) {
  try {
    r.config = j.at("config").get<ExperimentConfig>();
    r.pool_size = j.at("pool_size").get<std::size_t>();
    r.test_size = j.at("test_size").get<std::size_t>();
    r.initial_labeled = j.at("initial_labeled").get<std::size_t>();
    r.initial_s = j.at("initial_s").get<std::size_t>();
    r.initial_l = j.at("initial_l").get<std::size_t>();
    r.cycles = j.at("cycles").get<std::vector<CycleRecord>>();
    const auto& f = j.at("final");
    r.final_train_size = f.at("train_size").get<std::size_t>();
    r.final_labeled = f.at("labeled").get<std::size_t>();
    r.final_metrics = read_metrics(f.at("metrics"));
    r.pct_l = optional_double(f, "pct_l");
    if (!f.at("queried_l").is_null()) r.queried_l = f.at("queried_l").get<std::size_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("malformed report: ") + e.what());
  }
}

void write_scores_csv(const fs::path& path, std::span<const ScoreRow> rows) {
  auto out = open_out(path);
  out << "sample_id,s_prime,s_binary,u,j\n";
  for (const auto& r : rows) {
    out << r.id << ',' << format_double(r.s_prime) << ',' << r.s_binary << ',' << format_double(r.u) << ','
        << format_double(r.j) << '\n';
  }
}

void write_queries_csv(const fs::path& path, std::span<const QueryRow> rows) {
  auto out = open_out(path);
  out << "rank,sample_id,s_prime,s_binary,u,j\n";
  for (const auto& r : rows) {
    out << r.rank << ',' << r.id << ',' << format_double(r.s_prime) << ',' << r.s_binary << ','
        << format_double(r.u) << ',' << format_double(r.j) << '\n';
  }
}

std::vector<fs::path> write_run_outputs(const fs::path& dir, const RunReport& report) {
  fs::create_directories(dir);
  std::vector<fs::path> written;

  open_out(dir / "report.json") << json(report).dump(2) << '\n';
  written.emplace_back("report.json");

  {
    auto out = open_out(dir / "cycles.csv");
    out << "cycle,labeled_before,train_size,queried,w_used,shortfall,selected_s0,pareto_passed,accuracy,f1,pct_l\n";
    for (const auto& c : report.cycles) {
      out << c.cycle << ',' << c.labeled_before << ',' << c.train_size << ',' << c.queries.size() << ','
          << format_double(c.w_used) << ',' << c.shortfall << ',' << c.selected_s0 << ','
          << (c.pareto_passed ? (*c.pareto_passed ? "true" : "false") : "") << ','
          << (c.metrics ? format_double(c.metrics->accuracy) : "") << ','
          << (c.metrics ? format_double(c.metrics->f1) : "") << ',' << (c.pct_l ? format_double(*c.pct_l) : "")
          << '\n';
    }
  }
  written.emplace_back("cycles.csv");

  json eval = metrics_json(report.final_metrics);
  eval["cycle"] = report.cycles.size();
  eval["setting"] = std::string(to_string(report.config.setting));
  open_out(dir / "eval.json") << eval.dump(2) << '\n';
  written.emplace_back("eval.json");

  for (const auto& c : report.cycles) {
    const auto k = std::to_string(c.cycle);
    if (!c.scores.empty()) {
      write_scores_csv(dir / ("scores_cycle_" + k + ".csv"), c.scores);
      written.emplace_back("scores_cycle_" + k + ".csv");
    }
    write_queries_csv(dir / ("queries_cycle_" + k + ".csv"), c.queries);
    written.emplace_back("queries_cycle_" + k + ".csv");
  }
  return written;
}

RunReport read_report(const fs::path& report_json) {
  std::ifstream in(report_json);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + report_json.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("malformed report: ") + e.what());
  }
  return j.get<RunReport>();
}

}  // namespace ads::loop
