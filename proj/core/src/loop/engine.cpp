#include "ads/loop/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ads/acquisition/acquisition.hpp"
#include "ads/data/lhs.hpp"
#include "ads/error.hpp"
#include "ads/nn/losses.hpp"
#include "ads/random.hpp"
#include "ads/uncertainty/classifier.hpp"

namespace ads::loop {

using data::ClassLabel;
using data::Dataset;
using data::SampleId;
using nlohmann::json;

namespace {

// Running s'_i = max over reference rows of cos(F_ref, F_i) for every pool row.
// Adding references only raises the maxima, so the incremental result equals
// the batch formula exactly.
class SimilarityTracker {
 public:
  SimilarityTracker(const nn::Model& model, const Dataset& pool)
      : embeddings_(contrastive::embed(model, pool)),
        best_(pool.size(), -std::numeric_limits<double>::infinity()) {}

  void add_references(const Dataset& pool, const std::vector<SampleId>& ids) {
    std::vector<std::size_t> rows;
    for (auto id : ids) rows.push_back(pool.index_of(id));
    for (std::size_t i = 0; i < best_.size(); ++i) {
      const auto fi = embeddings_.row(i);
      for (auto r : rows) best_[i] = std::max(best_[i], nn::cosine_similarity(embeddings_.row(r), fi));
    }
    references_ += rows.size();
  }

  double score(std::size_t pool_row) const {
    if (references_ == 0) throw Error(ErrorCode::EmptyLabeledPool, "no labeled reference samples");
    return best_[pool_row];
  }

 private:
  nn::Tensor embeddings_;
  std::vector<double> best_;
  std::size_t references_ = 0;
};

std::vector<SampleId> train_ids(const ExperimentConfig& config, const RunState& state) {
  if (config.effective_train_set() == TrainSet::SAttributed) {
    return {state.s_attributed.begin(), state.s_attributed.end()};
  }
  return state.pool.labeled_vector();
}

std::vector<ClassLabel> labels_of(const RunState& state, const std::vector<SampleId>& ids) {
  std::vector<ClassLabel> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(state.pool.label(id));
  return out;
}

void notify(const RunHooks& hooks, std::string_view state, int cycle) {
  if (hooks.on_state) hooks.on_state(state, cycle);
}

std::map<SampleId, ClassLabel> checked_labels(const QueryBatch& batch, std::map<SampleId, ClassLabel> labels) {
  if (labels.size() != batch.rows.size()) {
    throw Error(ErrorCode::InvalidArgument, "oracle returned " + std::to_string(labels.size()) + " labels for " +
                                                std::to_string(batch.rows.size()) + " queries");
  }
  for (const auto& r : batch.rows) {
    if (!labels.contains(r.id)) throw Error(ErrorCode::InvalidArgument, "oracle skipped a queried sample");
  }
  return labels;
}

std::shared_ptr<const SimilarityArtifacts> retrain_similarity(const ExperimentConfig& config,
                                                              const ExperimentData& data, const RunState& state,
                                                              const SimilarityArtifacts& previous, int cycle) {
  const std::vector<SampleId> s_ids(state.s_attributed.begin(), state.s_attributed.end());
  const std::vector<SampleId> l_ids(state.initial_l.begin(), state.initial_l.end());
  auto model = contrastive::train_similarity_model(data.pool.subset(s_ids), data.pool.subset(l_ids), previous.wta,
                                                   config.similarity,
                                                   derive_seed(config.seed, stream::kSimilarity, cycle));
  return std::make_shared<const SimilarityArtifacts>(SimilarityArtifacts{previous.wta, std::move(model)});
}

}  // namespace

std::vector<SampleId> split_test_ids(const Dataset& dataset, const data::ProvenanceStore& provenance,
                                     double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "test_fraction must lie in (0, 1)");
  }
  std::map<std::pair<data::Machine, ClassLabel>, std::vector<SampleId>> groups;
  for (const auto& s : dataset.samples()) {
    const auto& p = provenance.at(s.id);
    if (data::source_of(p.machine) == data::Source::S) groups[{p.machine, p.label}].push_back(s.id);
  }
  Rng rng(derive_seed(seed, stream::kTestSplit));
  std::vector<SampleId> out;
  for (auto& [key, ids] : groups) {
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto take = static_cast<std::size_t>(std::floor(test_fraction * static_cast<double>(ids.size()) + 0.5));
    out.insert(out.end(), ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(out.begin(), out.end(),
            [&](SampleId a, SampleId b) { return dataset.index_of(a) < dataset.index_of(b); });
  return out;
}

ExperimentData make_experiment_data(const Dataset& normalized, const data::ProvenanceStore& provenance,
                                    const ExperimentConfig& config) {
  const auto test_ids = split_test_ids(normalized, provenance, config.test_fraction, config.effective_split_seed());
  const std::set<SampleId> test_set(test_ids.begin(), test_ids.end());
  const bool s_only = config.setting == Setting::Supervised || config.setting == Setting::RandomS;
  std::vector<SampleId> pool_ids;
  for (const auto& s : normalized.samples()) {
    if (test_set.contains(s.id)) continue;
    if (s_only && data::source_of(provenance.at(s.id).machine) != data::Source::S) continue;
    pool_ids.push_back(s.id);
  }
  ExperimentData out;
  out.pool = normalized.subset(pool_ids);
  out.test = normalized.subset(test_ids);
  for (auto id : test_ids) out.test_labels.push_back(provenance.at(id).label);
  return out;
}

RunState initialize_run(const ExperimentConfig& config, const ExperimentData& data, Oracle& oracle) {
  config.validate();
  RunState state;
  state.pool = data::Pool(data.pool);
  const auto ids = config.setting == Setting::Supervised
                       ? data.pool.ids()
                       : data::lhs_initial_sample(data.pool, config.init_fraction, config.num_strata,
                                                  derive_seed(config.seed, stream::kLhs));
  const auto annotations = oracle.annotate_initial(ids);
  std::map<SampleId, ClassLabel> labels;
  for (auto id : ids) {
    const auto it = annotations.find(id);
    if (it == annotations.end()) throw Error(ErrorCode::InvalidArgument, "initial annotation skipped a sample");
    labels[id] = it->second.label;
    (it->second.source == data::Source::S ? state.s_attributed : state.initial_l).insert(id);
  }
  state.pool.reveal_labels(labels);
  state.initial_labeled = ids.size();
  spdlog::info("initial annotation: {} samples ({} S, {} L) of {}", ids.size(), state.s_attributed.size(),
               state.initial_l.size(), data.pool.size());
  return state;
}

SimilarityArtifacts train_artifacts(const ExperimentConfig& config, const ExperimentData& data,
                                    const RunState& state) {
  const std::vector<SampleId> s_ids(state.s_attributed.begin(), state.s_attributed.end());
  const std::vector<SampleId> l_ids(state.initial_l.begin(), state.initial_l.end());
  if (l_ids.empty()) throw Error(ErrorCode::EmptyNegativePool, "initial annotation holds no L samples");
  auto ae = wta::train_wta(data.pool, config.wta, derive_seed(config.seed, stream::kWta));
  auto model = contrastive::train_similarity_model(data.pool.subset(s_ids), data.pool.subset(l_ids), ae,
                                                   config.similarity, derive_seed(config.seed, stream::kSimilarity));
  return {std::move(ae), std::move(model)};
}

RunReport continue_run(const ExperimentConfig& config, const ExperimentData& data, Oracle& oracle, RunState state,
                       std::shared_ptr<const SimilarityArtifacts> artifacts, const RunHooks& hooks) {
  config.validate();
  const auto schedule = config.schedule();
  const bool similarity = config.uses_similarity() && !schedule.empty();

  notify(hooks, "training", static_cast<int>(state.cycles_done));
  std::optional<SimilarityTracker> tracker;
  if (similarity) {
    if (!artifacts) artifacts = std::make_shared<const SimilarityArtifacts>(train_artifacts(config, data, state));
    tracker.emplace(artifacts->model, data.pool);
    tracker->add_references(data.pool, {state.s_attributed.begin(), state.s_attributed.end()});
  }

  std::optional<nn::Model> previous;
  for (std::size_t k = state.cycles_done + 1; k <= schedule.size(); ++k) {
    const int cycle = static_cast<int>(k);
    notify(hooks, "training", cycle);
    const auto unlabeled = state.pool.unlabeled_vector();
    if (unlabeled.empty()) {
      spdlog::warn("cycle {}: unlabeled pool exhausted, stopping early", cycle);
      break;
    }
    if (similarity && config.retrain_similarity_each_cycle && k > 1) {
      artifacts = retrain_similarity(config, data, state, *artifacts, cycle);
      tracker.emplace(artifacts->model, data.pool);
      tracker->add_references(data.pool, {state.s_attributed.begin(), state.s_attributed.end()});
    }

    const std::size_t t = schedule[k - 1];
    CycleRecord rec;
    rec.cycle = cycle;
    rec.labeled_before = state.pool.labeled_ids().size();
    QueryBatch batch{cycle, {}};

    if (config.is_active()) {
      const auto ids = train_ids(config, state);
      const auto labels = labels_of(state, ids);
      auto model = uncertainty::train_classifier(data.pool.subset(ids), labels,
                                                 config.cycle_classifier.value_or(config.classifier),
                                                 derive_seed(config.seed, stream::kClassifier, k),
                                                 config.warm_start_classifier && previous ? &*previous : nullptr);
      rec.train_size = ids.size();
      rec.metrics = uncertainty::evaluate(model, data.test, data.test_labels);

      const auto u = uncertainty::entropy_scores(uncertainty::predict_proba(model, data.pool.subset(unlabeled)));
      std::vector<double> s_prime(unlabeled.size(), 0.0);
      std::vector<int> s_binary(unlabeled.size(), 1);
      rec.w_used = 1.0;
      if (similarity) {
        for (std::size_t i = 0; i < unlabeled.size(); ++i) s_prime[i] = tracker->score(data.pool.index_of(unlabeled[i]));
        rec.w_used = contrastive::adjusted_top_fraction(config.w, unlabeled.size(), t);
        if (rec.w_used != config.w) {
          spdlog::info("cycle {}: raised w from {} to {:.6f} so that floor(w * {}) >= {}", cycle, config.w,
                       rec.w_used, unlabeled.size(), t);
        }
        if (!config.force_s_binary_ones) s_binary = contrastive::binarize_topw(s_prime, rec.w_used);
      }
      const auto j = acquisition::joint_scores(s_binary, u);
      const auto sel = acquisition::select_queries(j, s_binary, u, t);
      rec.shortfall = sel.shortfall;
      if (sel.shortfall > 0) {
        spdlog::warn("cycle {}: BudgetShortfall, {} of {} slots filled outside the positive joint scores", cycle,
                     sel.shortfall, t);
      }
      rec.pareto_passed = acquisition::pareto_audit(s_binary, u, sel.indices).passed;
      for (std::size_t r = 0; r < sel.indices.size(); ++r) {
        const auto i = sel.indices[r];
        batch.rows.push_back({r + 1, unlabeled[i], s_prime[i], s_binary[i], u[i], j[i]});
        if (s_binary[i] == 0) ++rec.selected_s0;
      }
      if (config.keep_scores) {
        rec.scores.reserve(unlabeled.size());
        for (std::size_t i = 0; i < unlabeled.size(); ++i) {
          rec.scores.push_back({unlabeled[i], s_prime[i], s_binary[i], u[i], j[i]});
        }
      }
      if (config.warm_start_classifier) previous = std::move(model);
    } else {
      auto order = unlabeled;
      Rng rng(derive_seed(config.seed, stream::kRandomPick, k));
      const std::size_t take = std::min(t, order.size());
      for (std::size_t r = 0; r < take; ++r) {
        std::uniform_int_distribution<std::size_t> pick(r, order.size() - 1);
        std::swap(order[r], order[pick(rng)]);
        batch.rows.push_back({r + 1, order[r], 0.0, 1, 0.0, 0.0});
      }
    }

    rec.queries = batch.rows;
    if (hooks.on_selection) hooks.on_selection(rec);
    const auto labels = checked_labels(batch, oracle.label(batch));
    state.pool.reveal_labels(labels);
    const auto queried = batch.ids();
    state.s_attributed.insert(queried.begin(), queried.end());
    if (similarity) tracker->add_references(data.pool, queried);

    spdlog::info("cycle {}/{}: trained on {}, accuracy {}, queried {}", cycle, schedule.size(), rec.train_size,
                 rec.metrics ? std::to_string(rec.metrics->accuracy) : std::string("n/a"), queried.size());
    state.records.push_back(std::move(rec));
    state.cycles_done = k;
    if (hooks.on_checkpoint) hooks.on_checkpoint(state, artifacts.get());
  }

  notify(hooks, "training", static_cast<int>(state.cycles_done));
  const auto ids = train_ids(config, state);
  const auto labels = labels_of(state, ids);
  const auto model = uncertainty::train_classifier(
      data.pool.subset(ids), labels, config.classifier,
      derive_seed(config.seed, stream::kClassifier, schedule.size() + 1),
      config.warm_start_classifier && previous ? &*previous : nullptr);

  RunReport report;
  report.config = config;
  report.pool_size = data.pool.size();
  report.test_size = data.test.size();
  report.initial_labeled = state.initial_labeled;
  report.initial_l = state.initial_l.size();
  report.initial_s = state.initial_labeled - report.initial_l;
  report.cycles = std::move(state.records);
  report.final_train_size = ids.size();
  report.final_labeled = state.pool.labeled_ids().size();
  report.final_metrics = uncertainty::evaluate(model, data.test, data.test_labels);
  spdlog::info("{} final: trained on {}, accuracy {:.4f}, f1 {:.4f}", to_string(config.setting), ids.size(),
               report.final_metrics.accuracy, report.final_metrics.f1);
  notify(hooks, "done", static_cast<int>(report.cycles.size()));
  return report;
}

RunReport run_experiment(const ExperimentConfig& config, const ExperimentData& data, Oracle& oracle,
                         const RunHooks& hooks) {
  notify(hooks, "training", 0);
  auto state = initialize_run(config, data, oracle);
  return continue_run(config, data, oracle, std::move(state), nullptr, hooks);
}

RunReport run_ads(ExperimentConfig config, const ExperimentData& data, Oracle& oracle) {
  config.setting = Setting::Ads;
  return run_experiment(config, data, oracle);
}

RunReport run_setting(Setting setting, const Dataset& normalized, const data::ProvenanceStore& provenance,
                      ExperimentConfig config) {
  config.setting = setting;
  const auto data = make_experiment_data(normalized, provenance, config);
  SimulatedOracle oracle(provenance);
  auto report = run_experiment(config, data, oracle);
  attach_pct_l(report, provenance);
  return report;
}

void to_json(json& j, const RunState& s) {
  json labels = json::array();
  for (const auto& [id, label] : s.pool.labels()) labels.push_back({id, static_cast<int>(label)});
  json records = json::array();
  for (const auto& r : s.records) {
    json rj = r;
    rj["scores"] = r.scores;
    records.push_back(rj);
  }
  j = {{"all_ids", [&] {
          std::vector<SampleId> all(s.pool.labeled_ids().begin(), s.pool.labeled_ids().end());
          all.insert(all.end(), s.pool.unlabeled_ids().begin(), s.pool.unlabeled_ids().end());
          std::sort(all.begin(), all.end());
          return all;
        }()},
       {"labels", labels},
       {"s_attributed", s.s_attributed},
       {"initial_l", s.initial_l},
       {"initial_labeled", s.initial_labeled},
       {"cycles_done", s.cycles_done},
       {"records", records}};
}

void from_json(const json& j, RunState& s) {
  try {
    const auto all = j.at("all_ids").get<std::vector<SampleId>>();
    s.pool = data::Pool(all);
    std::map<SampleId, ClassLabel> labels;
    for (const auto& e : j.at("labels")) labels[e.at(0).get<SampleId>()] = static_cast<ClassLabel>(e.at(1).get<int>());
    s.pool.reveal_labels(labels);
    s.s_attributed = j.at("s_attributed").get<std::set<SampleId>>();
    s.initial_l = j.at("initial_l").get<std::set<SampleId>>();
    s.initial_labeled = j.at("initial_labeled").get<std::size_t>();
    s.cycles_done = j.at("cycles_done").get<std::size_t>();
    s.records = j.at("records").get<std::vector<CycleRecord>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("malformed run state: ") + e.what());
  }
}

}  // namespace ads::loop
