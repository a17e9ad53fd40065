#include "ads/loop/config.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "ads/error.hpp"

namespace ads::loop {

using nlohmann::json;

namespace {

constexpr std::pair<Setting, std::string_view> kSettingNames[] = {
    {Setting::Supervised, "supervised"}, {Setting::RandomS, "random-s"}, {Setting::RandomSL, "random-s+l"},
    {Setting::AdsNoCl, "ads-no-cl"},     {Setting::Ads, "ads"},
};

json adam_json(const nn::AdamConfig& a) {
  return {{"lr", a.lr}, {"beta1", a.beta1}, {"beta2", a.beta2}, {"eps", a.eps}};
}

void read_adam(const json& j, nn::AdamConfig& a) {
  a.lr = j.value("lr", a.lr);
  a.beta1 = j.value("beta1", a.beta1);
  a.beta2 = j.value("beta2", a.beta2);
  a.eps = j.value("eps", a.eps);
}

json classifier_json(const uncertainty::ClassifierConfig& c) {
  return {{"epochs", c.epochs}, {"batch_size", c.batch_size}, {"min_steps", c.min_steps}, {"adam", adam_json(c.adam)}};
}

void read_classifier(const json& j, uncertainty::ClassifierConfig& c) {
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.min_steps = j.value("min_steps", c.min_steps);
  if (j.contains("adam")) read_adam(j.at("adam"), c.adam);
}

}  // namespace

std::string_view to_string(Setting s) {
  for (const auto& [setting, name] : kSettingNames) {
    if (setting == s) return name;
  }
  return "?";
}

Setting parse_setting(std::string_view text) {
  for (const auto& [setting, name] : kSettingNames) {
    if (name == text) return setting;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown setting '" + std::string(text) +
                                            "' (supervised|random-s|random-s+l|ads-no-cl|ads)");
}

std::string_view to_string(TrainSet t) { return t == TrainSet::SAttributed ? "s-attributed" : "all-labeled"; }

TrainSet parse_train_set(std::string_view text) {
  if (text == "s-attributed") return TrainSet::SAttributed;
  if (text == "all-labeled") return TrainSet::AllLabeled;
  throw Error(ErrorCode::InvalidConfig, "train_set must be s-attributed|all-labeled");
}

TrainSet ExperimentConfig::effective_train_set() const {
  if (train_set) return *train_set;
  return setting == Setting::Ads ? TrainSet::SAttributed : TrainSet::AllLabeled;
}

std::vector<std::size_t> ExperimentConfig::schedule() const {
  const std::size_t total = budget();
  if (setting == Setting::Supervised || total == 0 || cycles == 0) return {};
  if (samples_per_cycle == 0) throw Error(ErrorCode::InvalidConfig, "samples_per_cycle must be positive");
  const std::size_t needed = (total + samples_per_cycle - 1) / samples_per_cycle;
  if (cycles * samples_per_cycle != total && cycles != needed) {
    throw Error(ErrorCode::InvalidConfig, "cycles * samples_per_cycle must equal the budget, or cycles must be "
                                          "ceil(budget / samples_per_cycle) with a truncated last cycle");
  }
  std::vector<std::size_t> out(cycles, samples_per_cycle);
  out.back() = total - samples_per_cycle * (cycles - 1);
  return out;
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidConfig, m); };
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) fail("test_fraction must lie in (0, 1)");
  if (!(init_fraction > 0.0 && init_fraction < 1.0)) fail("init_fraction must lie in (0, 1)");
  if (num_strata < 1) fail("num_strata must be positive");
  if (!(w > 0.0 && w <= 1.0)) fail("w must lie in (0, 1]");
  if (classifier.epochs == 0 || classifier.batch_size == 0) fail("classifier epochs/batch_size must be positive");
  if (cycle_classifier && (cycle_classifier->epochs == 0 || cycle_classifier->batch_size == 0)) {
    fail("cycle classifier epochs/batch_size must be positive");
  }
  if (similarity.batch_size == 0) fail("similarity batch_size must be positive");
  if (similarity.augmentations_per_anchor == 0) fail("augmentations_per_anchor must be positive");
  if (!(similarity.margin > 0.0)) fail("triplet margin must be positive");
  if (!(wta.sparsity > 0.0 && wta.sparsity <= 1.0)) fail("wta sparsity must lie in (0, 1]");
  if (wta.latent_dim == 0 || wta.batch_size == 0) fail("wta latent_dim/batch_size must be positive");
  (void)schedule();
}

void to_json(json& j, const ExperimentConfig& c) {
  j = json{
      {"setting", std::string(to_string(c.setting))},
      {"seed", c.seed},
      {"split_seed", c.split_seed ? json(*c.split_seed) : json(nullptr)},
      {"test_fraction", c.test_fraction},
      {"init_fraction", c.init_fraction},
      {"num_strata", c.num_strata},
      {"total_query_budget", c.budget()},
      {"cycles", c.cycles},
      {"samples_per_cycle", c.samples_per_cycle},
      {"w", c.w},
      {"train_set", std::string(to_string(c.effective_train_set()))},
      {"warm_start_classifier", c.warm_start_classifier},
      {"retrain_similarity_each_cycle", c.retrain_similarity_each_cycle},
      {"force_s_binary_ones", c.force_s_binary_ones},
      {"keep_scores", c.keep_scores},
      {"classifier", classifier_json(c.classifier)},
      {"cycle_classifier", c.cycle_classifier ? classifier_json(*c.cycle_classifier) : json(nullptr)},
      {"similarity",
       {{"embedding_dim", c.similarity.embedding_dim},
        {"margin", c.similarity.margin},
        {"epochs", c.similarity.epochs},
        {"batch_size", c.similarity.batch_size},
        {"augmentations_per_anchor", c.similarity.augmentations_per_anchor},
        {"resample_each_epoch", c.similarity.resample_each_epoch},
        {"mask_mode", std::string(wta::to_string(c.similarity.mask_mode))},
        {"adam", adam_json(c.similarity.adam)}}},
      {"wta",
       {{"latent_dim", c.wta.latent_dim},
        {"sparsity", c.wta.sparsity},
        {"epochs", c.wta.epochs},
        {"batch_size", c.wta.batch_size},
        {"adam", adam_json(c.wta.adam)}}},
  };
}

void from_json(const json& j, ExperimentConfig& c) {
  try {
    if (j.contains("setting")) c.setting = parse_setting(j.at("setting").get<std::string>());
    c.seed = j.value("seed", c.seed);
    if (j.contains("split_seed") && !j.at("split_seed").is_null()) c.split_seed = j.at("split_seed").get<std::uint64_t>();
    c.test_fraction = j.value("test_fraction", c.test_fraction);
    c.init_fraction = j.value("init_fraction", c.init_fraction);
    c.num_strata = j.value("num_strata", c.num_strata);
    c.total_query_budget = j.value("total_query_budget", c.total_query_budget);
    c.cycles = j.value("cycles", c.cycles);
    c.samples_per_cycle = j.value("samples_per_cycle", c.samples_per_cycle);
    c.w = j.value("w", c.w);
    if (j.contains("train_set") && !j.at("train_set").is_null()) {
      c.train_set = parse_train_set(j.at("train_set").get<std::string>());
    }
    c.warm_start_classifier = j.value("warm_start_classifier", c.warm_start_classifier);
    c.retrain_similarity_each_cycle = j.value("retrain_similarity_each_cycle", c.retrain_similarity_each_cycle);
    c.force_s_binary_ones = j.value("force_s_binary_ones", c.force_s_binary_ones);
    c.keep_scores = j.value("keep_scores", c.keep_scores);
    if (j.contains("classifier")) read_classifier(j.at("classifier"), c.classifier);
    if (j.contains("cycle_classifier")) {
      if (j.at("cycle_classifier").is_null()) {
        c.cycle_classifier.reset();
      } else {
        if (!c.cycle_classifier) c.cycle_classifier = c.classifier;
        read_classifier(j.at("cycle_classifier"), *c.cycle_classifier);
      }
    }
    if (j.contains("similarity")) {
      const auto& k = j.at("similarity");
      auto& s = c.similarity;
      s.embedding_dim = k.value("embedding_dim", s.embedding_dim);
      s.margin = k.value("margin", s.margin);
      s.epochs = k.value("epochs", s.epochs);
      s.batch_size = k.value("batch_size", s.batch_size);
      s.augmentations_per_anchor = k.value("augmentations_per_anchor", s.augmentations_per_anchor);
      s.resample_each_epoch = k.value("resample_each_epoch", s.resample_each_epoch);
      if (k.contains("mask_mode")) s.mask_mode = wta::parse_mask_mode(k.at("mask_mode").get<std::string>());
      if (k.contains("adam")) read_adam(k.at("adam"), s.adam);
    }
    if (j.contains("wta")) {
      const auto& k = j.at("wta");
      c.wta.latent_dim = k.value("latent_dim", c.wta.latent_dim);
      c.wta.sparsity = k.value("sparsity", c.wta.sparsity);
      c.wta.epochs = k.value("epochs", c.wta.epochs);
      c.wta.batch_size = k.value("batch_size", c.wta.batch_size);
      if (k.contains("adam")) read_adam(k.at("adam"), c.wta.adam);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("experiment config: ") + e.what());
  }
}

}  // namespace ads::loop
