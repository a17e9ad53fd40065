#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ads/acquisition/acquisition.hpp"
#include "ads/contrastive/similarity.hpp"
#include "ads/data/dataset.hpp"
#include "ads/nn/adam.hpp"
#include "ads/nn/losses.hpp"
#include "ads/nn/model.hpp"
#include "ads/uncertainty/classifier.hpp"

using namespace ads;

namespace {

nn::Tensor gaussian(nn::Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  nn::Tensor t(std::move(shape));
  for (auto& v : t.values()) v = n(rng);
  return t;
}

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Labeled x unlabeled embedding sets of the default benchmark's size.
void BM_SimilarityScores(benchmark::State& state) {
  const auto labeled = gaussian({static_cast<std::size_t>(state.range(0)), 16}, 1);
  const auto unlabeled = gaussian({static_cast<std::size_t>(state.range(1)), 16}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(contrastive::similarity_scores(labeled, unlabeled));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(BM_SimilarityScores)->Args({200, 3000})->Args({600, 3000});

void BM_Locmax(benchmark::State& state) {
  const auto v = uniform(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(contrastive::locmax(v, v.size() / 4));
}
BENCHMARK(BM_Locmax)->Arg(1000)->Arg(10000);

void BM_SelectQueries(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto s_prime = uniform(n, 4);
  const auto u = uniform(n, 5);
  const auto s = contrastive::locmax(s_prime, n / 4);
  const auto j = acquisition::joint_scores(s, u);
  for (auto _ : state) benchmark::DoNotOptimize(acquisition::select_queries(j, s, u, 80));
}
BENCHMARK(BM_SelectQueries)->Arg(3000);

void BM_Entropy(benchmark::State& state) {
  const auto q = uniform(static_cast<std::size_t>(state.range(0)), 6);
  std::vector<uncertainty::ProbRow> rows;
  for (double p : q) rows.push_back({p, 1.0 - p});
  for (auto _ : state) benchmark::DoNotOptimize(uncertainty::entropy_scores(rows));
}
BENCHMARK(BM_Entropy)->Arg(3000);

// One forward/backward/Adam update on a batch of 32 windows.
void BM_ClassifierStep(benchmark::State& state) {
  nn::Model model(nn::classifier_spec(data::kDefaultWindow), 7);
  const auto x = gaussian({32, data::kChannels, data::kDefaultWindow}, 8);
  std::vector<int> labels(32);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 2);
  nn::AdamState adam;
  const nn::AdamConfig config{};
  for (auto _ : state) {
    model.zero_grad();
    const auto loss = nn::cross_entropy_loss(model.forward(x), labels);
    model.backward(loss.grad);
    nn::adam_step(model.params(), adam, config);
  }
}
BENCHMARK(BM_ClassifierStep);

void BM_EmbeddingInference(benchmark::State& state) {
  const nn::Model model(nn::embedding_spec(data::kDefaultWindow), 9);
  const auto x = gaussian({256, data::kChannels, data::kDefaultWindow}, 10);
  for (auto _ : state) benchmark::DoNotOptimize(model.infer(x));
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_EmbeddingInference);

}  // namespace

BENCHMARK_MAIN();
