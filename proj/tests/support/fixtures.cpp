#include "fixtures.hpp"

#include "ads/data/normalize.hpp"

namespace ads::testing {

synth::GeneratorConfig small_generator(std::uint64_t seed) {
  auto c = synth::preset("default");
  c.seed = seed;
  c.counts[data::Machine::S1] = {120, 80};
  c.counts[data::Machine::S2] = {120, 80};
  c.counts[data::Machine::L1] = {300, 300};
  return c;
}

NormalizedBenchmark normalized_benchmark(const synth::GeneratorConfig& config) {
  auto bench = synth::generate_benchmark(config);
  return {data::normalize_minmax(bench.raw).dataset, std::move(bench.provenance)};
}

loop::ExperimentConfig fast_config(loop::Setting setting, std::uint64_t seed) {
  loop::ExperimentConfig c;
  c.setting = setting;
  c.seed = seed;
  c.cycles = 2;
  c.samples_per_cycle = 10;
  c.classifier.epochs = 5;
  c.classifier.min_steps = 150;
  c.similarity.epochs = 5;
  c.wta.epochs = 3;
  c.wta.latent_dim = 16;
  return c;
}

}  // namespace ads::testing
