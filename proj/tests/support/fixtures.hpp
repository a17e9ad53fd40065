#pragma once

#include <cstdint>

#include "ads/data/dataset.hpp"
#include "ads/loop/config.hpp"
#include "ads/synth/generator.hpp"

namespace ads::testing {

struct NormalizedBenchmark {
  data::Dataset normalized;
  data::ProvenanceStore provenance;
};

// Default generator shape at a quarter of the sample count.
synth::GeneratorConfig small_generator(std::uint64_t seed);
NormalizedBenchmark normalized_benchmark(const synth::GeneratorConfig& config);

// Experiment config with short training schedules; 2 cycles of 10 queries.
loop::ExperimentConfig fast_config(loop::Setting setting, std::uint64_t seed);

}  // namespace ads::testing
