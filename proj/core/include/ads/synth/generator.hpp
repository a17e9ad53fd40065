#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ads/data/dataset.hpp"

namespace ads::synth {

using data::Machine;

// Two sinusoids per channel emulate periodic toolpath motion.
struct ChannelProfile {
  double amp1 = 1.0;
  double freq1 = 2.0;  // cycles per window
  double phase1 = 0.0;
  double amp2 = 0.3;
  double freq2 = 5.0;
  double phase2 = 0.0;
};

struct MachineShift {
  // Offset expressed as a fraction of the normalized range it should occupy
  // after global min-max scaling.
  double offset = 0.0;
  double frequency_scale = 1.0;
};

struct MachineSpec {
  Machine machine = Machine::S1;
  std::array<ChannelProfile, data::kChannels> profile{};
  double noise_sd = 0.05;
  double phase_jitter_sd = 0.05;  // per-sample phase jitter, radians
  MachineShift shift{};
  // Fraction of normal samples carrying a pulse shaped like the anomaly, as a
  // machine-specific maneuver would. Makes the label rule machine-dependent.
  double benign_pulse_fraction = 0.0;
  // Anomaly amplitude on this machine relative to AnomalyConfig::amplitude.
  double anomaly_scale = 1.0;
};

struct AnomalyConfig {
  double length_fraction = 0.125;
  double amplitude = 0.1;  // absolute, added to channel 2
};

struct ClassCounts {
  int normal = 0;
  int abnormal = 0;
  int total() const { return normal + abnormal; }
};

struct GeneratorConfig {
  std::size_t window = data::kDefaultWindow;
  std::map<Machine, ClassCounts> counts;
  std::map<Machine, MachineSpec> machines;
  AnomalyConfig anomaly{};
  bool ratio_constraint = true;  // require |L1| > |S1| + |S2|
  std::uint64_t seed = 0;

  int count(Machine m) const;
  // Throws InvalidConfig.
  void validate() const;
};

GeneratorConfig preset(std::string_view name);  // "default" | "hard"
MachineSpec default_machine_spec(Machine m);

void to_json(nlohmann::json& j, const GeneratorConfig& c);
void from_json(const nlohmann::json& j, GeneratorConfig& c);

struct LabeledSample {
  data::Sample sample;
  data::Provenance provenance;
};

// Normal samples are base profile + Gaussian noise; abnormal ones add one
// contiguous square pulse on channel 2, as do benign_pulse_fraction of the
// normal ones. Sample ids are first_id, first_id+1, ...
// The RNG stream of each sample depends only on (seed, machine, index).
std::vector<LabeledSample> generate_machine_data(const MachineSpec& spec, int n_normal, int n_abnormal,
                                                 std::uint64_t seed, const AnomalyConfig& anomaly,
                                                 std::size_t window = data::kDefaultWindow,
                                                 data::SampleId first_id = 0);

struct Benchmark {
  data::Dataset raw;
  data::ProvenanceStore provenance;
};

// Whole benchmark in memory. Samples are shuffled before ids are assigned so
// neither id nor order reveals the machine.
Benchmark generate_benchmark(const GeneratorConfig& config);

// generate_benchmark + write in the dataset directory format.
Benchmark build_benchmark(const GeneratorConfig& config, const std::filesystem::path& out_dir);

}  // namespace ads::synth
