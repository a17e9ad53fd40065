#include "ads/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <nlohmann/json.hpp>

#include "ads/data/io.hpp"
#include "ads/error.hpp"
#include "ads/random.hpp"

namespace ads::synth {

using nlohmann::json;

int GeneratorConfig::count(Machine m) const {
  auto it = counts.find(m);
  return it == counts.end() ? 0 : it->second.total();
}

void GeneratorConfig::validate() const {
  if (window < 8) throw Error(ErrorCode::InvalidConfig, "window must be >= 8");
  for (const auto& [m, c] : counts) {
    if (c.normal < 0 || c.abnormal < 0) throw Error(ErrorCode::InvalidConfig, "negative sample count");
    if (!machines.contains(m)) throw Error(ErrorCode::InvalidConfig, "missing machine spec");
  }
  for (const auto& [m, spec] : machines) {
    if (!(spec.benign_pulse_fraction >= 0.0 && spec.benign_pulse_fraction <= 1.0)) {
      throw Error(ErrorCode::InvalidConfig, "benign pulse fraction must lie in [0, 1]");
    }
  }
  if (!(anomaly.length_fraction > 0.0 && anomaly.length_fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "anomaly length fraction must lie in (0, 1]");
  }
  if (ratio_constraint && count(Machine::L1) <= count(Machine::S1) + count(Machine::S2)) {
    throw Error(ErrorCode::InvalidConfig, "ratio constraint requires |L1| > |S1| + |S2|");
  }
}

MachineSpec default_machine_spec(Machine m) {
  MachineSpec spec;
  spec.machine = m;
  // x/y trace a closed loop, z a slower oscillation.
  spec.profile[0] = {1.0, 2.0, 0.0, 0.3, 5.0, 0.4};
  spec.profile[1] = {1.0, 2.0, std::numbers::pi / 2, 0.3, 5.0, 1.1};
  spec.profile[2] = {0.6, 1.0, 0.3, 0.2, 3.0, 0.0};
  switch (m) {
    case Machine::S1:
      spec.noise_sd = 0.04;
      spec.phase_jitter_sd = 0.05;
      break;
    case Machine::S2:
      spec.noise_sd = 0.05;
      spec.phase_jitter_sd = 0.08;
      break;
    case Machine::L1:
      spec.noise_sd = 0.12;
      spec.phase_jitter_sd = 0.05;
      spec.shift = {0.15, 1.3};
      spec.benign_pulse_fraction = 0.5;
      spec.anomaly_scale = 2.5;
      break;
  }
  return spec;
}

GeneratorConfig preset(std::string_view name) {
  GeneratorConfig c;
  for (auto m : {Machine::S1, Machine::S2, Machine::L1}) c.machines[m] = default_machine_spec(m);
  c.counts[Machine::S1] = {480, 320};
  c.counts[Machine::S2] = {480, 320};
  c.counts[Machine::L1] = {1200, 1200};
  c.anomaly = {0.125, 0.5};
  if (name == "default") return c;
  if (name == "hard") {
    c.machines[Machine::L1].shift = {0.08, 1.15};
    c.machines[Machine::S1].noise_sd = 0.06;
    c.machines[Machine::S2].noise_sd = 0.07;
    return c;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown preset '" + std::string(name) + "'");
}

std::vector<LabeledSample> generate_machine_data(const MachineSpec& spec, int n_normal, int n_abnormal,
                                                 std::uint64_t seed, const AnomalyConfig& anomaly,
                                                 std::size_t window, data::SampleId first_id) {
  if (n_normal < 0 || n_abnormal < 0) throw Error(ErrorCode::InvalidArgument, "negative sample count");
  const int total = n_normal + n_abnormal;
  std::vector<LabeledSample> out;
  out.reserve(static_cast<std::size_t>(total));

  const auto pulse_len = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(anomaly.length_fraction * static_cast<double>(window))));
  const double two_pi = 2.0 * std::numbers::pi;
  const double T = static_cast<double>(window);

  for (int i = 0; i < total; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(spec.machine) + 1, static_cast<std::uint64_t>(i)));
    std::normal_distribution<double> unit(0.0, 1.0);
    const bool abnormal = i >= n_normal;

    LabeledSample ls;
    ls.sample.id = first_id + i;
    ls.sample.signal.assign(window * data::kChannels, 0.0);
    ls.provenance = {spec.machine, abnormal ? data::ClassLabel::Abnormal : data::ClassLabel::Normal};

    const double jitter = spec.phase_jitter_sd * unit(rng);
    const double fs = spec.shift.frequency_scale;
    for (std::size_t ch = 0; ch < data::kChannels; ++ch) {
      const auto& p = spec.profile[ch];
      const double span = 2.0 * (p.amp1 + p.amp2);
      const double offset = spec.shift.offset * span / (1.0 - spec.shift.offset);
      for (std::size_t t = 0; t < window; ++t) {
        const double phase = two_pi * static_cast<double>(t) / T * fs;
        const double v = p.amp1 * std::sin(p.freq1 * phase + p.phase1 + jitter) +
                         p.amp2 * std::sin(p.freq2 * phase + p.phase2 + jitter);
        ls.sample.at(t, ch) = v + offset + spec.noise_sd * unit(rng);
      }
    }
    std::bernoulli_distribution benign(spec.benign_pulse_fraction);
    if (abnormal || benign(rng)) {
      std::uniform_int_distribution<std::size_t> start_dist(0, window - pulse_len);
      const auto start = start_dist(rng);
      const double amplitude = abnormal ? spec.anomaly_scale * anomaly.amplitude : anomaly.amplitude;
      for (std::size_t t = start; t < start + pulse_len; ++t) ls.sample.at(t, 2) += amplitude;
    }
    out.push_back(std::move(ls));
  }
  return out;
}

Benchmark generate_benchmark(const GeneratorConfig& config) {
  config.validate();
  std::vector<LabeledSample> all;
  for (auto m : {Machine::S1, Machine::S2, Machine::L1}) {
    auto it = config.counts.find(m);
    if (it == config.counts.end()) continue;
    auto part = generate_machine_data(config.machines.at(m), it->second.normal, it->second.abnormal,
                                      derive_seed(config.seed, stream::kGenerator), config.anomaly,
                                      config.window, 0);
    std::move(part.begin(), part.end(), std::back_inserter(all));
  }

  std::vector<std::size_t> order(all.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(config.seed, stream::kGenerator, 0xffff));
  std::shuffle(order.begin(), order.end(), rng);

  Benchmark bench;
  std::vector<data::Sample> samples;
  samples.reserve(all.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto& ls = all[order[k]];
    ls.sample.id = static_cast<data::SampleId>(k);
    bench.provenance.set(ls.sample.id, ls.provenance);
    samples.push_back(std::move(ls.sample));
  }
  bench.raw = data::Dataset(config.window, std::move(samples));
  return bench;
}

Benchmark build_benchmark(const GeneratorConfig& config, const std::filesystem::path& out_dir) {
  auto bench = generate_benchmark(config);
  data::write_dataset(out_dir, bench.raw, bench.provenance);
  return bench;
}

// JSON -----------------------------------------------------------------------

namespace {

void profile_to_json(json& j, const ChannelProfile& p) {
  j = {{"amp1", p.amp1}, {"freq1", p.freq1}, {"phase1", p.phase1},
       {"amp2", p.amp2}, {"freq2", p.freq2}, {"phase2", p.phase2}};
}

void profile_from_json(const json& j, ChannelProfile& p) {
  p.amp1 = j.value("amp1", p.amp1);
  p.freq1 = j.value("freq1", p.freq1);
  p.phase1 = j.value("phase1", p.phase1);
  p.amp2 = j.value("amp2", p.amp2);
  p.freq2 = j.value("freq2", p.freq2);
  p.phase2 = j.value("phase2", p.phase2);
}

}  // namespace

void to_json(json& j, const GeneratorConfig& c) {
  j = json::object();
  j["window"] = c.window;
  j["seed"] = c.seed;
  j["ratio_constraint"] = c.ratio_constraint;
  j["anomaly"] = {{"length_fraction", c.anomaly.length_fraction}, {"amplitude", c.anomaly.amplitude}};
  for (const auto& [m, counts] : c.counts) {
    j["counts"][std::string(data::to_string(m))] = {{"normal", counts.normal}, {"abnormal", counts.abnormal}};
  }
  for (const auto& [m, spec] : c.machines) {
    json s;
    s["noise_sd"] = spec.noise_sd;
    s["phase_jitter_sd"] = spec.phase_jitter_sd;
    s["shift"] = {{"offset", spec.shift.offset}, {"frequency_scale", spec.shift.frequency_scale}};
    s["benign_pulse_fraction"] = spec.benign_pulse_fraction;
    s["anomaly_scale"] = spec.anomaly_scale;
    for (const auto& p : spec.profile) {
      json pj;
      profile_to_json(pj, p);
      s["profile"].push_back(pj);
    }
    j["machines"][std::string(data::to_string(m))] = s;
  }
}

// Missing fields keep the value already in `c`, so a partial file acts as a
// set of overrides on top of a preset.
void from_json(const json& j, GeneratorConfig& c) {
  try {
    c.window = j.value("window", c.window);
    c.seed = j.value("seed", c.seed);
    c.ratio_constraint = j.value("ratio_constraint", c.ratio_constraint);
    if (j.contains("anomaly")) {
      c.anomaly.length_fraction = j["anomaly"].value("length_fraction", c.anomaly.length_fraction);
      c.anomaly.amplitude = j["anomaly"].value("amplitude", c.anomaly.amplitude);
    }
    if (j.contains("counts")) {
      for (const auto& [name, v] : j["counts"].items()) {
        auto& counts = c.counts[data::parse_machine(name)];
        counts.normal = v.value("normal", counts.normal);
        counts.abnormal = v.value("abnormal", counts.abnormal);
      }
    }
    if (j.contains("machines")) {
      for (const auto& [name, v] : j["machines"].items()) {
        const auto m = data::parse_machine(name);
        if (!c.machines.contains(m)) c.machines[m] = default_machine_spec(m);
        auto& spec = c.machines[m];
        spec.noise_sd = v.value("noise_sd", spec.noise_sd);
        spec.phase_jitter_sd = v.value("phase_jitter_sd", spec.phase_jitter_sd);
        spec.benign_pulse_fraction = v.value("benign_pulse_fraction", spec.benign_pulse_fraction);
        spec.anomaly_scale = v.value("anomaly_scale", spec.anomaly_scale);
        if (v.contains("shift")) {
          spec.shift.offset = v["shift"].value("offset", spec.shift.offset);
          spec.shift.frequency_scale = v["shift"].value("frequency_scale", spec.shift.frequency_scale);
        }
        if (v.contains("profile")) {
          for (std::size_t ch = 0; ch < data::kChannels && ch < v["profile"].size(); ++ch) {
            profile_from_json(v["profile"][ch], spec.profile[ch]);
          }
        }
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("generator config: ") + e.what());
  }
}

}  // namespace ads::synth
