#include <spdlog/spdlog.h>

#include "ads/error.hpp"
#include "ads/synth/generator.hpp"
#include "ads/util/manifest.hpp"
#include "common.hpp"

namespace ads::cli {

namespace {

struct GenerateFlags {
  std::filesystem::path out;
  std::filesystem::path config_file;
  std::string preset = "default";
  std::uint64_t seed = 0;
  std::size_t window = 0;
  double anomaly_amplitude = 0.0;
  double anomaly_length = 0.0;
  double noise_sd = 0.0;
  double phase_jitter = 0.0;
  double l1_offset = 0.0;
  double l1_freq = 0.0;
  double l1_benign = 0.0;
  double l1_anomaly_scale = 0.0;
  std::vector<int> s1, s2, l1;
  bool no_ratio = false;
};

}  // namespace

void add_generate(CLI::App& app, Context& ctx, int& rc) {
  auto f = std::make_shared<GenerateFlags>();
  auto* cmd = app.add_subcommand("generate", "Generate the synthetic three-machine benchmark");
  cmd->add_option("--out", f->out, "Output dataset directory")->required();
  cmd->add_option("--preset", f->preset, "default | hard")->check(CLI::IsMember({"default", "hard"}));
  cmd->add_option("--config", f->config_file, "Generator config JSON (replaces the preset)")
      ->check(CLI::ExistingFile);
  auto* seed = cmd->add_option("--seed", f->seed, "Generator seed");
  auto* window = cmd->add_option("--window", f->window, "Samples per window")->check(CLI::PositiveNumber);
  auto* amp = cmd->add_option("--anomaly-amplitude", f->anomaly_amplitude, "Pulse amplitude on channel 2");
  auto* len = cmd->add_option("--anomaly-length", f->anomaly_length, "Pulse length as a window fraction")
                  ->check(CLI::Range(0.0, 1.0));
  auto* noise = cmd->add_option("--noise-sd", f->noise_sd, "Noise sd on every machine")->check(CLI::NonNegativeNumber);
  auto* jitter = cmd->add_option("--phase-jitter", f->phase_jitter, "Phase jitter sd on every machine (radians)")
                     ->check(CLI::NonNegativeNumber);
  auto* offset = cmd->add_option("--l1-offset", f->l1_offset, "L1 offset, fraction of the normalized range");
  auto* freq = cmd->add_option("--l1-freq-scale", f->l1_freq, "L1 frequency scale")->check(CLI::PositiveNumber);
  auto* benign = cmd->add_option("--l1-benign-fraction", f->l1_benign, "Normal L1 samples carrying a pulse")
                     ->check(CLI::Range(0.0, 1.0));
  auto* ascale = cmd->add_option("--l1-anomaly-scale", f->l1_anomaly_scale, "L1 anomaly amplitude multiplier")
                     ->check(CLI::PositiveNumber);
  auto* s1 = cmd->add_option("--s1", f->s1, "S1 counts: NORMAL ABNORMAL")->expected(2);
  auto* s2 = cmd->add_option("--s2", f->s2, "S2 counts: NORMAL ABNORMAL")->expected(2);
  auto* l1 = cmd->add_option("--l1", f->l1, "L1 counts: NORMAL ABNORMAL")->expected(2);
  cmd->add_flag("--no-ratio-constraint", f->no_ratio, "Allow |L1| <= |S1| + |S2|");

  cmd->callback([&ctx, &rc, f, seed, window, amp, len, noise, jitter, offset, freq, benign, ascale, s1, s2, l1] {
    synth::GeneratorConfig c = f->config_file.empty() ? synth::preset(f->preset)
                                                      : read_json_file(f->config_file).get<synth::GeneratorConfig>();
    if (*seed) c.seed = f->seed;
    if (*window) c.window = f->window;
    if (*amp) c.anomaly.amplitude = f->anomaly_amplitude;
    if (*len) c.anomaly.length_fraction = f->anomaly_length;
    for (auto& [machine, spec] : c.machines) {
      if (*noise) spec.noise_sd = f->noise_sd;
      if (*jitter) spec.phase_jitter_sd = f->phase_jitter;
    }
    auto& l1_spec = c.machines[data::Machine::L1];
    if (*offset) l1_spec.shift.offset = f->l1_offset;
    if (*freq) l1_spec.shift.frequency_scale = f->l1_freq;
    if (*benign) l1_spec.benign_pulse_fraction = f->l1_benign;
    if (*ascale) l1_spec.anomaly_scale = f->l1_anomaly_scale;
    auto set_counts = [&](CLI::Option* opt, const std::vector<int>& v, data::Machine m) {
      if (*opt) c.counts[m] = {v[0], v[1]};
    };
    set_counts(s1, f->s1, data::Machine::S1);
    set_counts(s2, f->s2, data::Machine::S2);
    set_counts(l1, f->l1, data::Machine::L1);
    if (f->no_ratio) c.ratio_constraint = false;
    try {
      c.validate();
    } catch (const Error& e) {
      throw CLI::ValidationError("generator", e.what());
    }

    const auto bench = synth::build_benchmark(c, f->out);
    write_json_file(f->out / "generator.json", c);
    const std::vector<std::filesystem::path> files{"samples.csv", "provenance.csv", "meta.json", "generator.json"};
    util::write_manifest(f->out, invocation("generate", ctx.argv), files);
    spdlog::info("wrote {} samples to {}", bench.raw.size(), f->out.string());
    rc = 0;
  });
}

}  // namespace ads::cli
