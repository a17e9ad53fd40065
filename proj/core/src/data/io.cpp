#include "ads/data/io.hpp"

#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "ads/error.hpp"
#include "ads/util/csv.hpp"

namespace ads::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  return out;
}

}  // namespace

void write_dataset(const fs::path& dir, const Dataset& raw, const ProvenanceStore& provenance) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  {
    auto out = open_out(dir / "samples.csv");
    out << "sample_id,t,ch0,ch1,ch2\n";
    for (const auto& s : raw.samples()) {
      for (std::size_t t = 0; t < s.window(); ++t) {
        out << s.id << ',' << t;
        for (std::size_t ch = 0; ch < kChannels; ++ch) out << ',' << util::format_double(s.at(t, ch));
        out << '\n';
      }
    }
    if (!out) throw Error(ErrorCode::IoFailure, "write failed for samples.csv");
  }
  {
    auto out = open_out(dir / "provenance.csv");
    out << "sample_id,machine,class_label\n";
    for (const auto& s : raw.samples()) {
      const auto& p = provenance.at(s.id);
      out << s.id << ',' << to_string(p.machine) << ',' << to_string(p.label) << '\n';
    }
  }
  {
    const auto normalized = normalize_minmax(raw);
    DatasetMeta meta;
    meta.window = raw.window();
    meta.ranges = normalized.ranges;
    json j;
    j["window"] = meta.window;
    j["channels"] = meta.channel_names;
    j["normalization"] = json::array();
    for (const auto& r : meta.ranges) j["normalization"].push_back({{"min", r.min}, {"max", r.max}});
    auto out = open_out(dir / "meta.json");
    out << j.dump(2) << '\n';
  }
}

Dataset read_samples(const fs::path& dir) {
  const auto meta = read_meta(dir);
  std::map<SampleId, Sample> samples;
  util::read_csv(dir / "samples.csv", "sample_id,t,ch0,ch1,ch2", [&](const auto& f) {
    if (f.size() != 5) throw Error(ErrorCode::IoFailure, "samples.csv: expected 5 columns");
    const auto id = static_cast<SampleId>(util::parse_int(f[0]));
    const auto t = static_cast<std::size_t>(util::parse_int(f[1]));
    if (t >= meta.window) throw Error(ErrorCode::ShapeMismatch, "samples.csv: t out of window");
    auto& s = samples[id];
    if (s.signal.empty()) {
      s.id = id;
      s.signal.assign(meta.window * kChannels, 0.0);
    }
    for (std::size_t ch = 0; ch < kChannels; ++ch) s.at(t, ch) = util::parse_double(f[2 + ch]);
  });
  std::vector<Sample> ordered;
  ordered.reserve(samples.size());
  for (auto& [id, s] : samples) ordered.push_back(std::move(s));
  return Dataset(meta.window, std::move(ordered));
}

DatasetMeta read_meta(const fs::path& dir) {
  std::ifstream in(dir / "meta.json");
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + (dir / "meta.json").string());
  json j;
  try {
    in >> j;
    DatasetMeta meta;
    meta.window = j.at("window").get<std::size_t>();
    meta.channel_names = j.at("channels").get<std::array<std::string, kChannels>>();
    const auto& norm = j.at("normalization");
    if (norm.size() != kChannels) throw Error(ErrorCode::IoFailure, "meta.json: need 3 normalization ranges");
    for (std::size_t ch = 0; ch < kChannels; ++ch) {
      meta.ranges[ch] = {norm[ch].at("min").get<double>(), norm[ch].at("max").get<double>()};
    }
    return meta;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("meta.json: ") + e.what());
  }
}

ProvenanceStore read_provenance(const fs::path& dir) {
  ProvenanceStore store;
  util::read_csv(dir / "provenance.csv", "sample_id,machine,class_label", [&](const auto& f) {
    if (f.size() != 3) throw Error(ErrorCode::IoFailure, "provenance.csv: expected 3 columns");
    store.set(static_cast<SampleId>(util::parse_int(f[0])), {parse_machine(f[1]), parse_class_label(f[2])});
  });
  return store;
}

LoadedDataset load_normalized(const fs::path& dir) {
  auto raw = read_samples(dir);
  auto meta = read_meta(dir);
  return {apply_minmax(raw, meta.ranges), meta};
}

}  // namespace ads::data
