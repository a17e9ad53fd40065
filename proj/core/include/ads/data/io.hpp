#pragma once

#include <array>
#include <filesystem>
#include <string>

#include "ads/data/dataset.hpp"
#include "ads/data/normalize.hpp"

namespace ads::data {

// On-disk dataset directory:
//   samples.csv     sample_id,t,ch0,ch1,ch2   (raw signal, long format)
//   provenance.csv  sample_id,machine,class_label
//   meta.json       window, channel names, per-channel normalization min/max
struct DatasetMeta {
  std::size_t window = kDefaultWindow;
  std::array<std::string, kChannels> channel_names{"x", "y", "z"};
  ChannelRanges ranges{};
};

void write_dataset(const std::filesystem::path& dir, const Dataset& raw,
                   const ProvenanceStore& provenance);

Dataset read_samples(const std::filesystem::path& dir);
DatasetMeta read_meta(const std::filesystem::path& dir);

// Evaluation/oracle side only; training code paths never call this.
ProvenanceStore read_provenance(const std::filesystem::path& dir);

struct LoadedDataset {
  Dataset normalized;
  DatasetMeta meta;
};

// Reads samples.csv + meta.json and applies the stored normalization.
LoadedDataset load_normalized(const std::filesystem::path& dir);

}  // namespace ads::data
