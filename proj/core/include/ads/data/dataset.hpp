#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ads::data {

using SampleId = std::int64_t;

inline constexpr std::size_t kChannels = 3;
inline constexpr std::size_t kDefaultWindow = 64;

enum class Machine { S1, S2, L1 };
enum class ClassLabel { Normal = 0, Abnormal = 1 };
// Source identification (S vs L) is only collected with the initial annotations.
enum class Source { S, L };

std::string_view to_string(Machine m);
std::string_view to_string(ClassLabel c);
std::string_view to_string(Source s);
Machine parse_machine(std::string_view text);
ClassLabel parse_class_label(std::string_view text);
std::optional<ClassLabel> try_parse_class_label(std::string_view text);
Source source_of(Machine m);

// One fixed-length window of 3-channel monitoring signal, stored row-major
// as (t, channel).
struct Sample {
  SampleId id = 0;
  std::vector<double> signal;

  double at(std::size_t t, std::size_t ch) const { return signal[t * kChannels + ch]; }
  double& at(std::size_t t, std::size_t ch) { return signal[t * kChannels + ch]; }
  std::size_t window() const { return signal.size() / kChannels; }
};

// Ordered collection of samples sharing one window length. Sample order is the
// canonical index order used by every score vector.
class Dataset {
 public:
  Dataset() = default;
  Dataset(std::size_t window, std::vector<Sample> samples);

  std::size_t window() const { return window_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }

  const std::vector<Sample>& samples() const { return samples_; }
  const Sample& operator[](std::size_t index) const { return samples_[index]; }

  bool contains(SampleId id) const { return index_.contains(id); }
  std::size_t index_of(SampleId id) const;
  const Sample& by_id(SampleId id) const { return samples_[index_of(id)]; }
  std::vector<SampleId> ids() const;

  // Sub-dataset in the order given by `ids`.
  Dataset subset(std::span<const SampleId> ids) const;

 private:
  std::size_t window_ = kDefaultWindow;
  std::vector<Sample> samples_;
  std::unordered_map<SampleId, std::size_t> index_;
};

// Hidden ground truth. Only the oracle and evaluation layers hold one of these.
struct Provenance {
  Machine machine = Machine::S1;
  ClassLabel label = ClassLabel::Normal;
};

class ProvenanceStore {
 public:
  ProvenanceStore() = default;
  explicit ProvenanceStore(std::map<SampleId, Provenance> entries) : entries_(std::move(entries)) {}

  void set(SampleId id, Provenance p) { entries_[id] = p; }
  const Provenance& at(SampleId id) const;
  bool contains(SampleId id) const { return entries_.contains(id); }
  std::size_t size() const { return entries_.size(); }
  const std::map<SampleId, Provenance>& entries() const { return entries_; }

 private:
  std::map<SampleId, Provenance> entries_;
};

}  // namespace ads::data
