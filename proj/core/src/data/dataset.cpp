#include "ads/data/dataset.hpp"

#include <string>

#include "ads/error.hpp"

namespace ads::data {

std::string_view to_string(Machine m) {
  switch (m) {
    case Machine::S1: return "S1";
    case Machine::S2: return "S2";
    case Machine::L1: return "L1";
  }
  return "?";
}

std::string_view to_string(ClassLabel c) {
  return c == ClassLabel::Normal ? "normal" : "abnormal";
}

std::string_view to_string(Source s) { return s == Source::S ? "S" : "L"; }

Machine parse_machine(std::string_view text) {
  if (text == "S1") return Machine::S1;
  if (text == "S2") return Machine::S2;
  if (text == "L1") return Machine::L1;
  throw Error(ErrorCode::InvalidArgument, "unknown machine '" + std::string(text) + "'");
}

std::optional<ClassLabel> try_parse_class_label(std::string_view text) {
  if (text == "normal") return ClassLabel::Normal;
  if (text == "abnormal") return ClassLabel::Abnormal;
  return std::nullopt;
}

ClassLabel parse_class_label(std::string_view text) {
  if (auto label = try_parse_class_label(text)) return *label;
  throw Error(ErrorCode::BadLabel, "class label must be normal|abnormal, got '" + std::string(text) + "'");
}

Source source_of(Machine m) { return m == Machine::L1 ? Source::L : Source::S; }

Dataset::Dataset(std::size_t window, std::vector<Sample> samples)
    : window_(window), samples_(std::move(samples)) {
  if (window_ == 0) throw Error(ErrorCode::InvalidArgument, "window length must be positive");
  index_.reserve(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const auto& s = samples_[i];
    if (s.signal.size() != window_ * kChannels) {
      throw Error(ErrorCode::ShapeMismatch,
                  "sample " + std::to_string(s.id) + " has " + std::to_string(s.signal.size()) +
                      " values, expected " + std::to_string(window_ * kChannels));
    }
    if (!index_.emplace(s.id, i).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate sample id " + std::to_string(s.id));
    }
  }
}

std::size_t Dataset::index_of(SampleId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorCode::UnknownId, "sample id " + std::to_string(id));
  return it->second;
}

std::vector<SampleId> Dataset::ids() const {
  std::vector<SampleId> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.id);
  return out;
}

Dataset Dataset::subset(std::span<const SampleId> ids) const {
  std::vector<Sample> picked;
  picked.reserve(ids.size());
  for (auto id : ids) picked.push_back(by_id(id));
  return Dataset(window_, std::move(picked));
}

const Provenance& ProvenanceStore::at(SampleId id) const {
  auto it = entries_.find(id);
  if (it == entries_.end()) throw Error(ErrorCode::UnknownId, "no provenance for sample " + std::to_string(id));
  return it->second;
}

}  // namespace ads::data
