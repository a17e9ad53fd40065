#include "ads/data/pool.hpp"

#include <string>

#include "ads/error.hpp"

namespace ads::data {

Pool::Pool(std::span<const SampleId> all_ids) : unlabeled_(all_ids.begin(), all_ids.end()) {
  if (unlabeled_.size() != all_ids.size()) {
    throw Error(ErrorCode::InvalidArgument, "pool ids must be unique");
  }
}

Pool::Pool(const Dataset& dataset) {
  for (const auto& s : dataset.samples()) unlabeled_.insert(s.id);
}

ClassLabel Pool::label(SampleId id) const {
  auto it = labels_.find(id);
  if (it == labels_.end()) throw Error(ErrorCode::UnknownId, "sample " + std::to_string(id) + " is not labeled");
  return it->second;
}

void Pool::reveal_labels(std::span<const SampleId> ids, std::span<const ClassLabel> labels) {
  if (ids.size() != labels.size()) throw Error(ErrorCode::LengthMismatch, "ids and labels differ in length");
  std::set<SampleId> seen;
  for (auto id : ids) {
    if (labeled_.contains(id)) throw Error(ErrorCode::AlreadyLabeled, "sample " + std::to_string(id));
    if (!unlabeled_.contains(id)) throw Error(ErrorCode::UnknownId, "sample " + std::to_string(id));
    if (!seen.insert(id).second) throw Error(ErrorCode::AlreadyLabeled, "sample " + std::to_string(id) + " repeated");
  }
  for (std::size_t i = 0; i < ids.size(); ++i) {
    unlabeled_.erase(ids[i]);
    labeled_.insert(ids[i]);
    labels_[ids[i]] = labels[i];
  }
}

void Pool::reveal_labels(const std::map<SampleId, ClassLabel>& labels) {
  std::vector<SampleId> ids;
  std::vector<ClassLabel> values;
  for (const auto& [id, label] : labels) {
    ids.push_back(id);
    values.push_back(label);
  }
  reveal_labels(ids, values);
}

}  // namespace ads::data
