#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "ads/data/dataset.hpp"

namespace ads::data {

// Labeled / unlabeled partition over one dataset. Mutation goes through
// reveal_labels only, which keeps the two id sets disjoint and exhaustive.
class Pool {
 public:
  Pool() = default;
  explicit Pool(std::span<const SampleId> all_ids);
  explicit Pool(const Dataset& dataset);

  const std::set<SampleId>& labeled_ids() const { return labeled_; }
  const std::set<SampleId>& unlabeled_ids() const { return unlabeled_; }
  const std::map<SampleId, ClassLabel>& labels() const { return labels_; }

  std::size_t total() const { return labeled_.size() + unlabeled_.size(); }
  bool is_labeled(SampleId id) const { return labeled_.contains(id); }
  ClassLabel label(SampleId id) const;

  // Moves `ids` into the labeled set. Validates every id before mutating, so a
  // failed call leaves the pool untouched.
  void reveal_labels(std::span<const SampleId> ids, std::span<const ClassLabel> labels);
  void reveal_labels(const std::map<SampleId, ClassLabel>& labels);

  std::vector<SampleId> unlabeled_vector() const { return {unlabeled_.begin(), unlabeled_.end()}; }
  std::vector<SampleId> labeled_vector() const { return {labeled_.begin(), labeled_.end()}; }

  friend bool operator==(const Pool&, const Pool&) = default;

 private:
  std::set<SampleId> labeled_;
  std::set<SampleId> unlabeled_;
  std::map<SampleId, ClassLabel> labels_;
};

}  // namespace ads::data
