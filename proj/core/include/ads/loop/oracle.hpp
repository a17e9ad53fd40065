#pragma once

#include <map>
#include <span>
#include <vector>

#include "ads/data/dataset.hpp"

namespace ads::loop {

struct InitialAnnotation {
  data::Source source = data::Source::S;
  data::ClassLabel label = data::ClassLabel::Normal;

  friend bool operator==(const InitialAnnotation&, const InitialAnnotation&) = default;
};

// One queried sample as shown to the annotator.
struct QueryRow {
  std::size_t rank = 0;
  data::SampleId id = 0;
  double s_prime = 0.0;
  int s_binary = 0;
  double u = 0.0;
  double j = 0.0;

  friend bool operator==(const QueryRow&, const QueryRow&) = default;
};

struct QueryBatch {
  int cycle = 0;
  std::vector<QueryRow> rows;

  std::vector<data::SampleId> ids() const;
};

// The annotator. The initial annotation also identifies the source machine
// group; every later request returns class labels only.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::map<data::SampleId, InitialAnnotation> annotate_initial(std::span<const data::SampleId> ids) = 0;
  // Must return exactly one label per queried id.
  virtual std::map<data::SampleId, data::ClassLabel> label(const QueryBatch& batch) = 0;
};

// Answers from the hidden ground truth, instantly. Throws UnknownId.
class SimulatedOracle final : public Oracle {
 public:
  explicit SimulatedOracle(const data::ProvenanceStore& provenance) : provenance_(&provenance) {}

  std::map<data::SampleId, InitialAnnotation> annotate_initial(std::span<const data::SampleId> ids) override;
  std::map<data::SampleId, data::ClassLabel> label(const QueryBatch& batch) override;
  std::map<data::SampleId, data::ClassLabel> label(std::span<const data::SampleId> ids) const;

 private:
  const data::ProvenanceStore* provenance_;
};

}  // namespace ads::loop
