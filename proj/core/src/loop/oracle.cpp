#include "ads/loop/oracle.hpp"

namespace ads::loop {

std::vector<data::SampleId> QueryBatch::ids() const {
  std::vector<data::SampleId> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.id);
  return out;
}

std::map<data::SampleId, InitialAnnotation> SimulatedOracle::annotate_initial(std::span<const data::SampleId> ids) {
  std::map<data::SampleId, InitialAnnotation> out;
  for (auto id : ids) {
    const auto& p = provenance_->at(id);
    out[id] = {data::source_of(p.machine), p.label};
  }
  return out;
}

std::map<data::SampleId, data::ClassLabel> SimulatedOracle::label(const QueryBatch& batch) {
  return label(batch.ids());
}

std::map<data::SampleId, data::ClassLabel> SimulatedOracle::label(std::span<const data::SampleId> ids) const {
  std::map<data::SampleId, data::ClassLabel> out;
  for (auto id : ids) out[id] = provenance_->at(id).label;
  return out;
}

}  // namespace ads::loop
