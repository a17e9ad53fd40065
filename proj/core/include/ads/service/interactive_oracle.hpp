#pragma once

#include <chrono>
#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ads/loop/oracle.hpp"

namespace ads::service {

struct PendingQuery {
  loop::QueryRow row;
  int cycle = 0;
  std::chrono::system_clock::time_point queued_at;
};

struct LabelSubmission {
  data::SampleId sample_id = 0;
  std::string label;  // "normal" | "abnormal"
  std::string annotator_id;
};

struct SubmitResult {
  data::SampleId sample_id = 0;
  std::size_t remaining = 0;
};

// Oracle whose class labels come from outside (an HTTP client). label() blocks
// until every queried id has exactly one accepted submission. The initial
// annotation, which also needs the source machine group, is delegated.
class InteractiveOracle final : public loop::Oracle {
 public:
  // idle_timeout == 0 waits forever.
  InteractiveOracle(loop::Oracle& initial_annotator, std::chrono::milliseconds idle_timeout);

  std::map<data::SampleId, loop::InitialAnnotation> annotate_initial(std::span<const data::SampleId> ids) override;
  // Throws OracleTimeout when no submission arrives for idle_timeout, and
  // InvalidArgument after cancel().
  std::map<data::SampleId, data::ClassLabel> label(const loop::QueryBatch& batch) override;

  // Throws NotPending (unknown or already labeled id) and BadLabel.
  SubmitResult submit(const LabelSubmission& submission);
  // Pending queries in rank order.
  std::vector<PendingQuery> pending() const;
  std::size_t pending_count() const;
  // Wakes a blocked label() call, which then throws.
  void cancel();

 private:
  loop::Oracle& initial_;
  std::chrono::milliseconds idle_timeout_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::vector<PendingQuery> queue_;
  std::map<data::SampleId, data::ClassLabel> answers_;
  bool cancelled_ = false;
};

}  // namespace ads::service
