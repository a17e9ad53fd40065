#include "ads/service/interactive_oracle.hpp"

#include <algorithm>
#include <utility>

#include "ads/error.hpp"

namespace ads::service {

InteractiveOracle::InteractiveOracle(loop::Oracle& initial_annotator, std::chrono::milliseconds idle_timeout)
    : initial_(initial_annotator), idle_timeout_(idle_timeout) {}

std::map<data::SampleId, loop::InitialAnnotation> InteractiveOracle::annotate_initial(
    std::span<const data::SampleId> ids) {
  return initial_.annotate_initial(ids);
}

std::map<data::SampleId, data::ClassLabel> InteractiveOracle::label(const loop::QueryBatch& batch) {
  std::unique_lock lock(mu_);
  const auto now = std::chrono::system_clock::now();
  queue_.clear();
  answers_.clear();
  for (const auto& row : batch.rows) queue_.push_back({row, batch.cycle, now});
  cv_.notify_all();

  while (!queue_.empty()) {
    if (cancelled_) throw Error(ErrorCode::InvalidArgument, "interactive oracle cancelled");
    const auto before = queue_.size();
    if (idle_timeout_.count() == 0) {
      cv_.wait(lock);
    } else if (cv_.wait_for(lock, idle_timeout_) == std::cv_status::timeout && queue_.size() == before &&
               !cancelled_) {
      throw Error(ErrorCode::OracleTimeout, "no label submitted for " + std::to_string(idle_timeout_.count()) +
                                                " ms; " + std::to_string(queue_.size()) + " still pending");
    }
  }
  return std::exchange(answers_, {});
}

SubmitResult InteractiveOracle::submit(const LabelSubmission& submission) {
  const auto label = data::try_parse_class_label(submission.label);
  if (!label) throw Error(ErrorCode::BadLabel, "label must be 'normal' or 'abnormal', got '" + submission.label + "'");
  std::lock_guard lock(mu_);
  auto it = std::find_if(queue_.begin(), queue_.end(),
                         [&](const PendingQuery& q) { return q.row.id == submission.sample_id; });
  if (it == queue_.end()) {
    throw Error(ErrorCode::NotPending, "sample " + std::to_string(submission.sample_id) + " is not pending");
  }
  queue_.erase(it);
  answers_[submission.sample_id] = *label;
  cv_.notify_all();
  return {submission.sample_id, queue_.size()};
}

std::vector<PendingQuery> InteractiveOracle::pending() const {
  std::lock_guard lock(mu_);
  return queue_;
}

std::size_t InteractiveOracle::pending_count() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

void InteractiveOracle::cancel() {
  std::lock_guard lock(mu_);
  cancelled_ = true;
  cv_.notify_all();
}

}  // namespace ads::service
