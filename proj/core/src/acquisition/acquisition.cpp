#include "ads/acquisition/acquisition.hpp"

#include <algorithm>
#include <numeric>

#include "ads/error.hpp"

namespace ads::acquisition {

namespace {

// Descending by key, ties toward the lower index.
void rank_descending(std::vector<std::size_t>& idx, std::span<const double> key) {
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
}

}  // namespace

std::vector<double> joint_scores(std::span<const int> s_binary, std::span<const double> u) {
  if (s_binary.size() != u.size()) throw Error(ErrorCode::LengthMismatch, "S and U lengths differ");
  std::vector<double> j(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) j[i] = static_cast<double>(s_binary[i]) * u[i];
  return j;
}

std::vector<std::size_t> top_t(std::span<const double> j, std::size_t t) {
  if (j.empty()) throw Error(ErrorCode::EmptyPool, "no unlabeled candidates");
  if (t == 0) throw Error(ErrorCode::InvalidArgument, "t must be at least 1");
  std::vector<std::size_t> idx(j.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  rank_descending(idx, j);
  idx.resize(std::min(t, idx.size()));
  return idx;
}

Selection select_queries(std::span<const double> j, std::span<const int> s_binary, std::span<const double> u,
                         std::size_t t) {
  if (j.size() != s_binary.size() || j.size() != u.size()) {
    throw Error(ErrorCode::LengthMismatch, "J, S and U lengths differ");
  }
  if (j.empty()) throw Error(ErrorCode::EmptyPool, "no unlabeled candidates");
  if (t == 0) throw Error(ErrorCode::InvalidArgument, "t must be at least 1");

  std::vector<std::size_t> positive, flagged, rest;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (j[i] > 0.0) positive.push_back(i);
    else if (s_binary[i] != 0) flagged.push_back(i);
    else rest.push_back(i);
  }
  rank_descending(positive, j);
  rank_descending(flagged, u);
  rank_descending(rest, u);

  Selection sel;
  for (auto* group : {&positive, &flagged, &rest}) {
    for (auto i : *group) {
      if (sel.indices.size() == t) break;
      sel.indices.push_back(i);
      if (group != &positive) ++sel.shortfall;
    }
  }
  return sel;
}

ParetoAudit pareto_audit(std::span<const int> s_binary, std::span<const double> u,
                         std::span<const std::size_t> selected, std::size_t max_counterexamples) {
  if (s_binary.size() != u.size()) throw Error(ErrorCode::LengthMismatch, "S and U lengths differ");
  std::vector<char> chosen(u.size(), 0);
  for (auto q : selected) {
    if (q >= u.size()) throw Error(ErrorCode::InvalidArgument, "selected index out of range");
    chosen[q] = 1;
  }
  ParetoAudit audit;
  for (auto q : selected) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (chosen[i] || u[i] == u[q]) continue;
      const bool weak = s_binary[i] >= s_binary[q] && u[i] >= u[q];
      const bool strict = s_binary[i] > s_binary[q] || u[i] > u[q];
      if (weak && strict) {
        audit.passed = false;
        if (audit.counterexamples.size() < max_counterexamples) audit.counterexamples.push_back({i, q});
      }
    }
  }
  return audit;
}

}  // namespace ads::acquisition
