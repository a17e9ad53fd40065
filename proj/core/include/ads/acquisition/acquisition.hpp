#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ads::acquisition {

// j_i = s_i * u_i. Throws LengthMismatch.
std::vector<double> joint_scores(std::span<const int> s_binary, std::span<const double> u);

struct Selection {
  std::vector<std::size_t> indices;  // in rank order
  // Slots filled after the strictly positive joint scores ran out.
  std::size_t shortfall = 0;
};

// Indices of the t largest j, ties toward the lower index. Throws EmptyPool
// (no candidates) and InvalidArgument (t == 0).
std::vector<std::size_t> top_t(std::span<const double> j, std::size_t t);

// Query selection over joint scores. Strictly positive j are taken first in
// descending order; remaining slots are filled from s_binary = 1 by
// descending u, then (only once those are exhausted) from s_binary = 0 by
// descending u. Every fill is counted in `shortfall`.
Selection select_queries(std::span<const double> j, std::span<const int> s_binary, std::span<const double> u,
                         std::size_t t);

struct Domination {
  std::size_t dominating = 0;  // unselected
  std::size_t dominated = 0;   // selected
};

struct ParetoAudit {
  bool passed = true;
  std::vector<Domination> counterexamples;
};

// Fails if an unselected index weakly dominates a selected one in (s, u) with
// at least one strict inequality. Pairs with equal u are skipped.
ParetoAudit pareto_audit(std::span<const int> s_binary, std::span<const double> u,
                         std::span<const std::size_t> selected, std::size_t max_counterexamples = 16);

}  // namespace ads::acquisition
