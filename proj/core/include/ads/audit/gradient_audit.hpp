#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ads/nn/gradcheck.hpp"

namespace ads::audit {

struct AuditEntry {
  std::string name;  // "layer:<kind>", "loss:<name>" or "model:<name>"
  nn::GradCheckReport report;
};

// Finite-difference check of every layer kind, every loss and the three
// project networks (classifier, embedding, WTA autoencoder) on random Gaussian
// inputs. Inputs are drawn away from data so ReLU/max kinks are hit with
// probability zero.
std::vector<AuditEntry> gradient_audit(std::uint64_t seed, double tol = 1e-3);

}  // namespace ads::audit
