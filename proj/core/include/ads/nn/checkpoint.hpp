#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "ads/nn/model.hpp"

namespace ads::nn {

// Checkpoint = <stem>.bin (flat little-endian float64 parameters in
// Model::params() order) + <stem>.json sidecar holding the ModelSpec, the
// offset/shape of every tensor, and optional extra sections.
void save_checkpoint(const std::filesystem::path& stem, const Model& model,
                     const nlohmann::json& extra = nlohmann::json::object());

struct LoadedCheckpoint {
  Model model;
  nlohmann::json sidecar;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& stem);

}  // namespace ads::nn
