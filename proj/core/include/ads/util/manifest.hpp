#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace ads::util {

std::string_view version();

// Lowercase hex SHA-256. sha256_file throws IoFailure.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes <dir>/manifest.json: {version, invocation, files: [{path, bytes, sha256}]}
// with paths relative to dir. Throws IoFailure.
void write_manifest(const std::filesystem::path& dir, const nlohmann::json& invocation,
                    std::span<const std::filesystem::path> files);

}  // namespace ads::util
