#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ads::util {

// Minimal CSV for the numeric/identifier tables this project writes. Fields
// never contain commas or quotes, so no quoting is performed.
std::vector<std::string_view> split_fields(std::string_view line);

double parse_double(std::string_view field);
long long parse_int(std::string_view field);

// Calls `row` for every data line after the header. The header must match
// `expected_header` exactly.
void read_csv(const std::filesystem::path& path, std::string_view expected_header,
              const std::function<void(const std::vector<std::string_view>&)>& row);

// Shortest round-trippable text for a double.
std::string format_double(double v);

}  // namespace ads::util
