#include "ads/util/csv.hpp"

#include <charconv>
#include <fstream>

#include "ads/error.hpp"

namespace ads::util {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    auto field = line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!field.empty() && (field.front() == ' ')) field.remove_prefix(1);
    while (!field.empty() && (field.back() == ' ' || field.back() == '\r')) field.remove_suffix(1);
    out.push_back(field);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view field) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::IoFailure, "bad number '" + std::string(field) + "'");
  }
  return v;
}

long long parse_int(std::string_view field) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw Error(ErrorCode::IoFailure, "bad integer '" + std::string(field) + "'");
  }
  return v;
}

void read_csv(const std::filesystem::path& path, std::string_view expected_header,
              const std::function<void(const std::vector<std::string_view>&)>& row) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::IoFailure, path.string() + " is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != expected_header) {
    throw Error(ErrorCode::IoFailure, path.string() + ": expected header '" + std::string(expected_header) + "'");
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    row(split_fields(line));
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace ads::util
