#include "ads/nn/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "ads/error.hpp"

namespace ads::nn {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path with_suffix(const fs::path& stem, const char* suffix) {
  fs::path p = stem;
  p += suffix;
  return p;
}

std::uint64_t to_little(std::uint64_t bits) {
  if constexpr (std::endian::native == std::endian::little) {
    return bits;
  } else {
    std::uint64_t out = 0;
    for (int i = 0; i < 8; ++i) out |= ((bits >> (8 * i)) & 0xffu) << (8 * (7 - i));
    return out;
  }
}

}  // namespace

void save_checkpoint(const fs::path& stem, const Model& model, const json& extra) {
  if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
  const auto values = model.flat_values();
  {
    std::ofstream out(with_suffix(stem, ".bin"), std::ios::binary);
    if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + with_suffix(stem, ".bin").string());
    for (double v : values) {
      const auto bits = to_little(std::bit_cast<std::uint64_t>(v));
      char buf[8];
      std::memcpy(buf, &bits, 8);
      out.write(buf, 8);
    }
  }
  json sidecar = extra;
  sidecar["format"] = "f64le";
  sidecar["model"] = model.spec();
  sidecar["tensors"] = json::array();
  std::size_t offset = 0;
  for (const auto* p : model.params()) {
    sidecar["tensors"].push_back({{"name", p->name}, {"offset", offset}, {"shape", p->value.shape()}});
    offset += p->value.size();
  }
  sidecar["num_values"] = offset;
  std::ofstream out(with_suffix(stem, ".json"));
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + with_suffix(stem, ".json").string());
  out << sidecar.dump(2) << '\n';
}

LoadedCheckpoint load_checkpoint(const fs::path& stem) {
  std::ifstream js(with_suffix(stem, ".json"));
  if (!js) throw Error(ErrorCode::IoFailure, "cannot open " + with_suffix(stem, ".json").string());
  LoadedCheckpoint loaded;
  try {
    js >> loaded.sidecar;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::IoFailure, std::string("checkpoint sidecar: ") + e.what());
  }
  loaded.model = Model(loaded.sidecar.at("model").get<ModelSpec>(), 0);
  const auto n = loaded.model.num_params();
  if (loaded.sidecar.value("num_values", std::size_t{0}) != n) {
    throw Error(ErrorCode::IoFailure, "checkpoint size does not match its model spec");
  }
  std::ifstream bin(with_suffix(stem, ".bin"), std::ios::binary);
  if (!bin) throw Error(ErrorCode::IoFailure, "cannot open " + with_suffix(stem, ".bin").string());
  std::vector<double> values(n);
  for (auto& v : values) {
    char buf[8];
    if (!bin.read(buf, 8)) throw Error(ErrorCode::IoFailure, "checkpoint payload truncated");
    std::uint64_t bits = 0;
    std::memcpy(&bits, buf, 8);
    v = std::bit_cast<double>(to_little(bits));
  }
  loaded.model.set_flat_values(values);
  return loaded;
}

}  // namespace ads::nn
