#include "ads/util/manifest.hpp"

#include <array>
#include <fstream>
#include <memory>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "ads/error.hpp"

#ifndef ADS_VERSION
#define ADS_VERSION "0.0.0"
#endif

namespace ads::util {

namespace fs = std::filesystem;

std::string_view version() { return ADS_VERSION; }

namespace {

struct DigestDeleter {
  void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error(ErrorCode::IoFailure, "sha256 init failed");
    }
  }
  void update(const char* data, std::size_t n) {
    if (EVP_DigestUpdate(ctx_.get(), data, n) != 1) throw Error(ErrorCode::IoFailure, "sha256 update failed");
  }
  std::string hex() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx_.get(), md.data(), &len) != 1) throw Error(ErrorCode::IoFailure, "sha256 final failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
      out.push_back(kHex[md[i] >> 4]);
      out.push_back(kHex[md[i] & 0xf]);
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, DigestDeleter> ctx_;
};

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  Sha256 h;
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return h.hex();
}

void write_manifest(const fs::path& dir, const nlohmann::json& invocation, std::span<const fs::path> files) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& f : files) {
    const auto full = f.is_absolute() ? f : dir / f;
    std::error_code ec;
    const auto bytes = fs::file_size(full, ec);
    if (ec) throw Error(ErrorCode::IoFailure, "cannot stat " + full.string());
    entries.push_back({{"path", fs::relative(full, dir).generic_string()},
                       {"bytes", bytes},
                       {"sha256", sha256_file(full)}});
  }
  const auto path = dir / "manifest.json";
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out << nlohmann::json{{"version", version()}, {"invocation", invocation}, {"files", entries}}.dump(2) << '\n';
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

}  // namespace ads::util
