#include "fluxro/io/cache.hpp"

#include <fstream>
#include <sstream>
#include <unistd.h>

#include <openssl/evp.h>

#include "fluxro/errors.hpp"

namespace fluxro::io {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw IoError("SHA-256 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

Cache::Cache(fs::path dir, int schema) : dir_(std::move(dir)), schema_(schema) {
  if (!enabled()) return;
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw IoError("cannot create cache directory '" + dir_.string() + "': " + ec.message());
}

fs::path Cache::entry_path(const json& key) const {
  const std::string h = sha256_hex(key.dump());
  return dir_ / h.substr(0, 2) / (h + ".json");
}

void Cache::quarantine(const fs::path& file) {
  std::error_code ec;
  fs::create_directories(dir_ / "quarantine", ec);
  const auto target =
      dir_ / "quarantine" / (file.filename().string() + "." + std::to_string(::getpid()) + "." + std::to_string(temp_++));
  fs::rename(file, target, ec);
  if (ec) fs::remove(file, ec);
  ++quarantined_;
}

std::optional<Cache::json> Cache::get(const json& key) {
  if (!enabled()) {
    ++misses_;
    return std::nullopt;
  }
  const auto file = entry_path(key);
  std::ifstream in(file, std::ios::binary);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  in.close();
  json entry;
  try {
    entry = json::parse(ss.str());
    if (!entry.is_object() || !entry.contains("schema") || !entry.contains("key") || !entry.contains("value"))
      throw std::runtime_error("incomplete entry");
  } catch (const std::exception&) {
    quarantine(file);
    ++misses_;
    return std::nullopt;
  }
  if (entry["schema"] != schema_ || entry["key"] != key) {
    ++misses_;
    return std::nullopt;
  }
  ++hits_;
  return entry["value"];
}

void Cache::put(const json& key, const json& value) {
  if (!enabled()) return;
  const auto file = entry_path(key);
  std::error_code ec;
  fs::create_directories(file.parent_path(), ec);
  if (ec) throw IoError("cannot create cache directory '" + file.parent_path().string() + "': " + ec.message());
  const auto tmp = file.parent_path() /
                   (file.filename().string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(temp_++));
  {
    std::ofstream out(tmp, std::ios::binary);
    out << json{{"schema", schema_}, {"key", key}, {"value", value}}.dump();
    if (!out) throw IoError("cannot write cache entry '" + tmp.string() + "'");
  }
  fs::rename(tmp, file, ec);
  if (ec) throw IoError("cannot publish cache entry '" + file.string() + "': " + ec.message());
}

Cache::json Cache::get_or_compute(const json& key, const std::function<json()>& compute) {
  if (auto hit = get(key)) return *hit;
  json value = compute();
  ++computations_;
  put(key, value);
  return value;
}

}  // namespace fluxro::io
