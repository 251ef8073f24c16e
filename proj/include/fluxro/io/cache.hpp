#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "json.hpp"

namespace fluxro::io {

/// SHA-256 of `data` as lowercase hex.
std::string sha256_hex(std::string_view data);

inline constexpr int kCacheSchema = 1;

/// Content-addressed result store. Entries live at <dir>/<h[0:2]>/<h>.json where h is the
/// SHA-256 of the canonical key text; each entry repeats its key and schema version, and a
/// hit requires both to match. Unreadable entries move to <dir>/quarantine. Writes go to a
/// temporary file and are published by rename.
class Cache {
 public:
  using json = nlohmann::json;

  /// An empty `dir` disables the cache: every lookup misses and nothing is written.
  explicit Cache(std::filesystem::path dir, int schema = kCacheSchema);

  bool enabled() const { return !dir_.empty(); }
  std::optional<json> get(const json& key);
  void put(const json& key, const json& value);

  /// Returns the stored value or computes, stores and returns it.
  json get_or_compute(const json& key, const std::function<json()>& compute);

  std::uint64_t hits() const { return hits_; }
  std::uint64_t misses() const { return misses_; }
  std::uint64_t computations() const { return computations_; }
  std::uint64_t quarantined() const { return quarantined_; }

  std::filesystem::path entry_path(const json& key) const;

 private:
  void quarantine(const std::filesystem::path& file);

  std::filesystem::path dir_;
  int schema_;
  std::atomic<std::uint64_t> hits_{0}, misses_{0}, computations_{0}, quarantined_{0}, temp_{0};
};

}  // namespace fluxro::io
