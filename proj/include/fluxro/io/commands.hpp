#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "fluxro/io/config.hpp"

namespace fluxro::io {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunOptions {
  std::filesystem::path out_dir = "out";
  unsigned workers = 1;
  bool use_cache = true;
  std::filesystem::path cache_dir;  ///< empty: <out_dir>/.cache
};

struct EmittedFile {
  std::string path;  ///< relative to the output directory
  std::string schema;
  std::string sha256;
  std::size_t bytes = 0;
};

struct RunReport {
  std::vector<EmittedFile> files;  ///< data files, manifest.json last
  std::uint64_t cache_hits = 0;
  std::uint64_t cache_computations = 0;
  std::uint64_t eigensolves = 0;
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand and writes its files plus manifest.json into opts.out_dir.
RunReport run_subcommand(const std::string& name, const RunConfig& config, const RunOptions& opts);

/// 2 configuration, 3 numerical, 4 I/O, 1 anything else.
int exit_code_for(const std::exception& e);

/// Machine-readable failure description.
std::string error_record(const std::string& subcommand, const std::exception& e);

}  // namespace fluxro::io
