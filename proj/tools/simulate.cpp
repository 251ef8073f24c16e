#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "fluxro/errors.hpp"
#include "fluxro/io/commands.hpp"
#include "fluxro/parallel.hpp"

namespace {

// Worker count: --workers, then FLUXRO_WORKERS, then output.workers, then the hardware.
unsigned resolve_workers(int flag, unsigned from_config) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (const char* env = std::getenv("FLUXRO_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw fluxro::ConfigError("invalid-value", "FLUXRO_WORKERS must be a positive integer", "FLUXRO_WORKERS");
    return static_cast<unsigned>(v);
  }
  if (from_config > 0) return from_config;
  return fluxro::default_workers();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fluxonium readout and gate simulator"};
  app.require_subcommand(1, 1);
  std::string config_path, out_dir;
  long long seed = -1;
  int workers = 0;
  bool no_cache = false;
  for (const auto& name : fluxro::io::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--seed", seed, "noise seed (overrides noise.seed)")->check(CLI::NonNegativeNumber);
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--no-cache", no_cache, "do not read or write the result cache");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();

  std::filesystem::path out = out_dir.empty() ? std::filesystem::path("out") : std::filesystem::path(out_dir);
  try {
    auto cfg = fluxro::io::parse_config(config_path);
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (out_dir.empty()) out = cfg.output.dir;
    fluxro::io::RunOptions opts;
    opts.out_dir = out;
    opts.workers = resolve_workers(workers, cfg.output.workers);
    opts.use_cache = !no_cache;
    const auto report = fluxro::io::run_subcommand(name, cfg, opts);
    for (const auto& f : report.files) std::cout << (out / f.path).string() << "\n";
    std::cerr << "cache hits " << report.cache_hits << ", computed " << report.cache_computations << ", eigensolves "
              << report.eigensolves << "\n";
    return 0;
  } catch (const std::exception& e) {
    const int code = fluxro::io::exit_code_for(e);
    const std::string record = fluxro::io::error_record(name, e);
    std::cerr << record;
    std::error_code ec;
    if (std::filesystem::is_directory(out, ec)) std::ofstream(out / "error.json") << record;
    return code;
  }
}
