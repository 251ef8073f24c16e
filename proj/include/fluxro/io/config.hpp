#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fluxro/coupled_spectrum.hpp"
#include "fluxro/gate.hpp"
#include "fluxro/noise.hpp"
#include "fluxro/readout.hpp"

namespace fluxro::io {

// Config sections keep the user-facing units (GHz, MHz, ns) so that emit and re-parse
// reproduce every value exactly; conversions to angular units happen in the accessors.

struct DeviceSection {
  double e_j_ghz = 4.75;
  double e_c_ghz = 1.25;
  double e_l_ghz = 1.5;
  double omega_r_ghz = 7.0;
  double g_mhz = 50.0;
  CouplingMode coupling = CouplingMode::LadderRwa;
  Truncation dims;

  bool operator==(const DeviceSection&) const = default;
};

struct ReadoutSection {
  double n_bar = 10.0;
  double eta = 1.0;
  double kappa_mhz = 5.0;
  double t_max_ns = 1000.0;
  double dt_ns = 0.05;
  FluxRamp ramp;
  DemodPhase demod;
  double chi_clamp_mhz = 50.0;

  bool operator==(const ReadoutSection&) const = default;
};

struct GateSection {
  std::vector<double> tau_g_ns{10.0, 20.0, 30.0, 40.0, 50.0};
  GateConfig config;
  std::string drive_frame = "lab";
  double flux = 0.5;

  bool operator==(const GateSection&) const = default;
};

struct NoiseSection {
  std::vector<double> scales{1e-2, 1e-3, 1e-4};
  std::size_t n_draws = 50;

  bool operator==(const NoiseSection&) const = default;
};

struct LandscapeSection {
  double e_j_min_ghz = 4.5;
  double e_j_max_ghz = 5.5;
  std::size_t n_e_j = 201;
  double f_min = 0.0;
  double f_max = 1.0;
  std::size_t n_f = 201;
  std::vector<LandscapeKind> quantities;  ///< omega_q, chi and the default transitions

  LandscapeSection();
  bool operator==(const LandscapeSection&) const = default;
};

struct ChiCurveSection {
  double f_min = 0.0;
  double f_max = 1.0;
  std::size_t n_points = 1001;
  double clamp_mhz = 50.0;

  bool operator==(const ChiCurveSection&) const = default;
};

struct SpectrumSection {
  double flux = 0.5;
  std::size_t levels = 10;

  bool operator==(const SpectrumSection&) const = default;
};

struct AnticrossingSection {
  Transition transition{3, 1};
  double f_lo = 0.55;
  double f_hi = 0.60;
  CouplingMode coupling = CouplingMode::ChargeCoupling;
  double tol = 1e-6;

  bool operator==(const AnticrossingSection&) const = default;
};

struct OutputSection {
  std::string dir = "out";
  unsigned workers = 0;  ///< 0: hardware concurrency

  bool operator==(const OutputSection&) const = default;
};

/// A key left at its default, with the value that was used.
struct DefaultUsed {
  std::string key;
  std::string value;  ///< JSON text

  bool operator==(const DefaultUsed&) const = default;
};

struct RunConfig {
  DeviceSection device;
  ReadoutSection readout;
  GateSection gate;
  NoiseSection noise;
  LandscapeSection landscape;
  ChiCurveSection chi_curve;
  SpectrumSection spectrum;
  AnticrossingSection anticrossing;
  OutputSection output;
  std::uint64_t seed = 0;
  std::vector<DefaultUsed> defaults;  ///< provenance, not part of equality

  Device to_device() const;
  ReadoutConfig readout_config() const;
  LandscapeAxes landscape_axes() const;
  NoiseSpec noise_spec(double scale) const;

  bool operator==(const RunConfig& o) const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

/// Every key written out explicitly. `with_output` false drops the output section, which
/// only controls where and how fast results are written.
std::string emit_config(const RunConfig& config, bool with_output = true);

}  // namespace fluxro::io
