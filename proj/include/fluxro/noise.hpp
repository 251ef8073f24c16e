#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fluxro/gate.hpp"
#include "fluxro/readout.hpp"

namespace fluxro {

struct NoiseSpec {
  double scale = 0.0;  ///< flux offset standard deviation, units of Phi_0
  std::size_t n_draws = 50;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const NoiseSpec&) const = default;
};

/// SplitMix64 output function applied to x.
std::uint64_t splitmix64(std::uint64_t x);

/// Standard normal for draw `index`: u1, u2 are the top 53 bits of
/// splitmix64(splitmix64(seed) + 2 index) and splitmix64(splitmix64(seed) + 2 index + 1),
/// u1 mapped to (0, 1]; x = sqrt(-2 ln u1) cos(2 pi u2).
double standard_normal(std::uint64_t seed, std::uint64_t index);

/// delta_k = scale * x_k, k = 0 .. n_draws - 1.
std::vector<double> sample_flux_offsets(const NoiseSpec& spec);

/// Per-draw curves on a common axis with index-ordered statistics. Excluded draws keep
/// their offset and an empty curve.
struct McCurve {
  VecR axis;
  std::vector<double> offsets;
  std::vector<VecR> draws;
  std::vector<std::size_t> excluded;
  VecR mean;
  VecR stderr_mean;
  double scale = 0.0;
  std::uint64_t seed = 0;

  std::size_t n_draws() const { return offsets.size(); }
  std::size_t n_excluded() const { return excluded.size(); }
  std::size_t n_effective() const { return n_draws() - n_excluded(); }
};

/// Fills mean and standard error (sample deviation / sqrt(n)) from the included draws.
void summarize(McCurve& curve);

/// Flux interval a chi profile must cover for `ramp` under noise of `scale` (4 sigma margin).
std::pair<double, double> noise_profile_range(const FluxRamp& ramp, double scale);

struct NoisyReadout {
  McCurve snr;
  McCurve error;
};

/// Each draw shifts the whole flux trajectory by delta_k. Draws whose shifted trajectory
/// leaves the profile are excluded and counted.
NoisyReadout noisy_readout_snr(const ChiProfile& profile, const ReadoutConfig& config, const FluxRamp& ramp,
                               const NoiseSpec& spec, unsigned workers);

/// Each draw evaluates every fixed pulse at f = 0.5 + delta_k; the curve axis is tau_g.
McCurve noisy_gate_error(const Device& device, const GateConfig& config, const std::vector<PulseParams>& pulses,
                         const NoiseSpec& spec, unsigned workers, double flux = 0.5);

}  // namespace fluxro
