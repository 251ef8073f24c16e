#include "fluxro/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fluxro/errors.hpp"
#include "fluxro/parallel.hpp"

namespace fluxro {

void NoiseSpec::validate() const {
  if (!(scale >= 0.0) || !std::isfinite(scale)) throw InvalidArgument("noise scale must be finite and >= 0");
  if (n_draws < 1) throw InvalidArgument("noise n_draws must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double standard_normal(std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t key = splitmix64(seed);
  constexpr double unit = 0x1.0p-53;
  const double u1 = static_cast<double>((splitmix64(key + 2 * index) >> 11) + 1) * unit;
  const double u2 = static_cast<double>(splitmix64(key + 2 * index + 1) >> 11) * unit;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

std::vector<double> sample_flux_offsets(const NoiseSpec& spec) {
  spec.validate();
  std::vector<double> out(spec.n_draws);
  for (std::size_t k = 0; k < spec.n_draws; ++k) out[k] = spec.scale * standard_normal(spec.seed, k);
  return out;
}

void summarize(McCurve& curve) {
  const auto len = curve.axis.size();
  std::vector<bool> skip(curve.draws.size(), false);
  for (auto k : curve.excluded) skip[k] = true;
  const double n = static_cast<double>(curve.n_effective());
  curve.mean = VecR::Zero(len);
  curve.stderr_mean = VecR::Zero(len);
  if (n == 0) {
    curve.mean.setConstant(std::numeric_limits<double>::quiet_NaN());
    curve.stderr_mean.setConstant(std::numeric_limits<double>::quiet_NaN());
    return;
  }
  for (std::size_t k = 0; k < curve.draws.size(); ++k)
    if (!skip[k]) curve.mean += curve.draws[k];
  curve.mean /= n;
  if (n < 2) return;
  for (std::size_t k = 0; k < curve.draws.size(); ++k)
    if (!skip[k]) curve.stderr_mean += (curve.draws[k] - curve.mean).cwiseAbs2();
  curve.stderr_mean = (curve.stderr_mean / (n - 1.0)).cwiseSqrt() / std::sqrt(n);
}

std::pair<double, double> noise_profile_range(const FluxRamp& ramp, double scale) {
  const double lo = std::min(ramp.f_start, ramp.f_end), hi = std::max(ramp.f_start, ramp.f_end);
  return {lo - 4.0 * scale, hi + 4.0 * scale};
}

NoisyReadout noisy_readout_snr(const ChiProfile& profile, const ReadoutConfig& config, const FluxRamp& ramp,
                               const NoiseSpec& spec, unsigned workers) {
  config.validate();
  ramp.validate();
  const auto offsets = sample_flux_offsets(spec);
  const std::size_t n = offsets.size();
  std::vector<VecR> snr(n), err(n);
  std::vector<char> out_of_range(n, 0);
  parallel_for(n, workers, [&](std::size_t k) {
    const double lo = std::min(ramp.f_start, ramp.f_end) + offsets[k];
    const double hi = std::max(ramp.f_start, ramp.f_end) + offsets[k];
    if (!profile.covers(lo, hi)) {
      out_of_range[k] = 1;
      return;
    }
    auto traj = simulate_readout(profile, config, ramp, offsets[k]);
    snr[k] = std::move(traj.snr);
    err[k] = std::move(traj.error);
  });

  NoisyReadout out;
  const TimeGrid grid{config.dt, config.steps()};
  for (McCurve* c : {&out.snr, &out.error}) {
    c->axis = VecR::LinSpaced(static_cast<Eigen::Index>(grid.steps + 1), 0.0, grid.dt * static_cast<double>(grid.steps));
    c->offsets = offsets;
    c->scale = spec.scale;
    c->seed = spec.seed;
    for (std::size_t k = 0; k < n; ++k)
      if (out_of_range[k]) c->excluded.push_back(k);
  }
  out.snr.draws = std::move(snr);
  out.error.draws = std::move(err);
  summarize(out.snr);
  summarize(out.error);
  return out;
}

McCurve noisy_gate_error(const Device& device, const GateConfig& config, const std::vector<PulseParams>& pulses,
                         const NoiseSpec& spec, unsigned workers, double flux) {
  config.validate();
  if (pulses.empty()) throw InvalidArgument("noisy_gate_error needs at least one pulse");
  const auto offsets = sample_flux_offsets(spec);
  const std::size_t n = offsets.size(), m = pulses.size();

  // Flatten (draw, pulse) so short and long gates share the workers; one system per draw.
  std::vector<GateSystem> systems(n);
  parallel_for(n, workers, [&](std::size_t k) {
    systems[k] = build_gate_system(device, FluxBias{flux + offsets[k]}, config);
  });
  std::vector<double> errors(n * m);
  parallel_for(n * m, workers, [&](std::size_t i) {
    const std::size_t k = i / m, j = i % m;
    errors[i] = 1.0 - evaluate_gate_subspace(systems[k], pulses[j], config.dt).fidelity;
  });

  McCurve c;
  c.axis.resize(static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) c.axis[static_cast<Eigen::Index>(j)] = pulses[j].tau_g;
  c.offsets = offsets;
  c.scale = spec.scale;
  c.seed = spec.seed;
  c.draws.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    c.draws[k] = Eigen::Map<const VecR>(errors.data() + k * m, static_cast<Eigen::Index>(m));
  summarize(c);
  return c;
}

}  // namespace fluxro
