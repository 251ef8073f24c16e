#pragma once

#include <vector>

#include "fluxro/coupled_spectrum.hpp"
#include "fluxro/gate.hpp"
#include "json.hpp"

namespace fluxro::io {

using json = nlohmann::json;

/// Cache key of one landscape/profile cell.
json point_key(const Device& device, const EnergyParams& params, FluxBias flux,
               const std::vector<Transition>& transitions);
json to_json(const PointValues& v);
PointValues point_from_json(const json& j);

/// Layout: params and flux in GHz / reduced units, "eigenvalues_ghz" ascending (nu = omega / 2 pi),
/// "eigenvectors" row-major list of [re, im] pairs (dim x dim), plus "eigenvalues" in rad/ns
/// so that a reload is bit-exact.
json to_json(const Spectrum& s);
Spectrum spectrum_from_json(const json& j);

json pulse_key(const Device& device, const GateConfig& config, double flux, double tau_g, const PulseSearch& search);
json to_json(const PulseOptimum& p);
PulseOptimum pulse_from_json(const json& j);

}  // namespace fluxro::io
