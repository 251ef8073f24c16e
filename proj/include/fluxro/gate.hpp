#pragma once

#include <cstddef>
#include <vector>

#include "fluxro/coupled_spectrum.hpp"
#include "fluxro/types.hpp"

namespace fluxro {

/// DRAG pulse parameters. `anharmonicity` is the alpha baked into the derivative
/// component and stays fixed with the waveform.
struct PulseParams {
  double tau_g = 20.0;  ///< ns
  double eps_d = 0.0;   ///< rad/ns
  double lambda = 0.0;
  double omega_d = 0.0;  ///< rad/ns
  double anharmonicity = 0.0;

  void validate() const;
  bool operator==(const PulseParams&) const = default;
};

struct GateConfig {
  std::size_t levels_fluxonium = 6;
  std::size_t levels_resonator = 3;
  double dt = 2e-3;  ///< ns
  bool qubit_only = false;

  void validate() const;
  bool operator==(const GateConfig&) const = default;
};

/// In-phase envelope (1 - cos(2 pi t / tau_g)) / 2 on [0, tau_g].
double envelope(double t, double tau_g);
/// (lambda / alpha) ds/dt.
double drag_envelope(double t, double tau_g, double lambda, double anharm);
/// eps_d [2 s(t) sin(omega_d t) + s'(t) cos(omega_d t)].
double drive_coefficient(const PulseParams& pulse, double t);
MatC build_drive_hamiltonian(const PulseParams& pulse, const MatC& charge, double t);

/// Static part of the gate simulation at one flux bias.
struct GateSystem {
  MatC hamiltonian;    ///< product basis (qubit levels x resonator levels)
  MatC drive;          ///< charge operator on the same space
  MatC computational;  ///< columns: dressed |0,0>, |1,0>
  VecR energies;       ///< dressed energies, ascending
  double qubit_frequency = 0.0;  ///< dressed w(1,0) - w(0,0)
  double bare_anharmonicity = 0.0;
};

GateSystem build_gate_system(const Device& device, FluxBias flux, const GateConfig& config);

/// Time-ordered propagator over [0, tau_g]. Fourth-order Magnus steps with exact
/// exponentials; throws NumericalFailure if the unitarity defect exceeds 1e-8.
MatC propagate_gate(const GateSystem& system, const PulseParams& pulse, double dt);

/// Propagates only the computational columns U P. Same Magnus steps as propagate_gate,
/// exponential applied by a Taylor series on the column block; throws NumericalFailure if
/// the columns lose orthonormality beyond 1e-8.
MatC propagate_subspace(const GateSystem& system, const PulseParams& pulse, double dt);

struct GateResult {
  double fidelity = 0.0;
  double leakage = 0.0;
  double virtual_z = 0.0;  ///< phase removed from |1>
  MatC propagator;  ///< full U, or the column block U P from evaluate_gate_subspace
  PulseParams params;

  double error() const { return 1.0 - fidelity; }
};

/// Average X-gate fidelity of the projected propagator, (Tr M^dag M + |Tr M|^2) / 6,
/// with leakage 1 - Tr(M^dag M) / 2. When `remove_z` is set a single phase on |1>
/// is optimized out first.
GateResult gate_fidelity(const MatC& propagator, const MatC& computational, bool remove_z = true);

GateResult evaluate_gate(const GateSystem& system, const PulseParams& pulse, double dt);
/// Same fidelity and leakage from U P only; used by the optimizer and the noise sweeps.
GateResult evaluate_gate_subspace(const GateSystem& system, const PulseParams& pulse, double dt);

struct PulseSearch {
  std::size_t eps_points = 25;
  double eps_span = 2.0;  ///< grid covers [estimate / span, estimate * span]
  std::size_t lambda_points = 17;
  double lambda_min = -2.0;
  double lambda_max = 2.0;
  double simplex_tol = 1e-6;
  int max_iterations = 400;
};

struct PulseOptimum {
  PulseParams pulse;
  double fidelity = 0.0;
  double grid_fidelity = 0.0;
  double rabi_estimate = 0.0;  ///< eps_d from the two-level pulse-area estimate
  int evaluations = 0;
};

/// Grid search over (eps_d, lambda) then Nelder-Mead refinement, at fixed omega_d equal
/// to the dressed qubit frequency of `system`.
PulseOptimum optimize_pulse(const GateSystem& system, double tau_g, double dt, unsigned workers,
                            const PulseSearch& search = {});

}  // namespace fluxro
