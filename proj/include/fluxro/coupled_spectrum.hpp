#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fluxro/qubit_core.hpp"
#include "fluxro/types.hpp"

namespace fluxro {

/// Readout resonator, angular units.
struct ResonatorParams {
  double omega_r = 0.0;
  double kappa = 0.0;
  double g = 0.0;

  void validate() const;
  bool operator==(const ResonatorParams&) const = default;
};

enum class CouplingMode {
  ChargeCoupling,  ///< g n (a + a^dag)
  LadderRwa,       ///< g (a c^dag + a^dag c)
};

const char* to_string(CouplingMode mode);
CouplingMode coupling_from_string(const std::string& name);

/// Two-stage truncation: oscillator basis, kept fluxonium eigenstates, resonator Fock states.
struct Truncation {
  std::size_t fluxonium_dim = 40;
  std::size_t kept_levels = 8;
  std::size_t resonator_levels = 8;

  void validate() const;
  bool operator==(const Truncation&) const = default;
};

struct Device {
  EnergyParams energies;
  ResonatorParams resonator;
  CouplingMode coupling = CouplingMode::LadderRwa;
  Truncation dims;

  /// E_J/2pi = 4.75, E_C/2pi = 1.25, E_L/2pi = 1.5 GHz; omega_r/2pi = 7 GHz, g/2pi = 50 MHz, kappa/2pi = 5 MHz.
  static Device reference();
  bool operator==(const Device&) const = default;
};

/// Coupled Hamiltonian in the product basis, index = i_q * m + n_r.
/// `qubit_operator` is the charge operator for ChargeCoupling and the lowering
/// operator for LadderRwa, both expressed in the basis of `qubit_energies`.
MatC build_coupled_hamiltonian(const VecR& qubit_energies, const MatC& qubit_operator,
                               const ResonatorParams& res, CouplingMode mode,
                               std::size_t resonator_levels);
MatC build_coupled_hamiltonian(const Spectrum& bare, const ResonatorParams& res, CouplingMode mode,
                               std::size_t kept_levels, std::size_t resonator_levels);
MatC build_coupled_hamiltonian(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                               CouplingMode mode, const Truncation& dims);

struct CoupledEigensystem {
  VecR energies;  ///< ascending
  MatC vectors;   ///< columns in the product basis
  std::size_t kept_levels = 0;
  std::size_t resonator_levels = 0;

  Eigen::Index product_index(std::size_t qubit, std::size_t photons) const {
    return static_cast<Eigen::Index>(qubit * resonator_levels + photons);
  }
};

CoupledEigensystem diagonalize_coupled(const MatC& hamiltonian, std::size_t kept_levels,
                                       std::size_t resonator_levels);

/// Bare label (i, n) -> dressed eigenstate.
struct DressedLevels {
  std::size_t kept_levels = 0;
  std::size_t resonator_levels = 0;
  std::vector<Eigen::Index> assignment;  ///< row-major over (i, n)
  std::vector<double> quality;           ///< overlap^2 of the assigned pair
  VecR energies;                         ///< dressed energies by dressed index
  bool warn = false;                     ///< some watched label has quality < kWarnQuality

  Eigen::Index index(std::size_t qubit, std::size_t photons) const {
    return assignment.at(qubit * resonator_levels + photons);
  }
  double energy(std::size_t qubit, std::size_t photons) const { return energies(index(qubit, photons)); }
  double quality_of(std::size_t qubit, std::size_t photons) const {
    return quality.at(qubit * resonator_levels + photons);
  }
};

inline constexpr double kWarnQuality = 0.6;
inline constexpr double kResonantQuality = 0.25;

/// Greedy assignment by descending overlap, each dressed state used once.
/// The warn flag watches labels with i < k/2 and n < m/2, away from the truncation edge.
DressedLevels assign_dressed_levels(const CoupledEigensystem& system);

struct DressedPoint {
  Spectrum bare;
  DressedLevels levels;
  double omega_r = 0.0;
};

DressedPoint dressed_point(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                           CouplingMode mode, const Truncation& dims);

/// chi from (w|1,1> - w|1,0>) - (w|0,1> - w|0,0>) = 2 chi.
/// Throws ResonanceRegion when any of the four labels has quality below 0.25.
double dispersive_shift(const DressedLevels& levels);
double dispersive_shift(const DressedPoint& point);
double dispersive_shift(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                        CouplingMode mode, const Truncation& dims);

/// (w|i,0> - w|j,0>) - omega_r for i > j.
double transition_detuning(const DressedPoint& point, std::size_t i, std::size_t j);
double transition_detuning(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                           CouplingMode mode, const Truncation& dims, std::size_t i, std::size_t j);

using Transition = std::pair<std::size_t, std::size_t>;

inline const std::vector<Transition>& default_transitions() {
  static const std::vector<Transition> t{{1, 0}, {2, 0}, {2, 1}, {3, 0}, {3, 1}, {3, 2}};
  return t;
}

// ---------------------------------------------------------------------------
// Landscapes

enum class CellStatus { Ok, Clamped, Resonant };
const char* to_string(CellStatus status);

enum class ValueKind { Chi, OmegaQ, Delta };

struct LandscapeKind {
  ValueKind kind = ValueKind::Chi;
  Transition transition{0, 0};  ///< Delta only

  std::string name() const;
  bool operator==(const LandscapeKind&) const = default;
};

/// Raw per-point values. nullopt marks the resonance region for that quantity.
struct PointValues {
  double omega_q = 0.0;
  std::optional<double> chi;
  std::vector<std::optional<double>> deltas;  ///< aligned with the requested transitions
  double min_quality = 1.0;

  bool operator==(const PointValues&) const = default;
};

PointValues evaluate_point(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                           CouplingMode mode, const Truncation& dims,
                           const std::vector<Transition>& transitions);

struct LandscapeGrid {
  std::vector<double> e_j;  ///< angular
  std::vector<double> f;
  LandscapeKind kind;
  MatR raw;      ///< unclamped value, NaN where resonant
  MatR emitted;  ///< clamped/saturated value
  Eigen::Matrix<CellStatus, Eigen::Dynamic, Eigen::Dynamic> status;
  double clamp = 0.0;  ///< 0 means no clamp
};

struct LandscapeAxes {
  double e_j_min = from_ghz(4.5);
  double e_j_max = from_ghz(5.5);
  std::size_t n_e_j = 201;
  double f_min = 0.0;
  double f_max = 1.0;
  std::size_t n_f = 201;

  std::vector<double> e_j_axis() const;
  std::vector<double> f_axis() const;
  bool operator==(const LandscapeAxes&) const = default;
};

inline constexpr double kChiClampLandscape = from_mhz(5.0);
inline constexpr double kDeltaClampLandscape = from_ghz(5.0);

/// Function evaluating a single cell; lets callers put a cache in front.
using PointEvaluator =
    std::function<PointValues(const EnergyParams&, FluxBias)>;

/// Fills one grid per kind. Cells are independent and assembled by index.
std::vector<LandscapeGrid> compute_landscapes(const LandscapeAxes& axes, const Device& device,
                                              const std::vector<LandscapeKind>& kinds,
                                              unsigned workers,
                                              const PointEvaluator& evaluator = {});

LandscapeGrid chi_landscape(const LandscapeAxes& axes, const Device& device, unsigned workers);

/// Saturates resonant entries with the sign of the previous valid entry and clamps the rest.
void saturate_series(std::span<const double> raw, double clamp, std::span<double> emitted,
                     std::span<CellStatus> status);

// ---------------------------------------------------------------------------
// Anticrossings

struct Anticrossing {
  double f_star = 0.0;
  double gap = 0.0;     ///< minimum dressed splitting, angular
  double g_ij = 0.0;    ///< gap / 2
  double t_swap = 0.0;  ///< pi / (2 g_ij), ns
};

/// Locates the avoided crossing between |i,0> and |j,1> inside [f_lo, f_hi].
Anticrossing find_anticrossing(const EnergyParams& params, const ResonatorParams& res,
                               CouplingMode mode, const Truncation& dims, Transition transition,
                               double f_lo, double f_hi, double tol = 1e-6);

/// Splitting of the two dressed states carrying the most |i,0> + |j,1> weight.
double hybrid_gap(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                  CouplingMode mode, const Truncation& dims, Transition transition);

}  // namespace fluxro
