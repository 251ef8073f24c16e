#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace fluxro {

using cplx = std::complex<double>;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatC = Mat<cplx>;
using VecC = Vec<cplx>;
using VecR = Vec<double>;
using MatR = Mat<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Internal frequencies are angular (rad/ns). User-facing values are nu = omega / 2pi.
constexpr double from_ghz(double nu_ghz) { return two_pi * nu_ghz; }
constexpr double from_mhz(double nu_mhz) { return two_pi * nu_mhz * 1e-3; }
constexpr double to_ghz(double omega) { return omega / two_pi; }
constexpr double to_mhz(double omega) { return omega / two_pi * 1e3; }

/// Fluxonium energies as angular frequencies.
struct EnergyParams {
  double e_j = 0.0;
  double e_c = 0.0;
  double e_l = 0.0;

  /// Throws InvalidArgument unless e_c, e_l > 0 and e_j >= 0 with all finite.
  /// e_j = 0 is accepted as the harmonic limit.
  void validate() const;

  static EnergyParams from_ghz(double e_j_ghz, double e_c_ghz, double e_l_ghz) {
    return {fluxro::from_ghz(e_j_ghz), fluxro::from_ghz(e_c_ghz), fluxro::from_ghz(e_l_ghz)};
  }

  bool operator==(const EnergyParams&) const = default;
};

/// Reduced external flux f = Phi_ext / Phi_0.
struct FluxBias {
  double f = 0.0;

  double phase() const { return two_pi * f; }
  /// Canonical representative in [0, 1).
  FluxBias reduced() const;

  bool operator==(const FluxBias&) const = default;
};

}  // namespace fluxro
