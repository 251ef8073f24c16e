#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>

#include <Eigen/Eigenvalues>

#include "fluxro/errors.hpp"
#include "fluxro/types.hpp"

namespace fluxro {

/// Truncated harmonic-oscillator basis used for the bare fluxonium.
struct HoBasis {
  std::size_t dim = 40;
  double phi0 = 1.0;

  /// phi0 = (8 E_C / E_L)^(1/4).
  static HoBasis for_params(const EnergyParams& params, std::size_t dim) {
    return {dim, std::pow(8.0 * params.e_c / params.e_l, 0.25)};
  }
};

template <typename Real>
struct HoOperators {
  using Matrix = Mat<std::complex<Real>>;
  Matrix annihilation;
  Matrix creation;
  Matrix charge;  ///< n = -i/(sqrt2 phi0) (c - c^dag)
  Matrix flux;    ///< phi = phi0/sqrt2 (c + c^dag)
};

/// Ladder, charge and phase operators on the first `dim` oscillator states.
template <typename Real = double>
HoOperators<Real> build_ho_operators(std::size_t dim, Real phi0) {
  using C = std::complex<Real>;
  using Matrix = typename HoOperators<Real>::Matrix;
  if (dim < 2) throw InvalidDimension("oscillator basis needs dim >= 2");
  if (!(phi0 > Real(0))) throw InvalidArgument("phi0 must be positive");

  const auto n = static_cast<Eigen::Index>(dim);
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) c(k - 1, k) = C(std::sqrt(Real(k)), Real(0));
  Matrix cd = c.adjoint();

  const Real root2 = std::sqrt(Real(2));
  HoOperators<Real> ops;
  ops.charge = (C(Real(0), Real(-1)) / (root2 * phi0)) * (c - cd);
  ops.flux = C(phi0 / root2, Real(0)) * (c + cd);
  ops.annihilation = std::move(c);
  ops.creation = std::move(cd);
  return ops;
}

/// f(A) for Hermitian A through its eigendecomposition.
template <typename Derived, typename Fn>
auto hermitian_function(const Eigen::MatrixBase<Derived>& a, Fn&& fn) {
  using Matrix = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) throw NumericalFailure("eigensolver failed in operator function");
  const auto& w = es.eigenvalues();
  const auto& v = es.eigenvectors();
  Matrix out = v * w.unaryExpr([&](auto x) { return typename Matrix::Scalar(fn(x)); }).asDiagonal() *
               v.adjoint();
  return out;
}

/// 4 E_C n^2 + E_L phi^2 / 2 - E_J cos(phi - phi_ext) in the oscillator basis.
template <typename Real = double>
Mat<std::complex<Real>> build_fluxonium_hamiltonian(const EnergyParams& params, FluxBias flux,
                                                    std::size_t dim) {
  params.validate();
  const HoBasis basis = HoBasis::for_params(params, dim);
  const auto ops = build_ho_operators<Real>(dim, Real(basis.phi0));
  const Real phase = Real(flux.phase());
  auto cosine = hermitian_function(ops.flux, [phase](Real x) { return std::cos(x - phase); });
  Mat<std::complex<Real>> h = Real(4 * params.e_c) * (ops.charge * ops.charge) +
                              Real(0.5 * params.e_l) * (ops.flux * ops.flux) -
                              Real(params.e_j) * cosine;
  // Symmetrize away rounding in the products.
  return (h + h.adjoint()) * Real(0.5);
}

/// Eigensystem of the bare fluxonium.
struct Spectrum {
  VecR eigenvalues;   ///< ascending, rad/ns
  MatC eigenvectors;  ///< columns in the oscillator basis
  EnergyParams params;
  FluxBias flux;
  std::size_t dim = 0;

  double transition(std::size_t i, std::size_t j) const {
    return eigenvalues(static_cast<Eigen::Index>(i)) - eigenvalues(static_cast<Eigen::Index>(j));
  }
};

/// Rotate each column so its largest-magnitude entry is real and positive.
/// Ties go to the lowest row index.
void fix_eigenvector_phases(MatC& vectors);

Spectrum fluxonium_spectrum(const EnergyParams& params, FluxBias flux, std::size_t dim = 40);

/// Process-wide count of bare and coupled eigensolves, for cache checks.
std::uint64_t eigensolve_count();
void note_eigensolve();

/// <i|n|j> in the eigenbasis. Requires i, j < dim/2.
cplx charge_matrix_element(const Spectrum& spec, std::size_t i, std::size_t j);

/// Charge operator restricted to the lowest `levels` eigenstates.
MatC charge_in_eigenbasis(const Spectrum& spec, std::size_t levels);
/// Oscillator lowering operator restricted to the lowest `levels` eigenstates.
MatC ladder_in_eigenbasis(const Spectrum& spec, std::size_t levels);

double qubit_frequency(const EnergyParams& params, FluxBias flux, std::size_t dim = 40);
double anharmonicity(const EnergyParams& params, FluxBias flux, std::size_t dim = 40);

}  // namespace fluxro
