#include "fluxro/qubit_core.hpp"

#include <atomic>
#include <sstream>

namespace fluxro {

void EnergyParams::validate() const {
  if (!std::isfinite(e_j) || !std::isfinite(e_c) || !std::isfinite(e_l))
    throw InvalidArgument("fluxonium energies must be finite");
  if (e_c <= 0.0 || e_l <= 0.0) throw InvalidArgument("E_C and E_L must be positive");
  if (e_j < 0.0) throw InvalidArgument("E_J must be non-negative");
}

FluxBias FluxBias::reduced() const {
  double r = f - std::floor(f);
  if (r >= 1.0) r = 0.0;
  return {r};
}

void fix_eigenvector_phases(MatC& vectors) {
  for (Eigen::Index col = 0; col < vectors.cols(); ++col) {
    Eigen::Index best = 0;
    double best_mag = -1.0;
    for (Eigen::Index row = 0; row < vectors.rows(); ++row) {
      const double mag = std::abs(vectors(row, col));
      if (mag > best_mag) {
        best_mag = mag;
        best = row;
      }
    }
    if (best_mag <= 0.0) continue;
    const cplx pivot = vectors(best, col);
    vectors.col(col) *= std::conj(pivot) / best_mag;
    vectors(best, col) = cplx(best_mag, 0.0);
  }
}

namespace {
std::atomic<std::uint64_t> g_eigensolves{0};
}  // namespace

std::uint64_t eigensolve_count() { return g_eigensolves.load(); }
void note_eigensolve() { g_eigensolves.fetch_add(1, std::memory_order_relaxed); }

Spectrum fluxonium_spectrum(const EnergyParams& params, FluxBias flux, std::size_t dim) {
  note_eigensolve();
  const MatC h = build_fluxonium_hamiltonian<double>(params, flux, dim);
  Eigen::SelfAdjointEigenSolver<MatC> es(h);
  if (es.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "fluxonium eigensolve did not converge (E_J=" << to_ghz(params.e_j)
        << " GHz, E_C=" << to_ghz(params.e_c) << " GHz, E_L=" << to_ghz(params.e_l)
        << " GHz, f=" << flux.f << ", dim=" << dim << ")";
    throw NumericalFailure(msg.str());
  }
  Spectrum spec;
  spec.eigenvalues = es.eigenvalues();
  spec.eigenvectors = es.eigenvectors();
  fix_eigenvector_phases(spec.eigenvectors);
  spec.params = params;
  spec.flux = flux;
  spec.dim = dim;
  return spec;
}

namespace {

HoOperators<double> operators_for(const Spectrum& spec) {
  return build_ho_operators<double>(spec.dim, HoBasis::for_params(spec.params, spec.dim).phi0);
}

MatC project(const Spectrum& spec, const MatC& op, std::size_t levels) {
  if (levels < 1 || levels > spec.dim) throw InvalidDimension("requested more levels than the basis holds");
  const auto k = static_cast<Eigen::Index>(levels);
  const auto v = spec.eigenvectors.leftCols(k);
  return v.adjoint() * op * v;
}

}  // namespace

cplx charge_matrix_element(const Spectrum& spec, std::size_t i, std::size_t j) {
  const std::size_t bound = spec.dim / 2;
  if (i >= bound || j >= bound) {
    std::ostringstream msg;
    msg << "level index (" << i << ", " << j << ") outside the converged range [0, " << bound << ")";
    throw DomainError(msg.str());
  }
  const auto ops = operators_for(spec);
  const auto vi = spec.eigenvectors.col(static_cast<Eigen::Index>(i));
  const auto vj = spec.eigenvectors.col(static_cast<Eigen::Index>(j));
  return vi.dot(ops.charge * vj);
}

MatC charge_in_eigenbasis(const Spectrum& spec, std::size_t levels) {
  return project(spec, operators_for(spec).charge, levels);
}

MatC ladder_in_eigenbasis(const Spectrum& spec, std::size_t levels) {
  return project(spec, operators_for(spec).annihilation, levels);
}

double qubit_frequency(const EnergyParams& params, FluxBias flux, std::size_t dim) {
  return fluxonium_spectrum(params, flux, dim).transition(1, 0);
}

double anharmonicity(const EnergyParams& params, FluxBias flux, std::size_t dim) {
  const auto spec = fluxonium_spectrum(params, flux, dim);
  return spec.transition(2, 1) - spec.transition(1, 0);
}

}  // namespace fluxro
