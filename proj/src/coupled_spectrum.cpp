#include "fluxro/coupled_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

#include "fluxro/golden_section.hpp"
#include "fluxro/parallel.hpp"

namespace fluxro {

void ResonatorParams::validate() const {
  if (!(omega_r > 0.0) || !std::isfinite(omega_r)) throw InvalidArgument("omega_r must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw InvalidArgument("kappa must be positive");
  if (!(g >= 0.0) || !std::isfinite(g)) throw InvalidArgument("g must be non-negative");
}

void Truncation::validate() const {
  if (fluxonium_dim < 2) throw InvalidDimension("fluxonium_dim must be >= 2");
  if (kept_levels < 2 || resonator_levels < 2)
    throw InvalidDimension("kept_levels and resonator_levels must be >= 2");
  if (kept_levels > fluxonium_dim) throw InvalidDimension("kept_levels exceeds fluxonium_dim");
}

const char* to_string(CouplingMode mode) {
  switch (mode) {
    case CouplingMode::ChargeCoupling:
      return "charge";
    case CouplingMode::LadderRwa:
      return "ladder_rwa";
  }
  return "?";
}

CouplingMode coupling_from_string(const std::string& name) {
  if (name == "charge") return CouplingMode::ChargeCoupling;
  if (name == "ladder_rwa") return CouplingMode::LadderRwa;
  throw InvalidArgument("unknown coupling mode '" + name + "' (expected charge or ladder_rwa)");
}

Device Device::reference() {
  Device d;
  d.energies = EnergyParams::from_ghz(4.75, 1.25, 1.5);
  d.resonator = {from_ghz(7.0), from_mhz(5.0), from_mhz(50.0)};
  return d;
}

MatC build_coupled_hamiltonian(const VecR& qubit_energies, const MatC& qubit_operator,
                               const ResonatorParams& res, CouplingMode mode,
                               std::size_t resonator_levels) {
  const auto k = qubit_energies.size();
  const auto m = static_cast<Eigen::Index>(resonator_levels);
  if (k < 2 || m < 2)
    throw InvalidDimension("coupled system needs kept_levels >= 2 and resonator_levels >= 2");
  if (qubit_operator.rows() != k || qubit_operator.cols() != k)
    throw InvalidDimension("qubit operator does not match the qubit energies");
  res.validate();

  MatC a = MatC::Zero(m, m);
  for (Eigen::Index n = 1; n < m; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));

  MatC qubit = MatC::Zero(k, k);
  qubit.diagonal() = qubit_energies.cast<cplx>();
  MatC resonator = MatC::Zero(m, m);
  for (Eigen::Index n = 0; n < m; ++n) resonator(n, n) = res.omega_r * (static_cast<double>(n) + 0.5);

  const MatC id_q = MatC::Identity(k, k);
  const MatC id_r = MatC::Identity(m, m);
  MatC h = Eigen::kroneckerProduct(qubit, id_r).eval() + Eigen::kroneckerProduct(id_q, resonator).eval();

  if (res.g != 0.0) {
    if (mode == CouplingMode::ChargeCoupling) {
      const MatC x = a + a.adjoint();
      h += res.g * Eigen::kroneckerProduct(qubit_operator, x).eval();
    } else {
      const MatC& c = qubit_operator;
      h += res.g * (Eigen::kroneckerProduct(c.adjoint().eval(), a).eval() +
                    Eigen::kroneckerProduct(c, a.adjoint().eval()).eval());
    }
  }
  return (h + h.adjoint()) * 0.5;
}

MatC build_coupled_hamiltonian(const Spectrum& bare, const ResonatorParams& res, CouplingMode mode,
                               std::size_t kept_levels, std::size_t resonator_levels) {
  if (kept_levels < 2 || resonator_levels < 2)
    throw InvalidDimension("coupled system needs kept_levels >= 2 and resonator_levels >= 2");
  if (kept_levels > bare.dim) throw InvalidDimension("kept_levels exceeds fluxonium basis");
  const MatC op = mode == CouplingMode::ChargeCoupling ? charge_in_eigenbasis(bare, kept_levels)
                                                       : ladder_in_eigenbasis(bare, kept_levels);
  return build_coupled_hamiltonian(bare.eigenvalues.head(static_cast<Eigen::Index>(kept_levels)), op, res,
                                   mode, resonator_levels);
}

MatC build_coupled_hamiltonian(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                               CouplingMode mode, const Truncation& dims) {
  dims.validate();
  const Spectrum bare = fluxonium_spectrum(params, flux, dims.fluxonium_dim);
  return build_coupled_hamiltonian(bare, res, mode, dims.kept_levels, dims.resonator_levels);
}

CoupledEigensystem diagonalize_coupled(const MatC& hamiltonian, std::size_t kept_levels,
                                       std::size_t resonator_levels) {
  note_eigensolve();
  Eigen::SelfAdjointEigenSolver<MatC> es(hamiltonian);
  if (es.info() != Eigen::Success) throw NumericalFailure("coupled eigensolve did not converge");
  CoupledEigensystem sys;
  sys.energies = es.eigenvalues();
  sys.vectors = es.eigenvectors();
  fix_eigenvector_phases(sys.vectors);
  sys.kept_levels = kept_levels;
  sys.resonator_levels = resonator_levels;
  return sys;
}

DressedLevels assign_dressed_levels(const CoupledEigensystem& system) {
  const auto size = system.vectors.rows();
  const MatR overlap = system.vectors.cwiseAbs2();

  struct Pair {
    double weight;
    Eigen::Index bare;
    Eigen::Index dressed;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(size * size));
  for (Eigen::Index b = 0; b < size; ++b)
    for (Eigen::Index d = 0; d < size; ++d) pairs.push_back({overlap(b, d), b, d});
  // Stable order: weight descending, then bare index, then dressed index.
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    if (x.weight != y.weight) return x.weight > y.weight;
    if (x.bare != y.bare) return x.bare < y.bare;
    return x.dressed < y.dressed;
  });

  DressedLevels out;
  out.kept_levels = system.kept_levels;
  out.resonator_levels = system.resonator_levels;
  out.assignment.assign(static_cast<std::size_t>(size), -1);
  out.quality.assign(static_cast<std::size_t>(size), 0.0);
  out.energies = system.energies;
  std::vector<bool> used(static_cast<std::size_t>(size), false);
  Eigen::Index remaining = size;
  for (const Pair& p : pairs) {
    if (remaining == 0) break;
    const auto b = static_cast<std::size_t>(p.bare);
    const auto d = static_cast<std::size_t>(p.dressed);
    if (out.assignment[b] >= 0 || used[d]) continue;
    out.assignment[b] = p.dressed;
    out.quality[b] = p.weight;
    used[d] = true;
    --remaining;
  }

  for (std::size_t i = 0; i < (system.kept_levels + 1) / 2; ++i)
    for (std::size_t n = 0; n < (system.resonator_levels + 1) / 2; ++n)
      if (out.quality_of(i, n) < kWarnQuality) out.warn = true;
  return out;
}

DressedPoint dressed_point(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                           CouplingMode mode, const Truncation& dims) {
  dims.validate();
  DressedPoint p;
  p.bare = fluxonium_spectrum(params, flux, dims.fluxonium_dim);
  const MatC h = build_coupled_hamiltonian(p.bare, res, mode, dims.kept_levels, dims.resonator_levels);
  p.levels = assign_dressed_levels(diagonalize_coupled(h, dims.kept_levels, dims.resonator_levels));
  p.omega_r = res.omega_r;
  return p;
}

namespace {

void require_quality(const DressedLevels& levels, std::size_t i, std::size_t n) {
  const double q = levels.quality_of(i, n);
  if (q < kResonantQuality) {
    std::ostringstream msg;
    msg << "dressed label |" << i << "," << n << "> has overlap " << q << " (resonance region)";
    throw ResonanceRegion(msg.str(), q);
  }
}

}  // namespace

double dispersive_shift(const DressedLevels& lv) {
  for (auto [i, n] : {std::pair{0, 0}, {0, 1}, {1, 0}, {1, 1}})
    require_quality(lv, static_cast<std::size_t>(i), static_cast<std::size_t>(n));
  const double two_chi = (lv.energy(1, 1) - lv.energy(1, 0)) - (lv.energy(0, 1) - lv.energy(0, 0));
  return 0.5 * two_chi;
}

double dispersive_shift(const DressedPoint& point) { return dispersive_shift(point.levels); }

double dispersive_shift(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                        CouplingMode mode, const Truncation& dims) {
  return dispersive_shift(dressed_point(params, flux, res, mode, dims));
}

double transition_detuning(const DressedPoint& point, std::size_t i, std::size_t j) {
  if (i <= j) throw InvalidArgument("transition detuning needs i > j");
  if (i >= point.levels.kept_levels) throw DomainError("transition level outside kept levels");
  require_quality(point.levels, i, 0);
  require_quality(point.levels, j, 0);
  return (point.levels.energy(i, 0) - point.levels.energy(j, 0)) - point.omega_r;
}

double transition_detuning(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                           CouplingMode mode, const Truncation& dims, std::size_t i, std::size_t j) {
  return transition_detuning(dressed_point(params, flux, res, mode, dims), i, j);
}

// ---------------------------------------------------------------------------

const char* to_string(CellStatus status) {
  switch (status) {
    case CellStatus::Ok:
      return "ok";
    case CellStatus::Clamped:
      return "clamped";
    case CellStatus::Resonant:
      return "resonant";
  }
  return "?";
}

std::string LandscapeKind::name() const {
  switch (kind) {
    case ValueKind::Chi:
      return "chi";
    case ValueKind::OmegaQ:
      return "omega_q";
    case ValueKind::Delta:
      return "delta_" + std::to_string(transition.first) + std::to_string(transition.second);
  }
  return "?";
}

PointValues evaluate_point(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                           CouplingMode mode, const Truncation& dims,
                           const std::vector<Transition>& transitions) {
  const DressedPoint p = dressed_point(params, flux, res, mode, dims);
  PointValues v;
  v.omega_q = p.bare.transition(1, 0);
  try {
    v.chi = dispersive_shift(p);
  } catch (const ResonanceRegion&) {
    v.chi.reset();
  }
  v.deltas.reserve(transitions.size());
  for (auto [i, j] : transitions) {
    try {
      v.deltas.emplace_back(transition_detuning(p, i, j));
    } catch (const ResonanceRegion&) {
      v.deltas.emplace_back(std::nullopt);
    }
  }
  v.min_quality = *std::min_element(p.levels.quality.begin(), p.levels.quality.end());
  return v;
}

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

}  // namespace

std::vector<double> LandscapeAxes::e_j_axis() const { return linspace(e_j_min, e_j_max, n_e_j); }
std::vector<double> LandscapeAxes::f_axis() const { return linspace(f_min, f_max, n_f); }

void saturate_series(std::span<const double> raw, double clamp, std::span<double> emitted,
                     std::span<CellStatus> status) {
  const std::size_t n = raw.size();
  // Sign used for a resonant entry: last valid entry before it, else the next one after it.
  double last_sign = 0.0;
  std::vector<double> sign_for(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(raw[i])) {
      sign_for[i] = last_sign;
    } else {
      last_sign = raw[i] >= 0.0 ? 1.0 : -1.0;
    }
  }
  double next_sign = 1.0;
  for (std::size_t i = n; i-- > 0;) {
    if (!std::isnan(raw[i])) {
      next_sign = raw[i] >= 0.0 ? 1.0 : -1.0;
    } else if (sign_for[i] == 0.0) {
      sign_for[i] = next_sign;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (std::isnan(raw[i])) {
      status[i] = CellStatus::Resonant;
      emitted[i] = clamp > 0.0 ? sign_for[i] * clamp : std::numeric_limits<double>::quiet_NaN();
    } else if (clamp > 0.0 && std::abs(raw[i]) > clamp) {
      status[i] = CellStatus::Clamped;
      emitted[i] = std::copysign(clamp, raw[i]);
    } else {
      status[i] = CellStatus::Ok;
      emitted[i] = raw[i];
    }
  }
}

std::vector<LandscapeGrid> compute_landscapes(const LandscapeAxes& axes, const Device& device,
                                              const std::vector<LandscapeKind>& kinds,
                                              unsigned workers, const PointEvaluator& evaluator) {
  if (axes.n_e_j == 0 || axes.n_f == 0) throw InvalidArgument("landscape axes must be nonempty");
  if ((axes.n_e_j > 1 && !(axes.e_j_max > axes.e_j_min)) || (axes.n_f > 1 && !(axes.f_max > axes.f_min)))
    throw InvalidArgument("landscape axes must be increasing");

  std::vector<Transition> transitions;
  for (const auto& k : kinds)
    if (k.kind == ValueKind::Delta) transitions.push_back(k.transition);

  const auto e_j = axes.e_j_axis();
  const auto f = axes.f_axis();
  const std::size_t rows = e_j.size();
  const std::size_t cols = f.size();
  std::vector<PointValues> cells(rows * cols);

  PointEvaluator eval = evaluator;
  if (!eval) {
    eval = [&](const EnergyParams& p, FluxBias flux) {
      return evaluate_point(p, flux, device.resonator, device.coupling, device.dims, transitions);
    };
  }
  parallel_for(cells.size(), workers, [&](std::size_t idx) {
    EnergyParams p = device.energies;
    p.e_j = e_j[idx / cols];
    cells[idx] = eval(p, FluxBias{f[idx % cols]});
  });

  std::vector<LandscapeGrid> grids;
  std::size_t delta_slot = 0;
  for (const auto& kind : kinds) {
    LandscapeGrid g;
    g.e_j = e_j;
    g.f = f;
    g.kind = kind;
    g.raw.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    g.clamp = kind.kind == ValueKind::Chi     ? kChiClampLandscape
              : kind.kind == ValueKind::Delta ? kDeltaClampLandscape
                                              : 0.0;
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
      const auto& c = cells[idx];
      std::optional<double> value;
      switch (kind.kind) {
        case ValueKind::Chi:
          value = c.chi;
          break;
        case ValueKind::OmegaQ:
          value = c.omega_q;
          break;
        case ValueKind::Delta:
          value = c.deltas.at(delta_slot);
          break;
      }
      g.raw(static_cast<Eigen::Index>(idx / cols), static_cast<Eigen::Index>(idx % cols)) =
          value.value_or(std::numeric_limits<double>::quiet_NaN());
    }
    if (kind.kind == ValueKind::Delta) ++delta_slot;

    g.emitted.resize(g.raw.rows(), g.raw.cols());
    g.status.resize(g.raw.rows(), g.raw.cols());
    for (Eigen::Index r = 0; r < g.raw.rows(); ++r) {
      std::vector<double> raw_row(cols), out_row(cols);
      std::vector<CellStatus> st(cols);
      for (std::size_t c = 0; c < cols; ++c) raw_row[c] = g.raw(r, static_cast<Eigen::Index>(c));
      saturate_series(raw_row, g.clamp, out_row, st);
      for (std::size_t c = 0; c < cols; ++c) {
        g.emitted(r, static_cast<Eigen::Index>(c)) = out_row[c];
        g.status(r, static_cast<Eigen::Index>(c)) = st[c];
      }
    }
    grids.push_back(std::move(g));
  }
  return grids;
}

LandscapeGrid chi_landscape(const LandscapeAxes& axes, const Device& device, unsigned workers) {
  return compute_landscapes(axes, device, {LandscapeKind{ValueKind::Chi, {0, 0}}}, workers).front();
}

// ---------------------------------------------------------------------------

double hybrid_gap(const EnergyParams& params, FluxBias flux, const ResonatorParams& res,
                  CouplingMode mode, const Truncation& dims, Transition transition) {
  dims.validate();
  const auto [i, j] = transition;
  if (i >= dims.kept_levels || j >= dims.kept_levels) throw DomainError("transition outside kept levels");
  const Spectrum bare = fluxonium_spectrum(params, flux, dims.fluxonium_dim);
  const MatC h = build_coupled_hamiltonian(bare, res, mode, dims.kept_levels, dims.resonator_levels);
  const auto sys = diagonalize_coupled(h, dims.kept_levels, dims.resonator_levels);
  const Eigen::Index upper = sys.product_index(i, 0);
  const Eigen::Index lower = sys.product_index(j, 1);
  const VecR weight = sys.vectors.row(upper).cwiseAbs2().transpose() + sys.vectors.row(lower).cwiseAbs2().transpose();
  Eigen::Index first = 0;
  weight.maxCoeff(&first);
  Eigen::Index second = first == 0 ? 1 : 0;
  for (Eigen::Index d = 0; d < weight.size(); ++d)
    if (d != first && weight(d) > weight(second)) second = d;
  return std::abs(sys.energies(first) - sys.energies(second));
}

Anticrossing find_anticrossing(const EnergyParams& params, const ResonatorParams& res,
                               CouplingMode mode, const Truncation& dims, Transition transition,
                               double f_lo, double f_hi, double tol) {
  if (!(f_hi > f_lo)) throw InvalidArgument("anticrossing window must satisfy f_lo < f_hi");
  auto gap = [&](double f) { return hybrid_gap(params, FluxBias{f}, res, mode, dims, transition); };
  const LineMinimum m = golden_section_minimize(gap, f_lo, f_hi, tol);
  const double edge = 10.0 * tol;
  if (m.x - f_lo < edge || f_hi - m.x < edge) {
    std::ostringstream msg;
    msg << "no interior gap minimum for transition (" << transition.first << "," << transition.second
        << ") in f window [" << f_lo << ", " << f_hi << "]";
    throw BracketingError(msg.str());
  }
  Anticrossing a;
  a.f_star = m.x;
  a.gap = m.value;
  a.g_ij = 0.5 * m.value;
  a.t_swap = a.g_ij > 0.0 ? std::numbers::pi / (2.0 * a.g_ij) : std::numeric_limits<double>::infinity();
  return a;
}

}  // namespace fluxro
