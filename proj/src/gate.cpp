#include "fluxro/gate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <gsl/gsl_multimin.h>
#include <unsupported/Eigen/KroneckerProduct>

#include "fluxro/errors.hpp"
#include "fluxro/parallel.hpp"

namespace fluxro {

void PulseParams::validate() const {
  if (!(tau_g > 0.0)) throw InvalidArgument("gate time must be positive");
  if (!(eps_d >= 0.0)) throw InvalidArgument("drive amplitude must be non-negative");
}

void GateConfig::validate() const {
  if (levels_fluxonium < 2) throw InvalidDimension("gate simulation needs at least two fluxonium levels");
  if (!qubit_only && levels_resonator < 2) throw InvalidDimension("gate simulation needs resonator_levels >= 2");
  if (!(dt > 0.0)) throw InvalidArgument("gate dt must be positive");
}

double envelope(double t, double tau_g) {
  if (!(t >= 0.0 && t <= tau_g)) throw DomainError("envelope evaluated outside [0, tau_g]");
  return 0.5 * (1.0 - std::cos(two_pi * t / tau_g));
}

double drag_envelope(double t, double tau_g, double lambda, double anharm) {
  if (anharm == 0.0) throw InvalidArgument("DRAG envelope needs a nonzero anharmonicity");
  if (!(t >= 0.0 && t <= tau_g)) throw DomainError("envelope evaluated outside [0, tau_g]");
  return (lambda / anharm) * (std::numbers::pi / tau_g) * std::sin(two_pi * t / tau_g);
}

double drive_coefficient(const PulseParams& p, double t) {
  const double s = envelope(t, p.tau_g);
  const double ds = p.lambda == 0.0 ? 0.0 : drag_envelope(t, p.tau_g, p.lambda, p.anharmonicity);
  return p.eps_d * (2.0 * s * std::sin(p.omega_d * t) + ds * std::cos(p.omega_d * t));
}

MatC build_drive_hamiltonian(const PulseParams& pulse, const MatC& charge, double t) {
  return drive_coefficient(pulse, t) * charge;
}

GateSystem build_gate_system(const Device& device, FluxBias flux, const GateConfig& config) {
  config.validate();
  const Spectrum bare = fluxonium_spectrum(device.energies, flux, device.dims.fluxonium_dim);
  const std::size_t k = config.levels_fluxonium;
  const MatC n = charge_in_eigenbasis(bare, k);

  GateSystem sys;
  sys.bare_anharmonicity = bare.transition(2, 1) - bare.transition(1, 0);
  if (config.qubit_only) {
    sys.hamiltonian = MatC::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    sys.hamiltonian.diagonal() = bare.eigenvalues.head(static_cast<Eigen::Index>(k)).cast<cplx>();
    sys.drive = n;
    sys.computational = MatC::Identity(static_cast<Eigen::Index>(k), 2);
    sys.energies = bare.eigenvalues.head(static_cast<Eigen::Index>(k));
    sys.qubit_frequency = bare.transition(1, 0);
    return sys;
  }

  const std::size_t m = config.levels_resonator;
  sys.hamiltonian = build_coupled_hamiltonian(bare, device.resonator, device.coupling, k, m);
  sys.drive = Eigen::kroneckerProduct(n, MatC::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)))
                  .eval();
  const auto eig = diagonalize_coupled(sys.hamiltonian, k, m);
  const auto levels = assign_dressed_levels(eig);
  sys.computational.resize(sys.hamiltonian.rows(), 2);
  sys.computational.col(0) = eig.vectors.col(levels.index(0, 0));
  sys.computational.col(1) = eig.vectors.col(levels.index(1, 0));
  sys.energies = eig.energies;
  sys.qubit_frequency = levels.energy(1, 0) - levels.energy(0, 0);
  return sys;
}

MatC propagate_gate(const GateSystem& system, const PulseParams& pulse, double dt) {
  pulse.validate();
  if (!(dt > 0.0)) throw InvalidArgument("gate dt must be positive");
  const auto steps = std::max<long long>(1, std::llround(pulse.tau_g / dt));
  const double h = pulse.tau_g / static_cast<double>(steps);
  const Eigen::Index dim = system.hamiltonian.rows();

  // H(t) = H0 + c(t) D, so [H(t2), H(t1)] = (c(t1) - c(t2)) [H0, D].
  const MatC& h0 = system.hamiltonian;
  const MatC& d = system.drive;
  const MatC comm = h0 * d - d * h0;
  const double node = std::sqrt(3.0) / 6.0;
  const cplx comm_weight(0.0, -std::sqrt(3.0) / 12.0 * h * h);

  MatC u = MatC::Identity(dim, dim);
  MatC k(dim, dim);
  Eigen::SelfAdjointEigenSolver<MatC> es(dim);
  for (long long i = 0; i < steps; ++i) {
    const double t = h * static_cast<double>(i);
    const double c1 = drive_coefficient(pulse, t + (0.5 - node) * h);
    const double c2 = drive_coefficient(pulse, t + (0.5 + node) * h);
    k.noalias() = h * h0;
    k.noalias() += (0.5 * h * (c1 + c2)) * d;
    k.noalias() += (comm_weight * (c1 - c2)) * comm;
    es.compute(k);
    if (es.info() != Eigen::Success) throw NumericalFailure("step exponential failed to diagonalize");
    const VecC phases = (-cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
    u = (es.eigenvectors() * phases.asDiagonal() * (es.eigenvectors().adjoint() * u)).eval();
  }

  const double defect = (u.adjoint() * u - MatC::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (!(defect < 1e-8)) {
    std::ostringstream msg;
    msg << "gate propagator unitarity defect " << defect << " exceeds 1e-8 (dt=" << h << " ns, steps=" << steps
        << ", tau_g=" << pulse.tau_g << " ns)";
    throw NumericalFailure(msg.str());
  }
  return u;
}

MatC propagate_subspace(const GateSystem& system, const PulseParams& pulse, double dt) {
  pulse.validate();
  if (!(dt > 0.0)) throw InvalidArgument("gate dt must be positive");
  const auto steps = std::max<long long>(1, std::llround(pulse.tau_g / dt));
  const double h = pulse.tau_g / static_cast<double>(steps);
  const Eigen::Index dim = system.hamiltonian.rows();

  // Energy shift keeps the Taylor argument small; its phase is restored at the end.
  const double shift = 0.5 * (system.energies.maxCoeff() + system.energies.minCoeff());
  const MatC h0 = system.hamiltonian - shift * MatC::Identity(dim, dim);
  const MatC& d = system.drive;
  const double node = std::sqrt(3.0) / 6.0;
  const cplx minus_i(0.0, -1.0);
  const MatC a0 = (minus_i * h) * h0;
  const MatC ad = minus_i * d;
  const MatC ac = (-std::sqrt(3.0) / 12.0 * h * h) * (h0 * d - d * h0);

  MatC v = system.computational;
  MatC w(dim, dim), term(dim, v.cols()), next(dim, v.cols());
  for (long long i = 0; i < steps; ++i) {
    const double t = h * static_cast<double>(i);
    const double c1 = drive_coefficient(pulse, t + (0.5 - node) * h);
    const double c2 = drive_coefficient(pulse, t + (0.5 + node) * h);
    w = a0 + (0.5 * h * (c1 + c2)) * ad + (c1 - c2) * ac;
    term = v;
    for (int j = 1; j <= 40; ++j) {
      next.noalias() = w * term;
      term = next / static_cast<double>(j);
      v += term;
      if (term.cwiseAbs2().maxCoeff() < 1e-36) break;
    }
  }
  v *= std::polar(1.0, -shift * h * static_cast<double>(steps));

  const Eigen::Index c = v.cols();
  const double defect = (v.adjoint() * v - MatC::Identity(c, c)).cwiseAbs().maxCoeff();
  if (!(defect < 1e-8)) {
    std::ostringstream msg;
    msg << "gate propagator unitarity defect " << defect << " exceeds 1e-8 (dt=" << h << " ns, steps=" << steps
        << ", tau_g=" << pulse.tau_g << " ns)";
    throw NumericalFailure(msg.str());
  }
  return v;
}

namespace {

GateResult fidelity_from_block(const MatC& s, bool remove_z) {
  GateResult r;
  const double norm = s.cwiseAbs2().sum();  // Tr(S^dag S)
  const double phi = remove_z ? std::arg(s(0, 1)) - std::arg(s(1, 0)) : 0.0;
  // M = X^dag diag(1, e^{i phi}) S, so Tr M = e^{i phi} S10 + S01.
  const cplx trace = std::polar(1.0, phi) * s(1, 0) + s(0, 1);
  r.fidelity = std::clamp((norm + std::norm(trace)) / 6.0, 0.0, 1.0);
  r.leakage = std::clamp(1.0 - norm / 2.0, 0.0, 1.0);
  r.virtual_z = phi;
  return r;
}

}  // namespace

GateResult gate_fidelity(const MatC& propagator, const MatC& computational, bool remove_z) {
  GateResult r = fidelity_from_block(computational.adjoint() * propagator * computational, remove_z);
  r.propagator = propagator;
  return r;
}

GateResult evaluate_gate(const GateSystem& system, const PulseParams& pulse, double dt) {
  GateResult r = gate_fidelity(propagate_gate(system, pulse, dt), system.computational);
  r.params = pulse;
  return r;
}

GateResult evaluate_gate_subspace(const GateSystem& system, const PulseParams& pulse, double dt) {
  MatC block = propagate_subspace(system, pulse, dt);
  GateResult r = fidelity_from_block(system.computational.adjoint() * block, true);
  r.propagator = std::move(block);
  r.params = pulse;
  return r;
}

namespace {

struct SimplexContext {
  const GateSystem* system;
  PulseParams base;
  double dt;
  int evaluations = 0;
};

double infidelity_log(const gsl_vector* x, void* raw) {
  auto* ctx = static_cast<SimplexContext*>(raw);
  PulseParams p = ctx->base;
  p.eps_d = gsl_vector_get(x, 0);
  p.lambda = gsl_vector_get(x, 1);
  if (!(p.eps_d >= 0.0)) return 1e3;
  ++ctx->evaluations;
  const double err = 1.0 - evaluate_gate_subspace(*ctx->system, p, ctx->dt).fidelity;
  return std::log10(std::max(err, 1e-16));
}

}  // namespace

PulseOptimum optimize_pulse(const GateSystem& system, double tau_g, double dt, unsigned workers,
                            const PulseSearch& search) {
  if (!(tau_g > 0.0)) throw InvalidArgument("gate time must be positive");
  if (search.eps_points < 2 || search.lambda_points < 2) throw InvalidArgument("pulse grid needs >= 2 points per axis");

  // Two-level pulse area: eps_d |<1|n|0>| int 2 s dt = pi, with int 2 s dt = tau_g.
  const double n10 = std::abs(system.computational.col(1).dot(system.drive * system.computational.col(0)));
  const double estimate = std::numbers::pi / (n10 * tau_g);

  PulseParams base;
  base.tau_g = tau_g;
  base.omega_d = system.qubit_frequency;
  base.anharmonicity = system.bare_anharmonicity;

  const std::size_t ne = search.eps_points, nl = search.lambda_points;
  std::vector<double> fid(ne * nl);
  std::vector<PulseParams> grid(ne * nl, base);
  for (std::size_t a = 0; a < ne; ++a)
    for (std::size_t b = 0; b < nl; ++b) {
      auto& p = grid[a * nl + b];
      const double u = static_cast<double>(a) / static_cast<double>(ne - 1);
      p.eps_d = estimate * std::pow(search.eps_span, 2.0 * u - 1.0);
      p.lambda = search.lambda_min + (search.lambda_max - search.lambda_min) * static_cast<double>(b) /
                                         static_cast<double>(nl - 1);
    }
  parallel_for(grid.size(), workers, [&](std::size_t i) { fid[i] = evaluate_gate_subspace(system, grid[i], dt).fidelity; });
  // First maximum in index order.
  std::size_t best = 0;
  for (std::size_t i = 1; i < fid.size(); ++i)
    if (fid[i] > fid[best]) best = i;

  PulseOptimum out;
  out.rabi_estimate = estimate;
  out.grid_fidelity = fid[best];
  out.pulse = grid[best];
  out.fidelity = fid[best];
  out.evaluations = static_cast<int>(grid.size());

  SimplexContext ctx{&system, base, dt};
  gsl_multimin_function fn{&infidelity_log, 2, &ctx};
  gsl_vector* x = gsl_vector_alloc(2);
  gsl_vector* step = gsl_vector_alloc(2);
  gsl_vector_set(x, 0, grid[best].eps_d);
  gsl_vector_set(x, 1, grid[best].lambda);
  gsl_vector_set(step, 0, 0.02 * estimate);
  gsl_vector_set(step, 1, 0.25);
  gsl_multimin_fminimizer* minimizer = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2);
  gsl_multimin_fminimizer_set(minimizer, &fn, x, step);
  for (int it = 0; it < search.max_iterations; ++it) {
    if (gsl_multimin_fminimizer_iterate(minimizer) != GSL_SUCCESS) break;
    if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(minimizer), search.simplex_tol) == GSL_SUCCESS) break;
  }
  PulseParams refined = base;
  refined.eps_d = gsl_vector_get(minimizer->x, 0);
  refined.lambda = gsl_vector_get(minimizer->x, 1);
  gsl_multimin_fminimizer_free(minimizer);
  gsl_vector_free(step);
  gsl_vector_free(x);
  out.evaluations += ctx.evaluations;

  const double refined_fid = evaluate_gate_subspace(system, refined, dt).fidelity;
  if (refined_fid >= out.fidelity) {
    out.pulse = refined;
    out.fidelity = refined_fid;
  }
  if (out.fidelity < out.grid_fidelity) throw NumericalFailure("pulse refinement ended below the best grid point");
  return out;
}

}  // namespace fluxro
