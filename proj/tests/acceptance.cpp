// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fluxro/io/commands.hpp"
#include "fluxro/noise.hpp"
#include "fluxro/parallel.hpp"
#include "oracles.hpp"

using namespace fluxro;
namespace fs = std::filesystem;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;

  // Records one sub-check; the criterion passes only if all do.
  void expect(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [miss]");
  }
};

std::string num(double x, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << x;
  return s.str();
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

const Device kDevice = Device::reference();
const unsigned kWorkers = default_workers();
constexpr double kTau200 = 200.0;

double chi_at(double f, const Truncation& dims = kDevice.dims) {
  return dispersive_shift(kDevice.energies, FluxBias{f}, kDevice.resonator, kDevice.coupling, dims);
}

Eigen::Index index_at(double tau, double dt) { return static_cast<Eigen::Index>(std::llround(tau / dt)); }

// Shared readout pieces, built once.
struct ReadoutFixture {
  ChiProfile profile;
  ReadoutConfig config;
  FluxRamp ramp;
  static const ReadoutFixture& get() {
    static const ReadoutFixture f = [] {
      const FluxRamp ramp;
      const auto [lo, hi] = noise_profile_range(ramp, 1e-2);
      return ReadoutFixture{build_chi_profile(kDevice, lo, hi, from_mhz(50.0), kWorkers), ReadoutConfig{}, ramp};
    }();
    return f;
  }
};

// Optimized pulses at the gate times of the acceptance subset.
struct GateFixture {
  GateSystem system;
  std::vector<PulseOptimum> optima;
  static const GateFixture& get() {
    static const GateFixture f = [] {
      GateFixture g{build_gate_system(kDevice, FluxBias{0.5}, GateConfig{}), {}};
      for (double tau : {10.0, 30.0}) g.optima.push_back(optimize_pulse(g.system, tau, GateConfig{}.dt, kWorkers));
      return g;
    }();
    return f;
  }
};

void c1(Check& c) {
  const auto s = fluxonium_spectrum(kDevice.energies, FluxBias{0.5});
  const double wq = to_ghz(s.transition(1, 0));
  const double chi = to_mhz(chi_at(0.5));
  c.expect(within_rel(wq, 1.05, 0.02), "omega_q/2pi = " + num(wq, 6) + " GHz (1.05 +- 2%)");
  c.expect(within_rel(chi, 0.527, 0.10), "chi/2pi = " + num(chi) + " MHz (0.527 +- 10%)");
}

void c2(Check& c) {
  const FluxBias f{0.641};
  const auto s = fluxonium_spectrum(kDevice.energies, f);
  const double wq = to_ghz(s.transition(1, 0));
  const double chi = to_mhz(chi_at(0.641));
  const auto p = dressed_point(kDevice.energies, f, kDevice.resonator, kDevice.coupling, kDevice.dims);
  const double d10 = to_ghz(transition_detuning(p, 1, 0));
  const double d20 = to_mhz(transition_detuning(p, 2, 0));
  c.expect(within_rel(wq, 4.6, 0.02), "omega_q/2pi = " + num(wq) + " GHz (4.6 +- 2%)");
  c.expect(within_rel(chi, -7.95, 0.10), "chi/2pi = " + num(chi) + " MHz (-7.95 +- 10%)");
  c.expect(within_rel(d10, -2.4, 0.05), "Delta_10/2pi = " + num(d10) + " GHz (-2.4 +- 5%)");
  c.expect(within_rel(d20, -67.0, 0.15), "Delta_20/2pi = " + num(d20) + " MHz (-67 +- 15%)");
}

void c3(Check& c) {
  const auto s = fluxonium_spectrum(kDevice.energies, FluxBias{0.641});
  const double v = to_mhz(kDevice.resonator.g * std::abs(charge_matrix_element(s, 2, 0)));
  c.expect(within_rel(v, 18.32, 0.05), "g|<2|n|0>|/2pi = " + num(v) + " MHz (18.32 +- 5%)");
}

void c4(Check& c) {
  const auto a = find_anticrossing(kDevice.energies, kDevice.resonator, CouplingMode::ChargeCoupling, kDevice.dims,
                                   {3, 1}, 0.55, 0.60);
  c.expect(within_rel(to_mhz(a.g_ij), 5.81, 0.05), "g_31/2pi = " + num(to_mhz(a.g_ij)) + " MHz (5.81 +- 5%)");
  c.expect(within_rel(a.t_swap, 43.0, 0.05), "t_swap = " + num(a.t_swap) + " ns (43 +- 5%)");
  c.expect(std::abs(a.f_star - 0.575) < 0.01, "f* = " + num(a.f_star, 5) + " (near 0.575)");
}

void c5(Check& c) {
  const auto& fx = ReadoutFixture::get();
  const auto i = index_at(kTau200, fx.config.dt);
  const auto pulsed = simulate_readout(fx.profile, fx.config, fx.ramp);
  const auto stat = simulate_readout(fx.profile, fx.config, FluxRamp::constant(0.5));
  const double ratio = pulsed.snr[i] / stat.snr[i];
  c.expect(within_rel(ratio, 10.0, 0.30), "SNR_pulsed/SNR_static(200 ns) = " + num(ratio) + " (10 +- 30%)");
  c.expect(stat.snr[i] >= 0.5 && stat.snr[i] <= 5.0, "static SNR(200 ns) = " + num(stat.snr[i]) + " (in [0.5, 5])");
  ReadoutConfig quarter = fx.config;
  quarter.eta = 0.25;
  const auto q = simulate_readout(fx.profile, quarter, fx.ramp);
  double worst = 0.0;
  for (Eigen::Index k = 1; k < q.snr.size(); ++k) worst = std::max(worst, std::abs(q.snr[k] / pulsed.snr[k] - 0.5));
  c.expect(worst < 1e-12, "max |SNR(0.25)/SNR(1) - 1/2| = " + num(worst, 2));
}

void c6(Check& c) {
  const auto& fx = ReadoutFixture::get();
  const auto i = index_at(kTau200, fx.config.dt);
  const double baseline = simulate_readout(fx.profile, fx.config, FluxRamp::constant(0.5)).snr[i];
  ReadoutConfig quarter = fx.config;
  quarter.eta = 0.25;
  const double clean = simulate_readout(fx.profile, quarter, fx.ramp).snr[i];

  const auto big = noisy_readout_snr(fx.profile, quarter, fx.ramp, NoiseSpec{1e-2, 50, 0}, kWorkers);
  const double ratio = big.snr.mean[i] / baseline;
  const double err = 100.0 * big.error.mean[i];
  c.expect(within_rel(ratio, 3.0, 0.30), "scale 1e-2: mean SNR/static = " + num(ratio) + " (3 +- 30%)");
  c.expect(std::abs(err - 4.0) <= 2.0, "mean error = " + num(err) + "% (4 +- 2 points)");
  c.expect(big.snr.n_excluded() == 0, "excluded draws " + std::to_string(big.snr.n_excluded()));
  for (double scale : {1e-3, 1e-4}) {
    const auto r = noisy_readout_snr(fx.profile, quarter, fx.ramp, NoiseSpec{scale, 50, 0}, kWorkers);
    const double rel = r.snr.mean[i] / clean - 1.0;
    c.expect(std::abs(rel) < 0.02, "scale " + num(scale, 1) + ": SNR shift " + num(100 * rel, 3) + "% (< 2%)");
  }
}

void c7(Check& c) {
  const auto& g = GateFixture::get();
  std::vector<PulseParams> pulses;
  for (const auto& o : g.optima) pulses.push_back(o.pulse);
  std::vector<McCurve> curves;
  for (double scale : {1e-2, 1e-3, 1e-4})
    curves.push_back(noisy_gate_error(kDevice, GateConfig{}, pulses, NoiseSpec{scale, 50, 0}, kWorkers));
  const double e10 = curves[0].mean[0];
  c.expect(std::abs(e10 - 0.36) <= 0.10, "scale 1e-2, tau_g 10 ns: mean error " + num(e10) + " (0.36 +- 0.10)");
  for (std::size_t j = 0; j < pulses.size(); ++j) {
    const double ratio = curves[1].mean[static_cast<Eigen::Index>(j)] / curves[2].mean[static_cast<Eigen::Index>(j)];
    c.expect(ratio >= 1e3 && ratio <= 1e5,
             "tau_g " + num(pulses[j].tau_g) + " ns: error(1e-3)/error(1e-4) = " + num(ratio, 3) + " (1e4 within 10x)");
  }
  c.detail << "; noise-free errors " << num(1 - g.optima[0].fidelity, 3) << ", " << num(1 - g.optima[1].fidelity, 3);
}

void c8(Check& c) {
  const double kappa = kDevice.resonator.kappa;
  double worst = 0.0, worst_oracle = 0.0;
  for (double chi : {from_mhz(0.527), from_mhz(-7.95)}) {
    const double eps = drive_amplitude(10.0, kappa, chi);
    const TimeGrid grid{0.05, 20000};
    for (int sz : {+1, -1}) {
      const auto sol = integrate_langevin([chi](double) { return chi; }, kappa, eps, sz, grid);
      for (std::size_t k = 0; k <= grid.steps; ++k) {
        const cplx v = sol.alpha_out(static_cast<Eigen::Index>(k));
        worst = std::max(worst, std::abs(v - static_output_field(chi, kappa, eps, sz, grid.time(k))));
        worst_oracle = std::max(worst_oracle, std::abs(v - oracle::langevin_output(chi, kappa, eps, sz, grid.time(k))));
      }
    }
  }
  c.expect(worst < 1e-8, "max |ODE - closed form| over 1 us = " + num(worst, 3));
  c.expect(worst_oracle < 1e-8, "vs independent solution " + num(worst_oracle, 3));
}

void c9(Check& c) {
  const double wq = from_ghz(6.0), wr = from_ghz(7.0), g = from_mhz(50.0);
  VecR energies(2);
  energies << 0.0, wq;
  MatC lowering = MatC::Zero(2, 2);
  lowering(0, 1) = 1.0;
  const MatC h = build_coupled_hamiltonian(energies, lowering, ResonatorParams{wr, from_mhz(5.0), g},
                                           CouplingMode::LadderRwa, 6);
  const double two_chi = 2.0 * dispersive_shift(assign_dressed_levels(diagonalize_coupled(h, 2, 6)));
  // Exact JC: E0 = wr/2; manifold N splits about (wq + 2 N wr)/2 by sqrt(((wq-wr)/2)^2 + g^2 N).
  const double half = 0.5 * (wq - wr);
  auto mean = [&](int n) { return 0.5 * (wq + 2.0 * n * wr); };
  auto split = [&](int n) { return std::sqrt(half * half + g * g * n); };
  const double exact = ((mean(2) - split(2)) - (mean(1) - split(1))) - ((mean(1) + split(1)) - 0.5 * wr);
  const double diff = std::abs(two_chi - exact);
  c.expect(diff < 1e-10, "|2chi - JC exact| = " + num(diff, 3) + " rad/ns");
}

void c10(Check& c) {
  EnergyParams p = kDevice.energies;
  p.e_j = 0.0;
  const auto s = fluxonium_spectrum(p, FluxBias{0.3}, 40);
  const double w = std::sqrt(8.0 * p.e_c * p.e_l);
  double worst = 0.0;
  // The flux displacement is exact only well below the truncation edge.
  for (Eigen::Index k = 1; k < 10; ++k)
    worst = std::max(worst, std::abs((s.eigenvalues(k) - s.eigenvalues(k - 1)) / w - 1.0));
  c.expect(worst < 1e-10, "max relative spacing error, lowest 10 levels (40-state basis) = " + num(worst, 3));
}

void c11(Check& c) {
  double chi_worst = 0.0, spec_worst = 0.0;
  for (double f : {0.1, 0.37, 0.45, 0.5, 0.52}) {
    const double a = chi_at(f), b = chi_at(1.0 - f);
    chi_worst = std::max(chi_worst, std::abs(a - b) / std::abs(a));
    const auto sa = fluxonium_spectrum(kDevice.energies, FluxBias{f});
    const auto sb = fluxonium_spectrum(kDevice.energies, FluxBias{1.0 - f});
    spec_worst = std::max(spec_worst, ((sa.eigenvalues - sb.eigenvalues).cwiseAbs().array() /
                                       sa.eigenvalues.cwiseAbs().array()).maxCoeff());
  }
  c.expect(chi_worst < 1e-8, "max relative chi asymmetry = " + num(chi_worst, 3));
  c.expect(spec_worst < 1e-8, "max relative eigenvalue asymmetry = " + num(spec_worst, 3));
}

void c12(Check& c) {
  const double tol_energy = from_ghz(1e-6);
  for (double f : {0.5, 0.641}) {
    const double chi = chi_at(f);
    const double chi_dim = chi_at(f, Truncation{60, 8, 8});
    const double chi_km = chi_at(f, Truncation{40, 12, 10});
    c.expect(std::abs(chi_dim / chi - 1.0) < 0.01 && std::abs(chi_km / chi - 1.0) < 0.01,
             "f=" + num(f) + ": chi shifts " + num(100 * (chi_dim / chi - 1), 2) + "% (dim 60), " +
                 num(100 * (chi_km / chi - 1), 2) + "% (k,m 12,10)");
    const auto a = fluxonium_spectrum(kDevice.energies, FluxBias{f}, 40);
    const auto b = fluxonium_spectrum(kDevice.energies, FluxBias{f}, 60);
    const double bare = (a.eigenvalues.head(6) - b.eigenvalues.head(6)).cwiseAbs().maxCoeff();
    const auto da = dressed_point(kDevice.energies, FluxBias{f}, kDevice.resonator, kDevice.coupling, kDevice.dims);
    const auto db = dressed_point(kDevice.energies, FluxBias{f}, kDevice.resonator, kDevice.coupling,
                                  Truncation{40, 12, 10});
    const double dressed =
        (da.levels.energies.head(6) - db.levels.energies.head(6)).cwiseAbs().maxCoeff();
    c.expect(bare < tol_energy, "f=" + num(f) + ": lowest-6 shift " + num(to_ghz(bare), 2) + " GHz (dim 60)");
    c.expect(dressed < tol_energy, "f=" + num(f) + ": dressed lowest-6 shift " + num(to_ghz(dressed), 2) + " GHz (k,m)");
  }
}

void c13(Check& c) {
  const auto& g = GateFixture::get();
  double worst = 0.0;
  bool in_range = true;
  std::vector<PulseParams> pulses;
  for (const auto& o : g.optima) pulses.push_back(o.pulse);
  PulseParams idle = pulses.front();
  idle.eps_d = 0.0;
  pulses.push_back(idle);
  for (const auto& p : pulses) {
    const MatC u = propagate_gate(g.system, p, GateConfig{}.dt);
    const auto n = u.rows();
    worst = std::max(worst, (u.adjoint() * u - MatC::Identity(n, n)).cwiseAbs().maxCoeff());
    const auto r = gate_fidelity(u, g.system.computational);
    in_range = in_range && r.fidelity >= 0.0 && r.fidelity <= 1.0 && r.leakage >= 0.0 && r.leakage <= 1.0;
  }
  for (double delta : {-0.02, 0.013}) {
    const auto sys = build_gate_system(kDevice, FluxBias{0.5 + delta}, GateConfig{});
    const MatC u = propagate_gate(sys, pulses.front(), GateConfig{}.dt);
    const auto n = u.rows();
    worst = std::max(worst, (u.adjoint() * u - MatC::Identity(n, n)).cwiseAbs().maxCoeff());
    const auto r = gate_fidelity(u, sys.computational);
    in_range = in_range && r.fidelity >= 0.0 && r.fidelity <= 1.0;
  }
  c.expect(worst < 1e-8, "max unitarity defect = " + num(worst, 3));
  c.expect(in_range, "F and leakage in [0, 1]");
  const double f_id = gate_fidelity(MatC::Identity(4, 4), MatC::Identity(4, 2)).fidelity;
  c.expect(f_id == 1.0 / 3.0, "F(identity vs X) = " + num(f_id, 17));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void c14(Check& c) {
  const auto cfg = io::parse_config_text(R"({
    "readout": {"t_max_ns": 300, "eta": 0.25},
    "chi_curve": {"f_min": 0.45, "f_max": 0.7, "n_points": 126},
    "noise": {"scale": [0.01, 0.001], "n_draws": 12, "seed": 2024},
    "gate": {"tau_g_ns_list": [10], "qubit_only": true, "levels_resonator": 1}
  })");
  const auto root = fs::temp_directory_path() / "fluxro_acceptance_determinism";
  fs::remove_all(root);
  std::size_t compared = 0;
  bool same = true;
  for (const char* sub : {"chi-curve", "noise-readout", "noise-gates"}) {
    std::vector<io::RunReport> reports;
    for (unsigned w : {1u, 3u}) {
      io::RunOptions o;
      o.out_dir = root / (std::string(sub) + "_" + std::to_string(w));
      o.workers = w;
      o.use_cache = false;
      reports.push_back(io::run_subcommand(sub, cfg, o));
    }
    for (const auto& f : reports[0].files) {
      same = same && slurp(root / (std::string(sub) + "_1") / f.path) == slurp(root / (std::string(sub) + "_3") / f.path);
      ++compared;
    }
  }
  c.expect(same, std::to_string(compared) + " files byte-identical at 1 and 3 workers");
}

void c15(Check& c) {
  double worst = 0.0;
  // The series reference stays accurate to 1e-12 up to x = 3.5.
  for (int k = 0; k <= 700; ++k) {
    const double x = 0.005 * k;
    worst = std::max(worst, std::abs(std::erfc(x) - oracle::erfc_series(x)));
  }
  c.expect(worst < 1e-12, "max |erfc - series| on [0, 3.5] = " + num(worst, 3));
  const auto& fx = ReadoutFixture::get();
  const auto tr = simulate_readout(fx.profile, fx.config, fx.ramp);
  double dev = 0.0;
  for (Eigen::Index k = 0; k < tr.snr.size(); ++k) {
    const double x = tr.snr[k] / 2.0;
    const double ref = x <= 3.5 ? oracle::erfc_series(x) : std::erfc(x);
    dev = std::max(dev, std::abs(tr.error[k] - 0.5 * ref));
  }
  c.expect(dev < 1e-12, "max |error - erfc(SNR/2)/2| = " + num(dev, 3));
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"sweet-spot spectrum", c1},
      {"readout-point spectrum", c2},
      {"matrix element at f=0.641", c3},
      {"anticrossing g_31 and swap time", c4},
      {"SNR improvement ratio and eta scaling", c5},
      {"noisy readout", c6},
      {"noisy gates", c7},
      {"closed-form output field", c8},
      {"exact Jaynes-Cummings", c9},
      {"harmonic limit", c10},
      {"flux symmetry", c11},
      {"convergence ladder", c12},
      {"gate unitarity and fidelity bounds", c13},
      {"determinism across workers", c14},
      {"erfc accuracy and error curve", c15},
  };
  int failed = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    Check c;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[n].second(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += c.pass ? 0 : 1;
    std::printf("%s criterion %2zu: %s | %s (%.1f s)\n", c.pass ? "PASS" : "FAIL", n + 1, criteria[n].first.c_str(),
                c.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
