#include <cmath>

#include "doctest.h"
#include "fluxro/readout.hpp"
#include "oracles.hpp"

using namespace fluxro;

namespace {

const double kKappa = from_mhz(5.0);
const double kChiSweet = from_mhz(0.527);

ChiProfile flat_profile(double chi) { return ChiProfile(0.0, 0.5, std::vector<double>(3, chi), from_mhz(50.0)); }

// Linear chi(f) = slope * (f - 0.5), handy for ramp checks.
ChiProfile linear_profile(double slope) {
  std::vector<double> v;
  for (int i = 0; i <= 100; ++i) v.push_back(slope * (0.4 + 0.003 * i - 0.5));
  return ChiProfile(0.4, 0.003, v, 1e9);
}

}  // namespace

TEST_CASE("qubit phase shift") {
  CHECK(qubit_phase_shift(0.0, kKappa) == 0.0);
  CHECK(qubit_phase_shift(kKappa / 2, kKappa) == doctest::Approx(std::numbers::pi / 2));
  CHECK(qubit_phase_shift(kChiSweet, kKappa) == doctest::Approx(0.4156).epsilon(1e-4 / 0.4156));
  CHECK(qubit_phase_shift(-kChiSweet, kKappa) == -qubit_phase_shift(kChiSweet, kKappa));
  CHECK_THROWS_AS(qubit_phase_shift(1.0, 0.0), InvalidArgument);
}

TEST_CASE("drive amplitude") {
  CHECK(drive_amplitude(0.0, kKappa, kChiSweet) == 0.0);
  CHECK(drive_amplitude(4.0, kKappa, 0.0) == doctest::Approx(kKappa * 2.0 / 2.0));
  CHECK(drive_amplitude(10.0, kKappa, kChiSweet) == doctest::Approx(0.05077).epsilon(1e-4 / 0.05077));
}

TEST_CASE("static output field limits") {
  const double eps = drive_amplitude(10.0, kKappa, kChiSweet);
  for (int sz : {+1, -1}) {
    const cplx at0 = static_output_field(kChiSweet, kKappa, eps, sz, 0.0);
    CHECK(std::abs(at0 - cplx(-eps / std::sqrt(kKappa), 0.0)) < 1e-14);
    const cplx late = static_output_field(kChiSweet, kKappa, eps, sz, 1e4);
    CHECK(std::abs(late) == doctest::Approx(eps / std::sqrt(kKappa)).epsilon(1e-12));
    CHECK(std::arg(late) == doctest::Approx(-qubit_phase_shift(kChiSweet, kKappa) * sz).epsilon(1e-10));
  }
  for (double tau : {0.0, 3.0, 40.0, 250.0}) {
    const cplx p = static_output_field(kChiSweet, kKappa, eps, +1, tau);
    const cplx m = static_output_field(kChiSweet, kKappa, eps, -1, tau);
    CHECK(std::abs(m - std::conj(p)) < 1e-14);
    // Closed form agrees with the direct solution of the linear equation.
    CHECK(std::abs(p - oracle::langevin_output(kChiSweet, kKappa, eps, +1, tau)) < 1e-13);
  }
}

TEST_CASE("RK4 reproduces the closed-form output field") {
  for (double chi : {kChiSweet, from_mhz(-7.95)}) {
    const double eps = drive_amplitude(10.0, kKappa, chi);
    const TimeGrid grid{0.05, 20000};
    for (int sz : {+1, -1}) {
      const auto sol = integrate_langevin([chi](double) { return chi; }, kKappa, eps, sz, grid);
      double worst = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(sol.alpha_out(static_cast<Eigen::Index>(i)) -
                                         static_output_field(chi, kKappa, eps, sz, grid.time(i))));
      CHECK(worst < 1e-8);
    }
  }
}

TEST_CASE("steady photon number and no overshoot") {
  const double eps = drive_amplitude(10.0, kKappa, kChiSweet);
  const auto sol = integrate_langevin([](double) { return kChiSweet; }, kKappa, eps, +1, {0.05, 40000});
  CHECK(std::norm(sol.alpha(sol.alpha.size() - 1)) == doctest::Approx(10.0).epsilon(1e-6));
  // With chi != 0 the complex decay rate rings slightly past the steady state;
  // the bound is the exact maximum of |1 - exp(-(kappa/2 + i chi) t)|^2.
  double ring = 0.0;
  for (std::size_t i = 0; i <= 40000; ++i) {
    const double t = 0.05 * i;
    ring = std::max(ring, std::norm(1.0 - std::exp(-cplx(kKappa / 2, kChiSweet) * t)));
  }
  CHECK(sol.alpha.cwiseAbs2().maxCoeff() <= 10.0 * ring * (1.0 + 1e-9));
  CHECK(ring < 1.0 + 1e-4);
  // Without a dispersive shift the approach is monotone.
  const auto flat = integrate_langevin([](double) { return 0.0; }, kKappa, drive_amplitude(10.0, kKappa, 0.0), +1,
                                       {0.05, 40000});
  CHECK(flat.alpha.cwiseAbs2().maxCoeff() <= 10.0 * (1.0 + 1e-6));
}

TEST_CASE("step halving") {
  const double chi = from_mhz(-7.95);
  const double eps = drive_amplitude(10.0, kKappa, chi);
  auto ramp = [](double t) { return from_mhz(0.527) + (from_mhz(-7.95) - from_mhz(0.527)) * std::min(t / 50.0, 1.0); };
  const auto a = integrate_langevin(ramp, kKappa, eps, +1, {0.05, 4000});
  const auto b = integrate_langevin(ramp, kKappa, eps, +1, {0.025, 8000});
  CHECK(std::abs(a.alpha_out(4000) - b.alpha_out(8000)) < 1e-9);
}

TEST_CASE("non-finite integration fails") {
  CHECK_THROWS_AS(integrate_langevin([](double) { return NAN; }, kKappa, 0.1, 1, {0.05, 10}), NumericalFailure);
}

TEST_CASE("flux ramp") {
  const FluxRamp ramp{0.5, 0.641, 50.0};
  CHECK(ramp.flux_at(0.0) == 0.5);
  CHECK(ramp.flux_at(25.0) == (0.5 + 0.641) / 2);
  CHECK(ramp.flux_at(50.0) == 0.641);
  CHECK(ramp.flux_at(400.0) == 0.641);
  const auto prof = linear_profile(from_mhz(100.0));
  const auto chi = flux_ramp_profile(ramp, prof);
  CHECK(chi(0.0) == doctest::Approx(prof(0.5)));
  CHECK(chi(80.0) == doctest::Approx(prof(0.641)));
  const auto shifted = flux_ramp_profile(ramp, prof, 0.01);
  CHECK(shifted(0.0) == doctest::Approx(prof(0.51)));
  CHECK_THROWS_AS(flux_ramp_profile(ramp, prof, 0.2), DomainError);
  CHECK_THROWS_AS(prof(0.9), DomainError);
  CHECK_THROWS_AS((FluxRamp{0.5, 0.6, -1.0}.validate()), InvalidArgument);
}

TEST_CASE("chi profile clamps and interpolates") {
  ChiProfile p(0.0, 0.1, {0.0, 1.0, 10.0}, 2.0);
  CHECK(p(0.05) == doctest::Approx(0.5));
  CHECK(p(0.2) == 2.0);
  CHECK(p.f_max() == doctest::Approx(0.2));
}

TEST_CASE("measurement signal") {
  const double eps = drive_amplitude(10.0, kKappa, kChiSweet);
  const TimeGrid grid{0.05, 2000};
  const auto s0 = integrate_langevin([](double) { return kChiSweet; }, kKappa, eps, +1, grid);
  const auto s1 = integrate_langevin([](double) { return kChiSweet; }, kKappa, eps, -1, grid);
  const VecR m_full = measurement_signal(s0.alpha_out, kKappa, 1.0, 0.3, grid.dt);
  const VecR m_quarter = measurement_signal(s0.alpha_out, kKappa, 0.25, 0.3, grid.dt);
  CHECK(m_full(0) == 0.0);
  CHECK((m_quarter - 0.5 * m_full).cwiseAbs().maxCoeff() == 0.0);
  const VecR same = measurement_signal(s0.alpha_out, kKappa, 1.0, 0.3, grid.dt);
  CHECK((m_full - same).cwiseAbs().maxCoeff() == 0.0);

  // Conjugate trajectories: the real quadratures coincide, so theta = 0 carries no contrast.
  const VecR r0 = measurement_signal(s0.alpha_out, kKappa, 1.0, 0.0, grid.dt);
  const VecR r1 = measurement_signal(s1.alpha_out, kKappa, 1.0, 0.0, grid.dt);
  CHECK((r0 - r1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((s1.alpha - s0.alpha.conjugate()).cwiseAbs().maxCoeff() < 1e-15);
  const double theta = optimal_demod_phase(s0.alpha_out, s1.alpha_out, grid.dt);
  CHECK(theta == doctest::Approx(std::numbers::pi / 2).epsilon(1e-8));
}

TEST_CASE("erfc against the reference series") {
  double worst = 0.0;
  for (int i = 0; i <= 700; ++i) {
    const double x = 0.005 * i;
    worst = std::max(worst, std::abs(std::erfc(x) - oracle::erfc_series(x)));
    CHECK(readout_error(2.0 * x) == 0.5 * std::erfc(x));
  }
  CHECK(worst < 1e-12);
  CHECK(readout_error(0.0) == 0.5);
  CHECK(readout_error(4.37) == doctest::Approx(1.0e-3).epsilon(0.05));
  CHECK(readout_error(40.0) < 1e-100);
  for (double s = 0.0; s < 10.0; s += 0.25) CHECK(readout_error(s + 0.25) < readout_error(s));
}

TEST_CASE("simulate_readout with a flat profile") {
  ReadoutConfig cfg;
  cfg.t_max = 300.0;
  const auto prof = flat_profile(kChiSweet);
  const auto tr = simulate_readout(prof, cfg, FluxRamp::constant(0.5));
  CHECK(tr.snr(0) == 0.0);
  CHECK(tr.error(0) == 0.5);
  CHECK(tr.epsilon == drive_amplitude(10.0, kKappa, kChiSweet));
  for (Eigen::Index i = 0; i < tr.snr.size(); ++i) {
    CHECK(tr.snr(i) >= 0.0);
    CHECK(tr.error(i) == readout_error(tr.snr(i)));
  }
  for (Eigen::Index i = 2; i < tr.snr.size(); ++i)
    if (tr.snr(i) > tr.snr(i - 1)) CHECK(tr.error(i) < tr.error(i - 1));

  ReadoutConfig quarter = cfg;
  quarter.eta = 0.25;
  const auto tq = simulate_readout(prof, quarter, FluxRamp::constant(0.5));
  CHECK((tq.snr - 0.5 * tr.snr).cwiseAbs().maxCoeff() <= 1e-15 * tr.snr.maxCoeff());

  // Identical trajectories give no contrast.
  const auto zero = simulate_readout(flat_profile(0.0), cfg, FluxRamp::constant(0.5));
  CHECK(zero.snr.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("SNR grows as sqrt(tau) for static chi") {
  ReadoutConfig cfg;
  cfg.t_max = 10000.0;
  const auto tr = simulate_readout(flat_profile(kChiSweet), cfg, FluxRamp::constant(0.5));
  // Least-squares slope of log SNR vs log tau over 1..10 us.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (double tau = 1000.0; tau <= 10000.0; tau += 250.0) {
    const auto i = static_cast<Eigen::Index>(std::llround(tau / cfg.dt));
    const double x = std::log(tau), y = std::log(tr.snr(i));
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("config validation") {
  ReadoutConfig cfg;
  cfg.eta = 1.5;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg.eta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.t_max = 0.01;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}

TEST_CASE("reference device: pulsed readout beats the sweet spot") {
  const Device device = Device::reference();
  const auto profile = build_chi_profile(device, 0.49, 0.66, from_mhz(50.0), 1);
  CHECK(to_mhz(profile(0.5)) == doctest::Approx(0.527).epsilon(0.10));
  CHECK(to_mhz(profile(0.641)) == doctest::Approx(-7.95).epsilon(0.10));

  ReadoutConfig cfg;
  cfg.t_max = 200.0;
  const auto stat = simulate_readout(profile, cfg, FluxRamp::constant(0.5));
  const auto pulsed = simulate_readout(profile, cfg, FluxRamp{0.5, 0.641, 50.0});
  const double s_static = stat.snr(stat.snr.size() - 1);
  const double s_pulsed = pulsed.snr(pulsed.snr.size() - 1);
  MESSAGE("SNR(200 ns): static " << s_static << ", pulsed " << s_pulsed);
  CHECK(s_static >= 0.5);
  CHECK(s_static <= 5.0);
  CHECK(s_pulsed / s_static == doctest::Approx(10.0).epsilon(0.3));

  // Doubling the transit clamp barely matters.
  const auto wide = simulate_readout(profile.with_clamp(from_mhz(100.0)), cfg, FluxRamp{0.5, 0.641, 50.0});
  CHECK(std::abs(wide.snr(wide.snr.size() - 1) / s_pulsed - 1.0) < 0.01);
}
