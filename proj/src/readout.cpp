#include "fluxro/readout.hpp"

#include <cmath>
#include <sstream>

#include "fluxro/errors.hpp"
#include "fluxro/golden_section.hpp"
#include "fluxro/parallel.hpp"

namespace fluxro {

void ReadoutConfig::validate() const {
  if (!(n_bar >= 0.0)) throw InvalidArgument("n_bar must be non-negative");
  if (!(eta > 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in (0, 1]");
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (!(t_max >= dt)) throw InvalidArgument("t_max must be at least dt");
  if (!(chi_clamp > 0.0)) throw InvalidArgument("chi clamp must be positive");
}

std::size_t ReadoutConfig::steps() const { return static_cast<std::size_t>(std::llround(t_max / dt)); }

void FluxRamp::validate() const {
  if (!(t_rise >= 0.0)) throw InvalidArgument("ramp rise time must be non-negative");
  if (!std::isfinite(f_start) || !std::isfinite(f_end)) throw InvalidArgument("ramp flux must be finite");
}

double FluxRamp::flux_at(double t) const {
  if (t >= t_rise) return f_end;
  if (t <= 0.0) return f_start;
  return f_start + (f_end - f_start) * (t / t_rise);
}

ChiProfile::ChiProfile(double f_min, double step, std::vector<double> chi, double clamp)
    : f_min_(f_min), step_(step), chi_(std::move(chi)), clamp_(clamp) {
  if (chi_.size() < 2) throw InvalidArgument("chi profile needs at least two points");
  if (!(step_ > 0.0)) throw InvalidArgument("chi profile grid must be increasing");
  if (!(clamp_ > 0.0)) throw InvalidArgument("chi clamp must be positive");
}

double ChiProfile::operator()(double f) const {
  // Allow rounding-level overshoot at the ends of the grid.
  const double slack = 1e-12;
  if (!(f >= f_min() - slack && f <= f_max() + slack)) {
    std::ostringstream msg;
    msg << "flux " << f << " outside chi profile [" << f_min() << ", " << f_max() << "]";
    throw DomainError(msg.str());
  }
  const double pos = (f - f_min_) / step_;
  auto idx = static_cast<std::ptrdiff_t>(std::floor(pos));
  idx = std::clamp<std::ptrdiff_t>(idx, 0, static_cast<std::ptrdiff_t>(chi_.size()) - 2);
  const double w = pos - static_cast<double>(idx);
  const double v = chi_[static_cast<std::size_t>(idx)] * (1.0 - w) + chi_[static_cast<std::size_t>(idx) + 1] * w;
  return std::clamp(v, -clamp_, clamp_);
}

ChiProfile build_chi_profile(const Device& device, double f_lo, double f_hi, double clamp, unsigned workers,
                             double step, const PointEvaluator& evaluator) {
  if (!(f_hi > f_lo)) throw InvalidArgument("chi profile range must be increasing");
  const auto n = static_cast<std::size_t>(std::ceil((f_hi - f_lo) / step - 1e-9)) + 1;
  std::vector<double> raw(n);
  PointEvaluator eval = evaluator;
  if (!eval) {
    eval = [&](const EnergyParams& p, FluxBias f) {
      return evaluate_point(p, f, device.resonator, device.coupling, device.dims, {});
    };
  }
  parallel_for(n, workers, [&](std::size_t i) {
    const auto v = eval(device.energies, FluxBias{f_lo + step * static_cast<double>(i)});
    raw[i] = v.chi.value_or(std::numeric_limits<double>::quiet_NaN());
  });
  std::vector<double> saturated(n);
  std::vector<CellStatus> status(n);
  saturate_series(raw, clamp, saturated, status);
  return ChiProfile(f_lo, step, std::move(saturated), clamp);
}

double qubit_phase_shift(double chi, double kappa) {
  if (!(kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  return 2.0 * std::atan(2.0 * chi / kappa);
}

double drive_amplitude(double n_bar, double kappa, double chi) {
  if (!(n_bar >= 0.0)) throw InvalidArgument("n_bar must be non-negative");
  return std::sqrt(n_bar * (kappa * kappa / 4.0 + chi * chi));
}

cplx static_output_field(double chi, double kappa, double epsilon, int sigma_z, double tau) {
  using namespace std::complex_literals;
  const double sz = sigma_z;
  const double phi = qubit_phase_shift(chi, kappa);
  const cplx decay = std::exp(-1i * chi * tau * sz - kappa * tau / 2.0 + 1i * (phi / 2.0) * sz);
  return epsilon / std::sqrt(kappa) * std::exp(-1i * phi * sz) * (1.0 - 2.0 * std::cos(phi / 2.0) * decay);
}

LangevinSolution integrate_langevin(const ChiOfTime& chi, double kappa, double epsilon, int sigma_z,
                                    const TimeGrid& grid) {
  using namespace std::complex_literals;
  const double sqrt_kappa = std::sqrt(kappa);
  const cplx alpha_in = -epsilon / sqrt_kappa;
  const double sz = sigma_z;
  auto rhs = [&](double t, cplx a) {
    return -1i * chi(t) * sz * a - 0.5 * kappa * a - sqrt_kappa * alpha_in;
  };

  LangevinSolution sol;
  sol.alpha.resize(static_cast<Eigen::Index>(grid.size()));
  sol.alpha_out.resize(static_cast<Eigen::Index>(grid.size()));
  cplx a = 0.0;
  const double h = grid.dt;
  sol.alpha(0) = a;
  sol.alpha_out(0) = alpha_in;
  for (std::size_t i = 0; i < grid.steps; ++i) {
    const double t = grid.time(i);
    const cplx k1 = rhs(t, a);
    const cplx k2 = rhs(t + h / 2, a + h / 2 * k1);
    const cplx k3 = rhs(t + h / 2, a + h / 2 * k2);
    const cplx k4 = rhs(t + h, a + h * k3);
    a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      std::ostringstream msg;
      msg << "Langevin integration produced a non-finite amplitude at t=" << grid.time(i + 1) << " ns";
      throw NumericalFailure(msg.str());
    }
    const auto j = static_cast<Eigen::Index>(i + 1);
    sol.alpha(j) = a;
    sol.alpha_out(j) = alpha_in + sqrt_kappa * a;
  }
  return sol;
}

ChiOfTime flux_ramp_profile(const FluxRamp& ramp, const ChiProfile& profile, double offset) {
  ramp.validate();
  const double lo = std::min(ramp.f_start, ramp.f_end) + offset;
  const double hi = std::max(ramp.f_start, ramp.f_end) + offset;
  if (!profile.covers(lo, hi)) {
    std::ostringstream msg;
    msg << "flux trajectory [" << lo << ", " << hi << "] leaves the chi profile [" << profile.f_min() << ", "
        << profile.f_max() << "]";
    throw DomainError(msg.str());
  }
  return [ramp, &profile, offset](double t) { return profile(ramp.flux_at(t) + offset); };
}

VecR measurement_signal(const VecC& alpha_out, double kappa, double eta, double theta, double dt) {
  const double prefactor = std::sqrt(kappa * eta);
  const cplx rot = std::polar(1.0, -theta);
  VecR m(alpha_out.size());
  if (m.size() == 0) return m;
  m(0) = 0.0;
  double acc = 0.0;
  double prev = 2.0 * (rot * alpha_out(0)).real();
  for (Eigen::Index i = 1; i < alpha_out.size(); ++i) {
    const double cur = 2.0 * (rot * alpha_out(i)).real();
    acc += 0.5 * dt * (prev + cur);
    m(i) = prefactor * acc;
    prev = cur;
  }
  return m;
}

double optimal_demod_phase(const VecC& alpha_out_0, const VecC& alpha_out_1, double dt) {
  const VecC diff = alpha_out_0 - alpha_out_1;
  // The final signal contrast is Re[exp(-i theta) Z] for a fixed complex Z.
  cplx z = 0.0;
  for (Eigen::Index i = 1; i < diff.size(); ++i) z += 0.5 * dt * (diff(i - 1) + diff(i));
  auto contrast = [&](double theta) { return -std::abs((std::polar(1.0, -theta) * z).real()); };

  constexpr int kScan = 360;
  const double step = std::numbers::pi / kScan;
  int best = 0;
  double best_val = contrast(0.0);
  for (int k = 1; k < kScan; ++k) {
    const double v = contrast(k * step);
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  const double center = best * step;
  const auto refined = golden_section_minimize(contrast, center - step, center + step, 1e-12);
  double theta = std::remainder(refined.x, std::numbers::pi);
  if (theta < 0.0) theta += std::numbers::pi;
  return theta;
}

VecR snr_curve(const VecR& m_s_0, const VecR& m_s_1, double kappa, double dt) {
  VecR snr(m_s_0.size());
  for (Eigen::Index i = 0; i < snr.size(); ++i) {
    const double tau = dt * static_cast<double>(i);
    snr(i) = i == 0 ? 0.0 : std::abs(m_s_0(i) - m_s_1(i)) / std::sqrt(2.0 * kappa * tau);
  }
  return snr;
}

double readout_error(double snr) { return 0.5 * std::erfc(snr / 2.0); }

ReadoutTrajectory simulate_readout(const ChiProfile& profile, const ReadoutConfig& config, const FluxRamp& ramp,
                                   double offset) {
  config.validate();
  const ChiOfTime chi = flux_ramp_profile(ramp, profile, offset);
  ReadoutTrajectory out;
  out.grid = TimeGrid{config.dt, config.steps()};
  out.epsilon = drive_amplitude(config.n_bar, config.kappa, profile(ramp.f_end + offset));
  out.field[0] = integrate_langevin(chi, config.kappa, out.epsilon, +1, out.grid);
  out.field[1] = integrate_langevin(chi, config.kappa, out.epsilon, -1, out.grid);
  out.theta = config.demod.mode == DemodPhase::Mode::Fixed
                  ? config.demod.angle
                  : optimal_demod_phase(out.field[0].alpha_out, out.field[1].alpha_out, config.dt);
  for (int s = 0; s < 2; ++s)
    out.m_s[s] = measurement_signal(out.field[s].alpha_out, config.kappa, config.eta, out.theta, config.dt);
  out.snr = snr_curve(out.m_s[0], out.m_s[1], config.kappa, config.dt);
  out.error = out.snr.unaryExpr([](double s) { return readout_error(s); });
  return out;
}

}  // namespace fluxro
