#pragma once

#include <array>
#include <functional>
#include <vector>

#include "fluxro/coupled_spectrum.hpp"
#include "fluxro/types.hpp"

namespace fluxro {

struct DemodPhase {
  enum class Mode { Auto, Fixed };
  Mode mode = Mode::Auto;
  double angle = 0.0;  ///< rad, used when mode == Fixed

  bool operator==(const DemodPhase&) const = default;
};

struct ReadoutConfig {
  double n_bar = 10.0;
  double eta = 1.0;
  double kappa = from_mhz(5.0);
  DemodPhase demod;
  double t_max = 1000.0;  ///< ns
  double dt = 0.05;       ///< ns
  double chi_clamp = from_mhz(50.0);

  void validate() const;
  std::size_t steps() const;
  bool operator==(const ReadoutConfig&) const = default;
};

/// Linear flux ramp from f_start to f_end over t_rise, constant afterwards.
struct FluxRamp {
  double f_start = 0.5;
  double f_end = 0.641;
  double t_rise = 50.0;

  void validate() const;
  double flux_at(double t) const;
  static FluxRamp constant(double f) { return {f, f, 0.0}; }
  bool operator==(const FluxRamp&) const = default;
};

/// chi sampled on a uniform flux grid, linearly interpolated, then clamped.
class ChiProfile {
 public:
  ChiProfile(double f_min, double step, std::vector<double> chi, double clamp);

  double operator()(double f) const;
  double f_min() const { return f_min_; }
  double f_max() const { return f_min_ + step_ * static_cast<double>(chi_.size() - 1); }
  double step() const { return step_; }
  double clamp() const { return clamp_; }
  const std::vector<double>& values() const { return chi_; }
  bool covers(double lo, double hi) const { return lo >= f_min() && hi <= f_max(); }
  ChiProfile with_clamp(double clamp) const { return {f_min_, step_, chi_, clamp}; }

 private:
  double f_min_;
  double step_;
  std::vector<double> chi_;  ///< resonant grid points already saturated
  double clamp_;
};

inline constexpr double kChiProfileStep = 1e-4;

/// Samples chi over [f_lo, f_hi]. Resonant points saturate at +-clamp with the sign
/// of the previous valid point.
ChiProfile build_chi_profile(const Device& device, double f_lo, double f_hi, double clamp,
                             unsigned workers, double step = kChiProfileStep,
                             const PointEvaluator& evaluator = {});

/// phi_qb = 2 arctan(2 chi / kappa).
double qubit_phase_shift(double chi, double kappa);

/// Drive amplitude giving n_bar intracavity photons in steady state.
double drive_amplitude(double n_bar, double kappa, double chi);

/// Output field for static chi with the cavity empty at tau = 0.
cplx static_output_field(double chi, double kappa, double epsilon, int sigma_z, double tau);

struct TimeGrid {
  double dt = 0.05;
  std::size_t steps = 0;

  double time(std::size_t i) const { return dt * static_cast<double>(i); }
  std::size_t size() const { return steps + 1; }
};

struct LangevinSolution {
  VecC alpha;      ///< intracavity amplitude
  VecC alpha_out;  ///< alpha_in + sqrt(kappa) alpha
};

using ChiOfTime = std::function<double(double)>;

/// RK4 on d(alpha)/dt = -i chi(t) sz alpha - kappa alpha / 2 - sqrt(kappa) alpha_in, alpha(0) = 0,
/// with alpha_in = -epsilon / sqrt(kappa).
LangevinSolution integrate_langevin(const ChiOfTime& chi, double kappa, double epsilon, int sigma_z,
                                    const TimeGrid& grid);

/// chi(t) following the ramp, shifted by a constant flux offset.
ChiOfTime flux_ramp_profile(const FluxRamp& ramp, const ChiProfile& profile, double offset = 0.0);

/// M_S(tau) = sqrt(kappa eta) int_0^tau 2 Re[exp(-i theta) alpha_out] dt, trapezoidal.
VecR measurement_signal(const VecC& alpha_out, double kappa, double eta, double theta, double dt);

/// Demodulation angle maximizing |M_S,0 - M_S,1| at the final time.
double optimal_demod_phase(const VecC& alpha_out_0, const VecC& alpha_out_1, double dt);

/// |M_S,0 - M_S,1| / sqrt(2 kappa tau); zero at tau = 0.
VecR snr_curve(const VecR& m_s_0, const VecR& m_s_1, double kappa, double dt);

/// error = erfc(SNR / 2) / 2.
double readout_error(double snr);

struct ReadoutTrajectory {
  TimeGrid grid;
  std::array<LangevinSolution, 2> field;  ///< [0]: sz = +1 (qubit |0>), [1]: sz = -1
  std::array<VecR, 2> m_s;
  VecR snr;
  VecR error;
  double theta = 0.0;
  double epsilon = 0.0;
};

/// Full readout: chi(t) from the ramp (offset applied to the whole trajectory), epsilon
/// from chi at the plateau flux, both qubit states integrated, then signal, SNR, error.
ReadoutTrajectory simulate_readout(const ChiProfile& profile, const ReadoutConfig& config,
                                   const FluxRamp& ramp, double offset = 0.0);

}  // namespace fluxro
