#include "fluxro/io/serialize.hpp"

#include "fluxro/errors.hpp"

namespace fluxro::io {

namespace {

json device_json(const Device& d) {
  return {{"e_j", d.energies.e_j},
          {"e_c", d.energies.e_c},
          {"e_l", d.energies.e_l},
          {"omega_r", d.resonator.omega_r},
          {"g", d.resonator.g},
          {"coupling", to_string(d.coupling)},
          {"dims", {d.dims.fluxonium_dim, d.dims.kept_levels, d.dims.resonator_levels}}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

json point_key(const Device& device, const EnergyParams& params, FluxBias flux,
               const std::vector<Transition>& transitions) {
  Device d = device;
  d.energies = params;
  json t = json::array();
  for (auto [i, j] : transitions) t.push_back({i, j});
  return {{"kind", "point"}, {"device", device_json(d)}, {"flux", flux.f}, {"transitions", t}};
}

json to_json(const PointValues& v) {
  json deltas = json::array();
  for (const auto& d : v.deltas) deltas.push_back(optional_json(d));
  return {{"omega_q", v.omega_q}, {"chi", optional_json(v.chi)}, {"deltas", deltas}, {"min_quality", v.min_quality}};
}

PointValues point_from_json(const json& j) {
  PointValues v;
  v.omega_q = j.at("omega_q").get<double>();
  v.chi = optional_from(j.at("chi"));
  for (const auto& d : j.at("deltas")) v.deltas.push_back(optional_from(d));
  v.min_quality = j.at("min_quality").get<double>();
  return v;
}

json to_json(const Spectrum& s) {
  json ghz = json::array(), exact = json::array(), vecs = json::array();
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    ghz.push_back(to_ghz(s.eigenvalues(i)));
    exact.push_back(s.eigenvalues(i));
  }
  for (Eigen::Index r = 0; r < s.eigenvectors.rows(); ++r)
    for (Eigen::Index c = 0; c < s.eigenvectors.cols(); ++c)
      vecs.push_back({s.eigenvectors(r, c).real(), s.eigenvectors(r, c).imag()});
  return {{"e_j_ghz", to_ghz(s.params.e_j)},
          {"e_c_ghz", to_ghz(s.params.e_c)},
          {"e_l_ghz", to_ghz(s.params.e_l)},
          {"params", {s.params.e_j, s.params.e_c, s.params.e_l}},
          {"flux", s.flux.f},
          {"dim", s.dim},
          {"eigenvalues_ghz", ghz},
          {"eigenvalues", exact},
          {"eigenvectors", vecs}};
}

Spectrum spectrum_from_json(const json& j) {
  Spectrum s;
  const auto p = j.at("params").get<std::vector<double>>();
  if (p.size() != 3) throw IoError("spectrum record has malformed params");
  s.params = {p[0], p[1], p[2]};
  s.flux = FluxBias{j.at("flux").get<double>()};
  s.dim = j.at("dim").get<std::size_t>();
  const auto ev = j.at("eigenvalues").get<std::vector<double>>();
  const auto& vecs = j.at("eigenvectors");
  const auto n = static_cast<Eigen::Index>(s.dim);
  if (ev.size() != s.dim || vecs.size() != s.dim * s.dim) throw IoError("spectrum record has inconsistent sizes");
  s.eigenvalues = Eigen::Map<const VecR>(ev.data(), n);
  s.eigenvectors.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) {
      const auto& e = vecs[static_cast<std::size_t>(r * n + c)];
      s.eigenvectors(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  return s;
}

json pulse_key(const Device& device, const GateConfig& config, double flux, double tau_g, const PulseSearch& search) {
  return {{"kind", "pulse"},
          {"device", device_json(device)},
          {"gate",
           {{"levels_fluxonium", config.levels_fluxonium},
            {"levels_resonator", config.levels_resonator},
            {"dt", config.dt},
            {"qubit_only", config.qubit_only}}},
          {"flux", flux},
          {"tau_g", tau_g},
          {"search",
           {search.eps_points, search.eps_span, search.lambda_points, search.lambda_min, search.lambda_max,
            search.simplex_tol, search.max_iterations}}};
}

json to_json(const PulseOptimum& p) {
  return {{"tau_g", p.pulse.tau_g},
          {"eps_d", p.pulse.eps_d},
          {"lambda", p.pulse.lambda},
          {"omega_d", p.pulse.omega_d},
          {"anharmonicity", p.pulse.anharmonicity},
          {"fidelity", p.fidelity},
          {"grid_fidelity", p.grid_fidelity},
          {"rabi_estimate", p.rabi_estimate},
          {"evaluations", p.evaluations}};
}

PulseOptimum pulse_from_json(const json& j) {
  PulseOptimum p;
  p.pulse.tau_g = j.at("tau_g").get<double>();
  p.pulse.eps_d = j.at("eps_d").get<double>();
  p.pulse.lambda = j.at("lambda").get<double>();
  p.pulse.omega_d = j.at("omega_d").get<double>();
  p.pulse.anharmonicity = j.at("anharmonicity").get<double>();
  p.fidelity = j.at("fidelity").get<double>();
  p.grid_fidelity = j.at("grid_fidelity").get<double>();
  p.rabi_estimate = j.at("rabi_estimate").get<double>();
  p.evaluations = j.at("evaluations").get<int>();
  return p;
}

}  // namespace fluxro::io
