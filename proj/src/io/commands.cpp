#include "fluxro/io/commands.hpp"

#include <fstream>
#include <map>

#include "fluxro/errors.hpp"
#include "fluxro/io/cache.hpp"
#include "fluxro/io/csv.hpp"
#include "fluxro/io/serialize.hpp"
#include "fluxro/noise.hpp"
#include "fluxro/parallel.hpp"

namespace fluxro::io {

namespace fs = std::filesystem;

namespace {

const std::string kReadoutSchema =
    "tau_ns,snr,error,m_s_0,m_s_1,re_alpha_out_0,im_alpha_out_0,re_alpha_out_1,im_alpha_out_1";

std::vector<std::string> split_header(const std::string& h) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = h.find(',', start);
    out.push_back(h.substr(start, comma - start));
    if (comma == std::string::npos) return out;
    start = comma + 1;
  }
}

CsvTable table(const std::string& header) { return CsvTable(split_header(header)); }

class Run {
 public:
  Run(const RunConfig& cfg, const RunOptions& opts)
      : cfg_(cfg),
        opts_(opts),
        device_(cfg.to_device()),
        cache_(opts.use_cache ? (opts.cache_dir.empty() ? opts.out_dir / ".cache" : opts.cache_dir) : fs::path{}) {
    std::error_code ec;
    fs::create_directories(opts.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + opts.out_dir.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::string& schema, const std::string& text) {
    const auto path = opts_.out_dir / name;
    const auto tmp = opts_.out_dir / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary);
      out << text;
      if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot publish '" + path.string() + "': " + ec.message());
    files_.push_back({name, schema, sha256_hex(text), text.size()});
  }

  void write_csv(const std::string& name, const CsvTable& t) { write(name, t.header_line(), t.text()); }

  PointEvaluator evaluator(std::vector<Transition> transitions) {
    return [this, transitions](const EnergyParams& p, FluxBias f) {
      const auto v = cache_.get_or_compute(point_key(device_, p, f, transitions), [&] {
        return to_json(evaluate_point(p, f, device_.resonator, device_.coupling, device_.dims, transitions));
      });
      return point_from_json(v);
    };
  }

  PulseOptimum pulse(double tau_g) {
    const GateConfig& gc = cfg_.gate.config;
    const PulseSearch search;
    const auto v = cache_.get_or_compute(pulse_key(device_, gc, cfg_.gate.flux, tau_g, search), [&] {
      const auto sys = build_gate_system(device_, FluxBias{cfg_.gate.flux}, gc);
      return to_json(optimize_pulse(sys, tau_g, gc.dt, opts_.workers, search));
    });
    return pulse_from_json(v);
  }

  ChiProfile profile(double lo, double hi) {
    const double margin = 1e-3;
    return build_chi_profile(device_, lo - margin, hi + margin, from_mhz(cfg_.readout.chi_clamp_mhz), opts_.workers,
                             kChiProfileStep, evaluator({}));
  }

  void landscape();
  void chi_curve();
  void readout();
  void noise_readout();
  void gates();
  void noise_gates();
  void spectrum();
  void anticrossing();

  RunReport finish(const std::string& name, std::uint64_t eigensolves_before) {
    nlohmann::ordered_json manifest;
    manifest["tool"] = "simulate";
    manifest["version"] = kToolVersion;
    manifest["subcommand"] = name;
    manifest["config_hash"] = sha256_hex(emit_config(cfg_, false));
    manifest["seed"] = cfg_.seed;
    nlohmann::ordered_json files = nlohmann::ordered_json::array();
    for (const auto& f : files_)
      files.push_back({{"path", f.path}, {"schema", f.schema}, {"sha256", f.sha256}, {"bytes", f.bytes}});
    manifest["files"] = files;
    nlohmann::ordered_json defaults = nlohmann::ordered_json::object();
    for (const auto& d : cfg_.defaults) defaults[d.key] = nlohmann::ordered_json::parse(d.value);
    manifest["defaults_used"] = defaults;
    manifest["config"] = nlohmann::ordered_json::parse(emit_config(cfg_, false));
    write("manifest.json", "manifest", manifest.dump(2) + "\n");

    RunReport r;
    r.files = files_;
    r.cache_hits = cache_.hits();
    r.cache_computations = cache_.computations();
    r.eigensolves = eigensolve_count() - eigensolves_before;
    return r;
  }

 private:
  const RunConfig& cfg_;
  const RunOptions& opts_;
  Device device_;
  Cache cache_;
  std::vector<EmittedFile> files_;
};

const char* unit_of(const LandscapeKind& k) { return k.kind == ValueKind::Chi ? "MHz" : "GHz"; }

double in_unit(const LandscapeKind& k, double v) { return k.kind == ValueKind::Chi ? to_mhz(v) : to_ghz(v); }

void Run::landscape() {
  std::vector<Transition> transitions;
  for (const auto& k : cfg_.landscape.quantities)
    if (k.kind == ValueKind::Delta) transitions.push_back(k.transition);
  const auto grids =
      compute_landscapes(cfg_.landscape_axes(), device_, cfg_.landscape.quantities, opts_.workers, evaluator(transitions));
  for (const auto& g : grids) {
    auto t = table("e_j_ghz,f,value,unit,status");
    for (std::size_t i = 0; i < g.e_j.size(); ++i)
      for (std::size_t j = 0; j < g.f.size(); ++j) {
        const auto r = static_cast<Eigen::Index>(i), c = static_cast<Eigen::Index>(j);
        t.cell(to_ghz(g.e_j[i])).cell(g.f[j]).cell(in_unit(g.kind, g.emitted(r, c))).cell(unit_of(g.kind));
        t.cell(to_string(g.status(r, c)));
        t.end_row();
      }
    write_csv("landscape_" + g.kind.name() + ".csv", t);
  }
}

void Run::chi_curve() {
  const auto& c = cfg_.chi_curve;
  std::vector<double> f(c.n_points), raw(c.n_points);
  for (std::size_t i = 0; i < c.n_points; ++i)
    f[i] = c.f_min + (c.f_max - c.f_min) * static_cast<double>(i) / static_cast<double>(c.n_points - 1);
  const auto eval = evaluator({});
  parallel_for(c.n_points, opts_.workers, [&](std::size_t i) {
    raw[i] = eval(device_.energies, FluxBias{f[i]}).chi.value_or(std::numeric_limits<double>::quiet_NaN());
  });
  std::vector<double> emitted(c.n_points);
  std::vector<CellStatus> status(c.n_points);
  saturate_series(raw, from_mhz(c.clamp_mhz), emitted, status);
  auto t = table("f,chi_mhz,status");
  for (std::size_t i = 0; i < c.n_points; ++i) {
    t.cell(f[i]).cell(to_mhz(emitted[i])).cell(to_string(status[i]));
    t.end_row();
  }
  write_csv("chi_curve.csv", t);
}

CsvTable readout_table(const ReadoutTrajectory& tr) {
  auto t = table(kReadoutSchema);
  const auto n = tr.snr.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    t.cell(tr.grid.dt * static_cast<double>(i)).cell(tr.snr[i]).cell(tr.error[i]);
    t.cell(tr.m_s[0][i]).cell(tr.m_s[1][i]);
    for (int s = 0; s < 2; ++s) t.cell(tr.field[s].alpha_out[i].real()).cell(tr.field[s].alpha_out[i].imag());
    t.end_row();
  }
  return t;
}

void Run::readout() {
  const auto& ramp = cfg_.readout.ramp;
  const auto prof = profile(std::min(ramp.f_start, ramp.f_end), std::max(ramp.f_start, ramp.f_end));
  const auto rc = cfg_.readout_config();
  const auto pulsed = simulate_readout(prof, rc, ramp);
  const auto stat = simulate_readout(prof, rc, FluxRamp::constant(ramp.f_start));
  write_csv("readout_static.csv", readout_table(stat));
  write_csv("readout_pulsed.csv", readout_table(pulsed));
}

void append_noise_rows(CsvTable& t, const McCurve& c) {
  for (Eigen::Index i = 0; i < c.axis.size(); ++i) {
    t.cell(c.axis[i]).cell(c.mean[i]).cell(c.stderr_mean[i]).cell(c.n_effective()).cell(c.n_excluded());
    t.cell(c.scale).cell(static_cast<unsigned long long>(c.seed));
    t.end_row();
  }
}

const char* kNoiseSchema = "axis_value,mean,stderr,n_effective,n_excluded,scale,seed";

void Run::noise_readout() {
  const auto& ramp = cfg_.readout.ramp;
  const double worst = *std::max_element(cfg_.noise.scales.begin(), cfg_.noise.scales.end());
  const auto [lo, hi] = noise_profile_range(ramp, worst);
  const auto prof = profile(lo, hi);
  const auto rc = cfg_.readout_config();
  auto snr = table(kNoiseSchema), err = table(kNoiseSchema);
  for (double scale : cfg_.noise.scales) {
    const auto r = noisy_readout_snr(prof, rc, ramp, cfg_.noise_spec(scale), opts_.workers);
    append_noise_rows(snr, r.snr);
    append_noise_rows(err, r.error);
  }
  write_csv("noise_readout_snr.csv", snr);
  write_csv("noise_readout_error.csv", err);
}

void Run::gates() {
  const auto& gc = cfg_.gate.config;
  const auto sys = build_gate_system(device_, FluxBias{cfg_.gate.flux}, gc);
  auto t = table("tau_g_ns,eps_d,lambda,fidelity,error,leakage");
  for (double tau : cfg_.gate.tau_g_ns) {
    const auto opt = pulse(tau);
    const auto full = evaluate_gate(sys, opt.pulse, gc.dt);
    t.cell(tau).cell(opt.pulse.eps_d).cell(opt.pulse.lambda).cell(full.fidelity).cell(1.0 - full.fidelity);
    t.cell(full.leakage);
    t.end_row();
  }
  write_csv("gates.csv", t);
}

void Run::noise_gates() {
  std::vector<PulseParams> pulses;
  for (double tau : cfg_.gate.tau_g_ns) pulses.push_back(pulse(tau).pulse);
  auto t = table(kNoiseSchema);
  for (double scale : cfg_.noise.scales)
    append_noise_rows(t, noisy_gate_error(device_, cfg_.gate.config, pulses, cfg_.noise_spec(scale), opts_.workers,
                                          cfg_.gate.flux));
  write_csv("noise_gates.csv", t);
}

void Run::spectrum() {
  const FluxBias flux{cfg_.spectrum.flux};
  const json key{{"kind", "spectrum"},
                 {"params", {device_.energies.e_j, device_.energies.e_c, device_.energies.e_l}},
                 {"flux", flux.f},
                 {"dim", device_.dims.fluxonium_dim}};
  const auto v = cache_.get_or_compute(
      key, [&] { return to_json(fluxonium_spectrum(device_.energies, flux, device_.dims.fluxonium_dim)); });
  const Spectrum s = spectrum_from_json(v);
  write("spectrum.json", "spectrum", v.dump(1) + "\n");
  auto t = table("level,energy_ghz,transition_from_ground_ghz");
  for (std::size_t i = 0; i < cfg_.spectrum.levels; ++i) {
    t.cell(i).cell(to_ghz(s.eigenvalues(static_cast<Eigen::Index>(i)))).cell(to_ghz(s.transition(i, 0)));
    t.end_row();
  }
  write_csv("spectrum.csv", t);
}

void Run::anticrossing() {
  const auto& a = cfg_.anticrossing;
  const auto r = find_anticrossing(device_.energies, device_.resonator, a.coupling, device_.dims, a.transition, a.f_lo,
                                   a.f_hi, a.tol);
  auto t = table("i,j,coupling,f_star,gap_mhz,g_mhz,t_swap_ns");
  t.cell(a.transition.first).cell(a.transition.second).cell(to_string(a.coupling)).cell(r.f_star);
  t.cell(to_mhz(r.gap)).cell(to_mhz(r.g_ij)).cell(r.t_swap);
  t.end_row();
  write_csv("anticrossing.csv", t);
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"landscape", "chi-curve", "readout",  "noise-readout",
                                              "gates",     "noise-gates", "spectrum", "anticrossing"};
  return names;
}

RunReport run_subcommand(const std::string& name, const RunConfig& config, const RunOptions& opts) {
  using Member = void (Run::*)();
  static const std::map<std::string, Member> table{
      {"landscape", &Run::landscape}, {"chi-curve", &Run::chi_curve},     {"readout", &Run::readout},
      {"noise-readout", &Run::noise_readout}, {"gates", &Run::gates},    {"noise-gates", &Run::noise_gates},
      {"spectrum", &Run::spectrum},   {"anticrossing", &Run::anticrossing}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("invalid-value", "unknown subcommand '" + name + "'");
  const auto before = eigensolve_count();
  Run run(config, opts);
  (run.*(it->second))();
  return run.finish(name, before);
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return 2;
  if (dynamic_cast<const NumericalFailure*>(&e)) return 3;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 4;
  return 1;
}

std::string error_record(const std::string& subcommand, const std::exception& e) {
  nlohmann::ordered_json r;
  r["status"] = "error";
  r["subcommand"] = subcommand;
  r["exit_code"] = exit_code_for(e);
  if (const auto* err = dynamic_cast<const Error*>(&e))
    r["category"] = err->category();
  else
    r["category"] = "internal";
  r["message"] = e.what();
  if (const auto* c = dynamic_cast<const ConfigError*>(&e)) {
    if (!c->key().empty()) r["key"] = c->key();
    if (c->line() > 0) r["line"] = c->line();
  }
  if (const auto* rr = dynamic_cast<const ResonanceRegion*>(&e)) r["assignment_quality"] = rr->quality();
  return r.dump(2) + "\n";
}

}  // namespace fluxro::io
