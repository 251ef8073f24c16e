#include "fluxro/io/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "fluxro/errors.hpp"
#include "json.hpp"

namespace fluxro::io {

using json = nlohmann::ordered_json;

namespace {

// Line of every object key, by dotted path. The text has already parsed as JSON.
std::map<std::string, int> key_lines(const std::string& text) {
  struct Frame {
    bool object;
    std::string key;
    std::size_t index = 0;
    bool expect_key = true;
  };
  std::vector<Frame> stack;
  std::map<std::string, int> lines;
  int line = 1;
  auto path = [&] {
    std::string p;
    for (const auto& f : stack) {
      if (!p.empty()) p += '.';
      p += f.object ? f.key : std::to_string(f.index);
    }
    return p;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\') ++i;
        if (i < text.size()) s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        lines.emplace(path(), line);
      }
    } else if (c == '{' || c == '[') {
      stack.push_back(Frame{c == '{', {}});
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',' && !stack.empty()) {
      if (stack.back().object)
        stack.back().expect_key = true;
      else
        ++stack.back().index;
    }
  }
  return lines;
}

using Check = std::function<std::optional<std::string>(const json&)>;

struct Context {
  std::map<std::string, int> lines;
  std::vector<DefaultUsed>* defaults;

  int line_of(std::string path) const {
    for (;;) {
      if (auto it = lines.find(path); it != lines.end()) return it->second;
      const auto dot = path.rfind('.');
      if (dot == std::string::npos) return 0;
      path.resize(dot);
    }
  }
};

std::string where(const std::string& key, int line) {
  return line > 0 ? " ('" + key + "', line " + std::to_string(line) + ")" : " ('" + key + "')";
}

class Section {
 public:
  Section(const json* node, std::string path, Context& ctx) : node_(node), path_(std::move(path)), ctx_(ctx) {
    if (node_ && !node_->is_object())
      fail("invalid-type", "expected an object", path_);
  }

  template <typename T>
  T get(const std::string& key, T fallback, const Check& check = {}) {
    known_.insert(key);
    const std::string full = join(key);
    if (!node_ || !node_->contains(key)) {
      ctx_.defaults->push_back({full, json(fallback).dump()});
      return fallback;
    }
    const json& v = (*node_)[key];
    if (!type_ok<T>(v)) fail("invalid-type", "wrong value type", full);
    if (check)
      if (auto msg = check(v)) fail("invalid-value", *msg, full);
    return v.get<T>();
  }

  Section child(const std::string& key) {
    known_.insert(key);
    const bool present = node_ && node_->contains(key);
    return Section(present ? &(*node_)[key] : nullptr, join(key), ctx_);
  }

  void finish() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items())
      if (!known_.count(key)) fail("unknown-key", "unknown key", join(key));
  }

  [[noreturn]] void fail(const std::string& kind, const std::string& what, const std::string& key) const {
    const int line = ctx_.line_of(key);
    throw ConfigError(kind, what + where(key, line), key, line);
  }

  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  template <typename T>
  static bool type_ok(const json& v) {
    if constexpr (std::is_same_v<T, bool>) {
      return v.is_boolean();
    } else if constexpr (std::is_same_v<T, std::string>) {
      return v.is_string();
    } else if constexpr (std::is_integral_v<T>) {
      return v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0);
    } else if constexpr (std::is_floating_point_v<T>) {
      return v.is_number();
    } else {
      return true;
    }
  }

  const json* node_;
  std::string path_;
  Context& ctx_;
  std::set<std::string> known_;
};

Check positive() {
  return [](const json& v) -> std::optional<std::string> {
    if (v.get<double>() > 0.0) return std::nullopt;
    return "must be positive";
  };
}
Check non_negative() {
  return [](const json& v) -> std::optional<std::string> {
    if (v.get<double>() >= 0.0) return std::nullopt;
    return "must be non-negative";
  };
}
Check at_least(double lo) {
  return [lo](const json& v) -> std::optional<std::string> {
    if (v.get<double>() >= lo) return std::nullopt;
    return "must be at least " + json(lo).dump();
  };
}

std::string kind_name(const LandscapeKind& k) { return k.name(); }

LandscapeKind kind_from_name(const std::string& name) {
  if (name == "chi") return {ValueKind::Chi, {0, 0}};
  if (name == "omega_q") return {ValueKind::OmegaQ, {0, 0}};
  if (name.size() == 8 && name.rfind("delta_", 0) == 0 && std::isdigit(name[6]) && std::isdigit(name[7]))
    return {ValueKind::Delta, {static_cast<std::size_t>(name[6] - '0'), static_cast<std::size_t>(name[7] - '0')}};
  throw InvalidArgument("unknown landscape quantity '" + name + "'");
}

std::vector<std::string> default_quantity_names() {
  std::vector<std::string> out;
  for (const auto& k : LandscapeSection().quantities) out.push_back(kind_name(k));
  return out;
}

}  // namespace

LandscapeSection::LandscapeSection() {
  quantities.push_back({ValueKind::OmegaQ, {0, 0}});
  quantities.push_back({ValueKind::Chi, {0, 0}});
  for (const auto& t : default_transitions()) quantities.push_back({ValueKind::Delta, t});
}

Device RunConfig::to_device() const {
  Device d;
  d.energies = EnergyParams::from_ghz(device.e_j_ghz, device.e_c_ghz, device.e_l_ghz);
  d.resonator = {from_ghz(device.omega_r_ghz), from_mhz(readout.kappa_mhz), from_mhz(device.g_mhz)};
  d.coupling = device.coupling;
  d.dims = device.dims;
  return d;
}

ReadoutConfig RunConfig::readout_config() const {
  ReadoutConfig c;
  c.n_bar = readout.n_bar;
  c.eta = readout.eta;
  c.kappa = from_mhz(readout.kappa_mhz);
  c.demod = readout.demod;
  c.t_max = readout.t_max_ns;
  c.dt = readout.dt_ns;
  c.chi_clamp = from_mhz(readout.chi_clamp_mhz);
  return c;
}

LandscapeAxes RunConfig::landscape_axes() const {
  LandscapeAxes a;
  a.e_j_min = from_ghz(landscape.e_j_min_ghz);
  a.e_j_max = from_ghz(landscape.e_j_max_ghz);
  a.n_e_j = landscape.n_e_j;
  a.f_min = landscape.f_min;
  a.f_max = landscape.f_max;
  a.n_f = landscape.n_f;
  return a;
}

NoiseSpec RunConfig::noise_spec(double scale) const { return NoiseSpec{scale, noise.n_draws, seed}; }

bool RunConfig::operator==(const RunConfig& o) const {
  return device == o.device && readout == o.readout && gate == o.gate && noise == o.noise &&
         landscape == o.landscape && chi_curve == o.chi_curve && spectrum == o.spectrum &&
         anticrossing == o.anticrossing && output == o.output && seed == o.seed;
}

RunConfig parse_config_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError("malformed", "malformed JSON at line " + std::to_string(line) + ": " + e.what(), {}, line);
  }

  RunConfig cfg;
  Context ctx{key_lines(text), &cfg.defaults};
  Section top(&root, "", ctx);

  {
    Section s = top.child("device");
    auto& d = cfg.device;
    d.e_j_ghz = s.get("e_j_ghz", d.e_j_ghz, non_negative());
    d.e_c_ghz = s.get("e_c_ghz", d.e_c_ghz, positive());
    d.e_l_ghz = s.get("e_l_ghz", d.e_l_ghz, positive());
    d.omega_r_ghz = s.get("omega_r_ghz", d.omega_r_ghz, positive());
    d.g_mhz = s.get("g_mhz", d.g_mhz, non_negative());
    const auto coupling = s.get<std::string>("coupling", to_string(d.coupling), [](const json& v) -> std::optional<std::string> {
      try {
        coupling_from_string(v.get<std::string>());
        return std::nullopt;
      } catch (const Error&) {
        return "coupling must be 'charge' or 'ladder_rwa'";
      }
    });
    d.coupling = coupling_from_string(coupling);
    d.dims.fluxonium_dim = s.get("fluxonium_dim", d.dims.fluxonium_dim, at_least(4));
    d.dims.kept_levels = s.get("kept_levels", d.dims.kept_levels, at_least(2));
    d.dims.resonator_levels = s.get("resonator_levels", d.dims.resonator_levels, at_least(2));
    s.finish();
    try {
      d.dims.validate();
    } catch (const InvalidArgument& e) {
      s.fail("invalid-value", e.what(), "device.kept_levels");
    }
  }

  {
    Section s = top.child("readout");
    auto& r = cfg.readout;
    r.n_bar = s.get("n_bar", r.n_bar, non_negative());
    r.eta = s.get("eta", r.eta, [](const json& v) -> std::optional<std::string> {
      const double eta = v.get<double>();
      if (eta > 0.0 && eta <= 1.0) return std::nullopt;
      return "measurement efficiency out of range (0, 1]";
    });
    r.kappa_mhz = s.get("kappa_mhz_over_2pi", r.kappa_mhz, positive());
    r.t_max_ns = s.get("t_max_ns", r.t_max_ns, positive());
    r.dt_ns = s.get("dt_ns", r.dt_ns, positive());
    Section ramp = s.child("ramp");
    r.ramp.f_start = ramp.get("f_start", r.ramp.f_start);
    r.ramp.f_end = ramp.get("f_end", r.ramp.f_end);
    r.ramp.t_rise = ramp.get("t_rise_ns", r.ramp.t_rise, non_negative());
    ramp.finish();
    Section demod = s.child("demod_phase");
    const auto mode = demod.get<std::string>("mode", "auto", [](const json& v) -> std::optional<std::string> {
      const auto m = v.get<std::string>();
      if (m == "auto" || m == "fixed") return std::nullopt;
      return "mode must be 'auto' or 'fixed'";
    });
    r.demod.mode = mode == "auto" ? DemodPhase::Mode::Auto : DemodPhase::Mode::Fixed;
    r.demod.angle = demod.get("angle_rad", r.demod.angle);
    demod.finish();
    r.chi_clamp_mhz = s.get("chi_clamp_mhz", r.chi_clamp_mhz, positive());
    s.finish();
    if (!(r.t_max_ns >= r.dt_ns)) s.fail("invalid-value", "t_max_ns must be at least dt_ns", "readout.t_max_ns");
  }

  {
    Section s = top.child("gate");
    auto& g = cfg.gate;
    g.tau_g_ns = s.get("tau_g_ns_list", g.tau_g_ns, [](const json& v) -> std::optional<std::string> {
      if (!v.is_array() || v.empty()) return "must be a nonempty list of gate times";
      for (const auto& x : v)
        if (!x.is_number() || !(x.get<double>() > 0.0)) return "gate times must be positive numbers";
      return std::nullopt;
    });
    g.config.levels_fluxonium = s.get("levels_fluxonium", g.config.levels_fluxonium, at_least(2));
    g.config.qubit_only = s.get("qubit_only", g.config.qubit_only);
    g.config.levels_resonator =
        s.get("levels_resonator", g.config.levels_resonator, g.config.qubit_only ? at_least(1) : at_least(2));
    g.config.dt = s.get("dt_ns", g.config.dt, positive());
    g.drive_frame = s.get<std::string>("drive_frame", g.drive_frame, [](const json& v) -> std::optional<std::string> {
      if (v.get<std::string>() == "lab") return std::nullopt;
      return "only the 'lab' drive frame is supported";
    });
    g.flux = s.get("flux", g.flux);
    s.finish();
    if (g.config.levels_fluxonium > cfg.device.dims.fluxonium_dim / 2)
      s.fail("invalid-value", "levels_fluxonium exceeds half the fluxonium basis", "gate.levels_fluxonium");
  }

  {
    Section s = top.child("noise");
    auto& n = cfg.noise;
    {
      const Check scale_check = [](const json& v) -> std::optional<std::string> {
        auto ok = [](const json& x) { return x.is_number() && x.get<double>() >= 0.0; };
        if (v.is_array()) {
          if (v.empty()) return "scale list must be nonempty";
          for (const auto& x : v)
            if (!ok(x)) return "scales must be non-negative numbers";
          return std::nullopt;
        }
        if (ok(v)) return std::nullopt;
        return "scale must be a non-negative number or a list of them";
      };
      json fallback = n.scales;
      json raw = s.get<json>("scale", fallback, scale_check);
      n.scales = raw.is_array() ? raw.get<std::vector<double>>() : std::vector<double>{raw.get<double>()};
    }
    n.n_draws = s.get("n_draws", n.n_draws, at_least(1));
    cfg.seed = s.get("seed", cfg.seed);
    s.finish();
  }

  {
    Section s = top.child("landscape");
    auto& l = cfg.landscape;
    l.e_j_min_ghz = s.get("e_j_min_ghz", l.e_j_min_ghz, non_negative());
    l.e_j_max_ghz = s.get("e_j_max_ghz", l.e_j_max_ghz, non_negative());
    l.n_e_j = s.get("n_e_j", l.n_e_j, at_least(1));
    l.f_min = s.get("f_min", l.f_min);
    l.f_max = s.get("f_max", l.f_max);
    l.n_f = s.get("n_f", l.n_f, at_least(1));
    const auto names = s.get("quantities", default_quantity_names(), [&](const json& v) -> std::optional<std::string> {
      if (!v.is_array() || v.empty()) return "must be a nonempty list of quantity names";
      for (const auto& x : v) {
        if (!x.is_string()) return "quantity names must be strings";
        try {
          const auto k = kind_from_name(x.get<std::string>());
          if (k.kind == ValueKind::Delta &&
              (k.transition.first >= cfg.device.dims.kept_levels || k.transition.second >= cfg.device.dims.kept_levels))
            return "transition outside the kept levels";
        } catch (const Error& e) {
          return std::string(e.what());
        }
      }
      return std::nullopt;
    });
    l.quantities.clear();
    for (const auto& n : names) l.quantities.push_back(kind_from_name(n));
    s.finish();
    if (l.n_e_j > 1 && !(l.e_j_max_ghz > l.e_j_min_ghz))
      s.fail("invalid-value", "e_j_max_ghz must exceed e_j_min_ghz", "landscape.e_j_max_ghz");
    if (l.n_f > 1 && !(l.f_max > l.f_min)) s.fail("invalid-value", "f_max must exceed f_min", "landscape.f_max");
  }

  {
    Section s = top.child("chi_curve");
    auto& c = cfg.chi_curve;
    c.f_min = s.get("f_min", c.f_min);
    c.f_max = s.get("f_max", c.f_max);
    c.n_points = s.get("n_points", c.n_points, at_least(2));
    c.clamp_mhz = s.get("clamp_mhz", c.clamp_mhz, positive());
    s.finish();
    if (!(c.f_max > c.f_min)) s.fail("invalid-value", "f_max must exceed f_min", "chi_curve.f_max");
  }

  {
    Section s = top.child("spectrum");
    cfg.spectrum.flux = s.get("flux", cfg.spectrum.flux);
    cfg.spectrum.levels = s.get("levels", cfg.spectrum.levels, at_least(1));
    s.finish();
    if (cfg.spectrum.levels > cfg.device.dims.fluxonium_dim)
      s.fail("invalid-value", "levels exceeds the fluxonium basis", "spectrum.levels");
  }

  {
    Section s = top.child("anticrossing");
    auto& a = cfg.anticrossing;
    const auto t = s.get("transition", std::vector<std::size_t>{a.transition.first, a.transition.second},
                         [&](const json& v) -> std::optional<std::string> {
                           if (!v.is_array() || v.size() != 2 || !v[0].is_number_unsigned() || !v[1].is_number_unsigned())
                             return "transition must be a pair of level indices";
                           if (v[0].get<std::size_t>() >= cfg.device.dims.kept_levels ||
                               v[1].get<std::size_t>() >= cfg.device.dims.kept_levels)
                             return "transition outside the kept levels";
                           return std::nullopt;
                         });
    a.transition = {t[0], t[1]};
    a.f_lo = s.get("f_lo", a.f_lo);
    a.f_hi = s.get("f_hi", a.f_hi);
    const auto coupling = s.get<std::string>("coupling", to_string(a.coupling), [](const json& v) -> std::optional<std::string> {
      const auto m = v.get<std::string>();
      if (m == "charge" || m == "ladder_rwa") return std::nullopt;
      return "coupling must be 'charge' or 'ladder_rwa'";
    });
    a.coupling = coupling_from_string(coupling);
    a.tol = s.get("tol", a.tol, positive());
    s.finish();
    if (!(a.f_hi > a.f_lo)) s.fail("invalid-value", "f_hi must exceed f_lo", "anticrossing.f_hi");
  }

  {
    Section s = top.child("output");
    cfg.output.dir = s.get("dir", cfg.output.dir);
    cfg.output.workers = s.get("workers", cfg.output.workers);
    s.finish();
  }

  top.finish();
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("missing-file", "cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string emit_config(const RunConfig& c, bool with_output) {
  json root;
  const auto& d = c.device;
  root["device"] = {{"e_j_ghz", d.e_j_ghz},
                    {"e_c_ghz", d.e_c_ghz},
                    {"e_l_ghz", d.e_l_ghz},
                    {"omega_r_ghz", d.omega_r_ghz},
                    {"g_mhz", d.g_mhz},
                    {"coupling", to_string(d.coupling)},
                    {"fluxonium_dim", d.dims.fluxonium_dim},
                    {"kept_levels", d.dims.kept_levels},
                    {"resonator_levels", d.dims.resonator_levels}};
  const auto& r = c.readout;
  root["readout"] = {{"n_bar", r.n_bar},
                     {"eta", r.eta},
                     {"kappa_mhz_over_2pi", r.kappa_mhz},
                     {"t_max_ns", r.t_max_ns},
                     {"dt_ns", r.dt_ns},
                     {"ramp", {{"f_start", r.ramp.f_start}, {"f_end", r.ramp.f_end}, {"t_rise_ns", r.ramp.t_rise}}},
                     {"demod_phase",
                      {{"mode", r.demod.mode == DemodPhase::Mode::Auto ? "auto" : "fixed"}, {"angle_rad", r.demod.angle}}},
                     {"chi_clamp_mhz", r.chi_clamp_mhz}};
  const auto& g = c.gate;
  root["gate"] = {{"tau_g_ns_list", g.tau_g_ns},
                  {"levels_fluxonium", g.config.levels_fluxonium},
                  {"levels_resonator", g.config.levels_resonator},
                  {"dt_ns", g.config.dt},
                  {"drive_frame", g.drive_frame},
                  {"qubit_only", g.config.qubit_only},
                  {"flux", g.flux}};
  root["noise"] = {{"scale", c.noise.scales}, {"n_draws", c.noise.n_draws}, {"seed", c.seed}};
  const auto& l = c.landscape;
  std::vector<std::string> names;
  for (const auto& k : l.quantities) names.push_back(kind_name(k));
  root["landscape"] = {{"e_j_min_ghz", l.e_j_min_ghz}, {"e_j_max_ghz", l.e_j_max_ghz}, {"n_e_j", l.n_e_j},
                       {"f_min", l.f_min},             {"f_max", l.f_max},             {"n_f", l.n_f},
                       {"quantities", names}};
  root["chi_curve"] = {{"f_min", c.chi_curve.f_min},
                       {"f_max", c.chi_curve.f_max},
                       {"n_points", c.chi_curve.n_points},
                       {"clamp_mhz", c.chi_curve.clamp_mhz}};
  root["spectrum"] = {{"flux", c.spectrum.flux}, {"levels", c.spectrum.levels}};
  const auto& a = c.anticrossing;
  root["anticrossing"] = {{"transition", {a.transition.first, a.transition.second}},
                          {"f_lo", a.f_lo},
                          {"f_hi", a.f_hi},
                          {"coupling", to_string(a.coupling)},
                          {"tol", a.tol}};
  if (with_output) root["output"] = {{"dir", c.output.dir}, {"workers", c.output.workers}};
  return root.dump(2) + "\n";
}

}  // namespace fluxro::io
