#include "chiral/lab/config.hpp"

#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace chiral::lab {

namespace pt = boost::property_tree;

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Spectrum: return "spectrum";
    case Mode::RatesSweep: return "rates-sweep";
    case Mode::Evolve: return "evolve";
    case Mode::Steady: return "steady";
    case Mode::GapScan: return "gap-scan";
    case Mode::ImperfectionScan: return "imperfection-scan";
    case Mode::Trajectories: return "trajectories";
    case Mode::Estimates: return "estimates";
    case Mode::Validate: return "validate";
  }
  return "?";
}

Mode parse_mode(const std::string& s) {
  for (Mode m : {Mode::Spectrum, Mode::RatesSweep, Mode::Evolve, Mode::Steady, Mode::GapScan, Mode::ImperfectionScan,
                 Mode::Trajectories, Mode::Estimates, Mode::Validate})
    if (s == to_string(m)) return m;
  throw Error(ErrorCode::ConfigError, "key 'run.mode': unknown mode '" + s + "'");
}

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& msg) {
  throw Error(ErrorCode::ConfigError, "key '" + key + "': " + msg);
}

const std::map<std::string, std::set<std::string>> kSchema = {
    {"run", {"mode", "output", "seed", "threshold"}},
    {"units", {"e0_hz", "mass_b_amu"}},
    {"reservoir",
     {"omega0", "delta0", "k0", "rho_bar", "g_uu", "g_dd", "g_ud", "g_au", "g_ad", "mass_ratio", "length_L",
      "temperature", "coarse_length", "omega"}},
    {"chain",
     {"n_spins", "rabi_re", "rabi_im", "detuning", "gamma_l", "gamma_r", "epsilon_comm", "gamma_prime",
      "site_phases"}},
    {"lattice", {"d", "k_lat", "V0"}},
    {"grid", {"points", "k_min", "k_max"}},
    {"sweep", {"from", "to", "steps", "recenter"}},
    {"evolve", {"t_final", "points", "rtol", "atol", "initial"}},
    {"scan", {"axis", "values"}},
    {"trajectories", {"n_traj", "dt_max", "global_purity"}},
    {"validate", {"rate_scale"}},
};

class Reader {
 public:
  Reader(const pt::ptree& tree, const UnitSystem& units) : tree_(tree), units_(units) {}

  bool has_section(const std::string& s) const { return tree_.get_child_optional(s).has_value(); }

  std::optional<std::string> raw(const std::string& section, const std::string& key) const {
    auto sec = tree_.get_child_optional(section);
    if (!sec) return std::nullopt;
    auto v = sec->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }

  std::string require_raw(const std::string& section, const std::string& key) const {
    auto v = raw(section, key);
    if (!v) fail(section + "." + key, "missing required key");
    return *v;
  }

  Real quantity(const std::string& section, const std::string& key, Dimension dim, std::optional<Real> fallback) const {
    auto v = raw(section, key);
    if (!v) {
      if (!fallback) fail(section + "." + key, "missing required key");
      return *fallback;
    }
    return parse_quantity(section + "." + key, *v, dim, units_);
  }

  Real number(const std::string& section, const std::string& key, std::optional<Real> fallback) const {
    return quantity(section, key, Dimension::None, fallback);
  }

  long integer(const std::string& section, const std::string& key, std::optional<long> fallback) const {
    auto v = raw(section, key);
    if (!v) {
      if (!fallback) fail(section + "." + key, "missing required key");
      return *fallback;
    }
    std::size_t used = 0;
    long out = 0;
    try {
      out = std::stol(*v, &used);
    } catch (const std::exception&) {
      fail(section + "." + key, "expected an integer, got '" + *v + "'");
    }
    if (used != v->size()) fail(section + "." + key, "expected an integer, got '" + *v + "'");
    return out;
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) const {
    auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    fail(section + "." + key, "expected true/false, got '" + *v + "'");
  }

  std::vector<Real> list(const std::string& section, const std::string& key, Dimension dim) const {
    std::vector<Real> out;
    auto v = raw(section, key);
    if (!v) return out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_quantity(section + "." + key, item, dim, units_));
    return out;
  }

 private:
  const pt::ptree& tree_;
  const UnitSystem& units_;
};

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::map<std::string, std::string>& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::ConfigError, std::string("malformed config: ") + e.message() + " (line " +
                                            std::to_string(e.line()) + ")");
  }
  for (const auto& [path, value] : overrides) {
    const auto dot = path.find('.');
    if (dot == std::string::npos) fail(path, "override must be section.key");
    const std::string sec = path.substr(0, dot), key = path.substr(dot + 1);
    if (!tree.get_child_optional(sec)) tree.add_child(sec, pt::ptree());
    tree.get_child(sec).put(pt::ptree::path_type(key, '\0'), value);
  }

  ExperimentConfig cfg;
  std::ostringstream canon;
  std::map<std::string, std::map<std::string, std::string>> sorted;
  for (const auto& [sec, body] : tree) {
    auto schema = kSchema.find(sec);
    if (body.empty() && !body.data().empty()) fail(sec, "top-level keys must sit inside a section");
    if (schema == kSchema.end()) fail(sec, "unknown section");
    for (const auto& [key, val] : body) {
      if (!schema->second.count(key)) fail(sec + "." + key, "unknown key");
      sorted[sec][key] = val.data();
    }
  }
  for (const auto& [sec, kv] : sorted)
    for (const auto& [k, v] : kv) canon << sec << "." << k << " = " << v << "\n";
  cfg.canonical = canon.str();

  Reader unit_reader(tree, cfg.units);
  cfg.units.e0_hz = unit_reader.number("units", "e0_hz", cfg.units.e0_hz);
  cfg.units.mass_b_amu = unit_reader.number("units", "mass_b_amu", cfg.units.mass_b_amu);
  if (!(cfg.units.e0_hz > 0.0) || !(cfg.units.mass_b_amu > 0.0)) fail("units", "e0_hz and mass_b_amu must be positive");
  Reader r(tree, cfg.units);

  if (!r.has_section("run")) fail("run", "missing section");
  cfg.run.mode = parse_mode(r.require_raw("run", "mode"));
  if (auto o = r.raw("run", "output")) cfg.run.output = *o;
  const long seed = r.integer("run", "seed", 1);
  if (seed < 0) fail("run.seed", "must be non-negative");
  cfg.run.seed = static_cast<std::uint64_t>(seed);
  cfg.run.threshold = r.number("run", "threshold", 0.1);
  if (!(cfg.run.threshold > 0.0)) fail("run.threshold", "must be positive");

  cfg.has_reservoir = r.has_section("reservoir");
  if (cfg.has_reservoir) {
    auto& p = cfg.reservoir;
    using D = Dimension;
    p.omega0 = r.quantity("reservoir", "omega0", D::Energy, std::nullopt);
    p.delta0 = r.quantity("reservoir", "delta0", D::Energy, std::nullopt);
    p.rho_bar = r.quantity("reservoir", "rho_bar", D::Wavevector, std::nullopt);
    p.g_uu = r.quantity("reservoir", "g_uu", D::Coupling, std::nullopt);
    p.g_dd = r.quantity("reservoir", "g_dd", D::Coupling, std::nullopt);
    p.g_ud = r.quantity("reservoir", "g_ud", D::Coupling, std::nullopt);
    p.g_au = r.quantity("reservoir", "g_au", D::Coupling, std::nullopt);
    p.g_ad = r.quantity("reservoir", "g_ad", D::Coupling, std::nullopt);
    p.mass_ratio = r.number("reservoir", "mass_ratio", std::nullopt);
    p.k0 = r.number("reservoir", "k0", cfg.units.k0_per_um());
    p.length_L = r.quantity("reservoir", "length_L", D::Length, p.length_L);
    p.temperature = r.quantity("reservoir", "temperature", D::Energy, p.temperature);
    p.coarse_length = r.quantity("reservoir", "coarse_length", D::Length, p.coarse_length);
    cfg.omega = r.quantity("reservoir", "omega", D::Energy, cfg.omega);
    try {
      reservoir::validate(p);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, std::string("section 'reservoir': ") + e.what());
    }
  }

  cfg.has_chain = r.has_section("chain");
  if (cfg.has_chain) {
    auto& c = cfg.chain;
    const long n = r.integer("chain", "n_spins", std::nullopt);
    if (n < 1 || n > 30) fail("chain.n_spins", "must be in [1, 30]");
    c.n_spins = static_cast<int>(n);
    c.rabi = Complex(r.number("chain", "rabi_re", std::nullopt), r.number("chain", "rabi_im", 0.0));
    c.detuning = r.number("chain", "detuning", 0.0);
    c.gamma_l = r.number("chain", "gamma_l", std::nullopt);
    c.gamma_r = r.number("chain", "gamma_r", std::nullopt);
    c.epsilon_comm = r.number("chain", "epsilon_comm", 0.0);
    c.gamma_prime = r.number("chain", "gamma_prime", 0.0);
    c.site_phases = r.list("chain", "site_phases", Dimension::None);
    try {
      chain::validate(c);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, std::string("section 'chain': ") + e.what());
    }
  }

  if (r.has_section("lattice")) {
    cfg.lattice.present = true;
    cfg.lattice.d = r.quantity("lattice", "d", Dimension::Length, std::nullopt);
    cfg.lattice.k_lat = r.quantity("lattice", "k_lat", Dimension::Wavevector, 0.0);
    cfg.lattice.v0 = r.quantity("lattice", "V0", Dimension::Energy, 0.0);
    if (!(cfg.lattice.d > 0.0)) fail("lattice.d", "must be positive");
    if (cfg.lattice.k_lat < 0.0) fail("lattice.k_lat", "must be non-negative");
  }

  cfg.grid.points = r.integer("grid", "points", cfg.grid.points);
  cfg.grid.k_min = r.quantity("grid", "k_min", Dimension::Wavevector, cfg.grid.k_min);
  cfg.grid.k_max = r.quantity("grid", "k_max", Dimension::Wavevector, cfg.grid.k_max);
  if (cfg.grid.points < 16 || !(cfg.grid.k_max > cfg.grid.k_min)) fail("grid", "need points >= 16 and k_max > k_min");

  cfg.sweep.from = r.quantity("sweep", "from", Dimension::Energy, cfg.sweep.from);
  cfg.sweep.to = r.quantity("sweep", "to", Dimension::Energy, cfg.sweep.to);
  cfg.sweep.steps = static_cast<int>(r.integer("sweep", "steps", cfg.sweep.steps));
  cfg.sweep.recenter = r.flag("sweep", "recenter", false);
  if (cfg.sweep.steps < 1) fail("sweep.steps", "must be >= 1");

  cfg.evolve.t_final = r.number("evolve", "t_final", cfg.evolve.t_final);
  cfg.evolve.points = static_cast<int>(r.integer("evolve", "points", cfg.evolve.points));
  cfg.evolve.rtol = r.number("evolve", "rtol", cfg.evolve.rtol);
  cfg.evolve.atol = r.number("evolve", "atol", cfg.evolve.atol);
  if (auto v = r.raw("evolve", "initial")) cfg.evolve.initial = *v;
  if (cfg.evolve.initial != "ground" && cfg.evolve.initial != "dimer") fail("evolve.initial", "expected ground or dimer");
  if (!(cfg.evolve.t_final > 0.0) || cfg.evolve.points < 2) fail("evolve", "need t_final > 0 and points >= 2");

  if (auto v = r.raw("scan", "axis")) cfg.scan.axis = *v;
  cfg.scan.values = r.list("scan", "values", Dimension::None);

  cfg.trajectories.n_traj = static_cast<int>(r.integer("trajectories", "n_traj", cfg.trajectories.n_traj));
  cfg.trajectories.dt_max = r.number("trajectories", "dt_max", cfg.trajectories.dt_max);
  cfg.trajectories.global_purity = r.flag("trajectories", "global_purity", true);
  cfg.rate_scale = r.number("validate", "rate_scale", 1.0);
  if (!(cfg.rate_scale > 0.0)) fail("validate.rate_scale", "must be positive");
  if (cfg.trajectories.n_traj < 1) fail("trajectories.n_traj", "must be >= 1");

  // Sections each mode needs.
  switch (cfg.run.mode) {
    case Mode::Spectrum:
    case Mode::RatesSweep:
      if (!cfg.has_reservoir) fail("reservoir", "section required for mode " + std::string(to_string(cfg.run.mode)));
      break;
    case Mode::Evolve:
    case Mode::Steady:
    case Mode::Trajectories:
      if (!cfg.has_chain) fail("chain", "section required for mode " + std::string(to_string(cfg.run.mode)));
      break;
    case Mode::GapScan:
    case Mode::ImperfectionScan:
      if (!cfg.has_chain) fail("chain", "section required for mode " + std::string(to_string(cfg.run.mode)));
      if (cfg.scan.values.empty()) fail("scan.values", "missing required key");
      if (cfg.run.mode == Mode::GapScan && cfg.scan.axis != "gamma_ratio" && cfg.scan.axis != "rabi")
        fail("scan.axis", "gap-scan axis must be gamma_ratio or rabi");
      if (cfg.run.mode == Mode::ImperfectionScan && cfg.scan.axis != "epsilon" && cfg.scan.axis != "gamma_prime" &&
          cfg.scan.axis != "detuning")
        fail("scan.axis", "imperfection-scan axis must be epsilon, gamma_prime or detuning");
      break;
    case Mode::Validate:
      if (!cfg.has_reservoir) fail("reservoir", "section required for mode validate");
      if (!cfg.has_chain) fail("chain", "section required for mode validate");
      break;
    case Mode::Estimates:
      break;
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace chiral::lab
