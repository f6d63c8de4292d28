#include "rydmem/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rydmem/errors.hpp"
#include "rydmem/units.hpp"

namespace rydmem {

std::string_view to_string(Model m) { return m == Model::population ? "population" : "storage"; }
std::string_view to_string(InitialState s) { return s == InitialState::ground ? "ground" : "dark"; }
std::string_view to_string(DephasingWavevector k) {
  return k == DephasingWavevector::sum ? "sum" : "difference";
}

PulseSet ScenarioConfig::pulse_set() const {
  PulseSet ps;
  ps.probe = probe;
  ps.control = control;
  ps.cd_enabled = cd_enabled;
  ps.cd_gain = cd_gain;
  if (model == Model::storage) {
    ps.write_end = protocol.write_time;
    ps.readout_on = readout_on();
    ps.readout_rise = protocol.readout_rise;
    ps.readout_peak = control.peak;
  }
  return ps;
}

double ScenarioConfig::end_time() const {
  if (model == Model::storage) return readout_on() + protocol.readout_duration;
  return protocol.t_end;
}

double ScenarioConfig::raman_end() const {
  return model == Model::storage ? protocol.write_time : protocol.t_end;
}

namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double parse_double(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  double scale = 1.0;
  // "0.1pi" style suffix for angles.
  if (s.size() > 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    scale = std::numbers::pi;
    s = trim(s.substr(0, s.size() - 2));
    if (s.empty()) s = "1";
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError(key, key + ": expected a number, got '" + text + "'");
  return v * scale;
}

long long parse_integer(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key, key + ": expected an integer, got '" + text + "'");
  return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key, key + ": expected an unsigned integer, got '" + text + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  std::string s = trim(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(key, key + ": expected a boolean, got '" + text + "'");
}

std::string format_double(double v) {
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, prec);
    std::string s(buf, res.ptr);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    if (back == v) return s;
  }
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Shortest decimal x such that x * scale reproduces `internal` exactly, so
// that a written config reloads bit-identically.
std::string format_scaled(double internal, double scale) {
  if (scale == 1.0) return format_double(internal);
  double shown = internal / scale;
  char buf[64];
  for (int prec = 15; prec <= 17; ++prec) {
    auto res = std::to_chars(buf, buf + sizeof buf, shown, std::chars_format::general, prec);
    std::string s(buf, res.ptr);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    if (back * scale == internal) return s;
  }
  double up = shown, down = shown;
  for (int i = 0; i < 8; ++i) {
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    if (up * scale == internal) return format_double(up);
    if (down * scale == internal) return format_double(down);
  }
  return format_double(shown);
}

struct Param {
  std::string help;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

using Registry = std::map<std::string, Param>;

template <class Access>
Param real(Access access, double scale, std::string help) {
  return {std::move(help),
          [access, scale](ScenarioConfig& c, const std::string& k, const std::string& v) {
            access(c) = parse_double(k, v) * scale;
          },
          [access, scale](const ScenarioConfig& c) {
            return format_scaled(access(const_cast<ScenarioConfig&>(c)), scale);
          }};
}

template <class Access>
Param integer(Access access, std::string help) {
  return {std::move(help),
          [access](ScenarioConfig& c, const std::string& k, const std::string& v) {
            long long x = parse_integer(k, v);
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
              throw ConfigError(k, k + ": integer out of range");
            access(c) = static_cast<int>(x);
          },
          [access](const ScenarioConfig& c) {
            return std::to_string(access(const_cast<ScenarioConfig&>(c)));
          }};
}

template <class Access>
Param flag(Access access, std::string help) {
  return {std::move(help),
          [access](ScenarioConfig& c, const std::string& k, const std::string& v) {
            access(c) = parse_bool(k, v);
          },
          [access](const ScenarioConfig& c) {
            return std::string(access(const_cast<ScenarioConfig&>(c)) ? "true" : "false");
          }};
}

void add_pulse(Registry& r, const std::string& section, PulseShape ScenarioConfig::*member) {
  constexpr double mhz = units::mhz_to_rad_per_ns(1.0);
  r[section + ".kind"] = {"gaussian | smoothed_rect | smoothed_square | zero",
                          [member](ScenarioConfig& c, const std::string& k, const std::string& v) {
                            try {
                              (c.*member).kind = pulse_kind_from_string(trim(v));
                            } catch (const std::invalid_argument&) {
                              throw ConfigError(k, k + ": unknown pulse kind '" + v + "'");
                            }
                          },
                          [member](const ScenarioConfig& c) {
                            return std::string(to_string((c.*member).kind));
                          }};
  r[section + ".peak_mhz"] =
      real([member](ScenarioConfig& c) -> double& { return (c.*member).peak; }, mhz,
           "peak Rabi frequency, nu/2pi in MHz");
  r[section + ".center_ns"] =
      real([member](ScenarioConfig& c) -> double& { return (c.*member).center; }, 1.0,
           "gaussian centre [ns]");
  r[section + ".width_ns"] =
      real([member](ScenarioConfig& c) -> double& { return (c.*member).width; }, 1.0,
           "gaussian standard deviation [ns]");
  r[section + ".t_on_ns"] =
      real([member](ScenarioConfig& c) -> double& { return (c.*member).t_on; }, 1.0,
           "smoothed shapes: switch-on time [ns]");
  r[section + ".t_off_ns"] =
      real([member](ScenarioConfig& c) -> double& { return (c.*member).t_off; }, 1.0,
           "smoothed shapes: switch-off time [ns]");
  r[section + ".rise_ns"] =
      real([member](ScenarioConfig& c) -> double& { return (c.*member).rise; }, 1.0,
           "smoothed shapes: erf rise time [ns]");
}

Registry build_registry() {
  constexpr double mhz = units::mhz_to_rad_per_ns(1.0);
  Registry r;
  r["scenario.name"] = {"free-form label",
                        [](ScenarioConfig& c, const std::string&, const std::string& v) {
                          c.name = trim(v);
                        },
                        [](const ScenarioConfig& c) { return c.name; }};
  r["scenario.model"] = {"population | storage",
                         [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                           auto s = trim(v);
                           if (s == "population")
                             c.model = Model::population;
                           else if (s == "storage")
                             c.model = Model::storage;
                           else
                             throw ConfigError(k, k + ": expected population or storage, got '" +
                                                      v + "'");
                         },
                         [](const ScenarioConfig& c) { return std::string(to_string(c.model)); }};
  r["scenario.levels"] = integer([](ScenarioConfig& c) -> int& { return c.levels; },
                                 "3 (single excitation) or 6 (double-excitation manifold)");
  r["scenario.initial_state"] = {
      "ground | dark",
      [](ScenarioConfig& c, const std::string& k, const std::string& v) {
        auto s = trim(v);
        if (s == "ground")
          c.protocol.initial_state = InitialState::ground;
        else if (s == "dark")
          c.protocol.initial_state = InitialState::dark;
        else
          throw ConfigError(k, k + ": expected ground or dark, got '" + v + "'");
      },
      [](const ScenarioConfig& c) { return std::string(to_string(c.protocol.initial_state)); }};

  r["atoms.atom_number"] =
      integer([](ScenarioConfig& c) -> int& { return c.atoms.atom_number; }, "N");
  r["atoms.gamma_e_mhz"] = real([](ScenarioConfig& c) -> double& { return c.atoms.gamma_e; }, mhz,
                                "|E> decay rate, nu/2pi in MHz");
  r["atoms.gamma_r_mhz"] = real([](ScenarioConfig& c) -> double& { return c.atoms.gamma_r; }, mhz,
                                "|R> decay rate, nu/2pi in MHz");
  r["atoms.dissipation"] = flag([](ScenarioConfig& c) -> bool& { return c.atoms.dissipation; },
                                "enable the Lindblad decay channels");
  r["atoms.temperature_k"] =
      real([](ScenarioConfig& c) -> double& { return c.atoms.temperature; }, 1.0,
           "ensemble temperature [K]");

  r["medium.optical_depth"] =
      real([](ScenarioConfig& c) -> double& { return c.medium.optical_depth; }, 1.0, "alpha");
  r["medium.length_um"] =
      real([](ScenarioConfig& c) -> double& { return c.medium.length; }, 1.0, "L [um]");
  r["medium.phase_mismatch"] =
      flag([](ScenarioConfig& c) -> bool& { return c.medium.phase_mismatch; },
           "apply exp(i dk z) to the CD coupling");
  r["medium.dephasing"] = flag([](ScenarioConfig& c) -> bool& { return c.medium.dephasing; },
                               "motional dephasing of the spin wave");
  r["medium.dephasing_k"] = {
      "sum | difference: wave vector entering the dephasing rate",
      [](ScenarioConfig& c, const std::string& k, const std::string& v) {
        auto s = trim(v);
        if (s == "sum")
          c.medium.dephasing_k = DephasingWavevector::sum;
        else if (s == "difference")
          c.medium.dephasing_k = DephasingWavevector::difference;
        else
          throw ConfigError(k, k + ": expected sum or difference, got '" + v + "'");
      },
      [](const ScenarioConfig& c) { return std::string(to_string(c.medium.dephasing_k)); }};

  r["optics.probe_nm"] =
      real([](ScenarioConfig& c) -> double& { return c.optics.probe_nm; }, 1.0, "lambda_p");
  r["optics.control_nm"] =
      real([](ScenarioConfig& c) -> double& { return c.optics.control_nm; }, 1.0, "lambda_c");
  r["optics.aux_probe_nm"] =
      real([](ScenarioConfig& c) -> double& { return c.optics.aux_probe_nm; }, 1.0, "lambda'_p");
  r["optics.aux_control_nm"] = real(
      [](ScenarioConfig& c) -> double& { return c.optics.aux_control_nm; }, 1.0, "lambda'_c");

  add_pulse(r, "probe", &ScenarioConfig::probe);
  add_pulse(r, "control", &ScenarioConfig::control);

  r["cd.enabled"] = flag([](ScenarioConfig& c) -> bool& { return c.cd_enabled; },
                         "counterdiabatic drive on/off");
  r["cd.gain"] = real([](ScenarioConfig& c) -> double& { return c.cd_gain; }, 1.0,
                      "Omega_CD = gain * dtheta/dt");

  r["protocol.t_start_ns"] =
      real([](ScenarioConfig& c) -> double& { return c.protocol.t_start; }, 1.0, "first time");
  r["protocol.t_end_ns"] = real([](ScenarioConfig& c) -> double& { return c.protocol.t_end; },
                                1.0, "population runs: last time");
  r["protocol.write_time_ns"] =
      real([](ScenarioConfig& c) -> double& { return c.protocol.write_time; }, 1.0, "T_write");
  r["protocol.storage_time_ns"] = real(
      [](ScenarioConfig& c) -> double& { return c.protocol.storage_time; }, 1.0, "t_s");
  r["protocol.readout_rise_ns"] = real(
      [](ScenarioConfig& c) -> double& { return c.protocol.readout_rise; }, 1.0,
      "rise time of the readout control step");
  r["protocol.readout_duration_ns"] = real(
      [](ScenarioConfig& c) -> double& { return c.protocol.readout_duration; }, 1.0,
      "simulated time after the readout switch-on");

  r["raman.enabled"] = flag([](ScenarioConfig& c) -> bool& { return c.raman_enabled; },
                            "realise the CD drive with two off-resonant Raman fields");
  r["raman.detuning_mhz"] = real([](ScenarioConfig& c) -> double& { return c.raman.detuning; },
                                 mhz, "Delta, nu/2pi in MHz");
  r["raman.stark_compensation"] =
      flag([](ScenarioConfig& c) -> bool& { return c.raman.stark_compensation; },
           "add the diagonal compensation Hamiltonian");

  r["blockade.epsilon"] =
      real([](ScenarioConfig& c) -> double& { return c.blockade.epsilon; }, 1.0,
           "weak-field amplitude correction");
  r["blockade.u_rr_mhz"] = real([](ScenarioConfig& c) -> double& { return c.blockade.u_rr; },
                                mhz, "van der Waals shift, nu/2pi in MHz");

  r["noise.amplitude"] = flag([](ScenarioConfig& c) -> bool& { return c.noise.amplitude; },
                              "static amplitude error on the CD drive");
  r["noise.phase"] =
      flag([](ScenarioConfig& c) -> bool& { return c.noise.phase; }, "phase noise on the CD drive");
  r["noise.amplitude_bound"] = real(
      [](ScenarioConfig& c) -> double& { return c.noise.amplitude_bound; }, 1.0,
      "eta ~ U[-bound, bound]");
  r["noise.phase_sigma"] = real([](ScenarioConfig& c) -> double& { return c.noise.phase_sigma; },
                                1.0, "phase standard deviation [rad]; accepts '0.1pi'");
  r["noise.correlation_step_ns"] = real(
      [](ScenarioConfig& c) -> double& { return c.noise.correlation_step; }, 1.0,
      "phase noise hold time [ns]");
  r["noise.n_realizations"] =
      integer([](ScenarioConfig& c) -> int& { return c.noise.n_realizations; }, "ensemble size");
  r["noise.base_seed"] = {"realisation i uses base_seed + i",
                          [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                            c.noise.base_seed = parse_unsigned(k, v);
                          },
                          [](const ScenarioConfig& c) { return std::to_string(c.noise.base_seed); }};

  r["grid.n_z"] = integer([](ScenarioConfig& c) -> int& { return c.grid.n_z; }, "medium cells");
  r["grid.dt_ns"] = real([](ScenarioConfig& c) -> double& { return c.grid.dt; }, 1.0,
                         "time step (Raman window when Raman is enabled)");
  r["grid.dt_hold_ns"] = real([](ScenarioConfig& c) -> double& { return c.grid.dt_hold; }, 1.0,
                              "time step after the Raman drive has ended");
  r["grid.record_interval_ns"] = real(
      [](ScenarioConfig& c) -> double& { return c.grid.record_interval; }, 1.0,
      "sampling interval of recorded traces; 0 records every step");
  return r;
}

const Registry& registry() {
  static const Registry r = build_registry();
  return r;
}

const Param& lookup(const std::string& key) {
  auto it = registry().find(key);
  if (it == registry().end()) throw ConfigError(key, "unknown parameter '" + key + "'");
  return it->second;
}

}  // namespace

void set_param(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  lookup(key).set(cfg, key, value);
  cfg.derived.validated = false;
}

std::string get_param(const ScenarioConfig& cfg, const std::string& key) {
  return lookup(key).get(cfg);
}

std::vector<std::string> param_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : registry()) keys.push_back(k);
  return keys;
}

std::string param_help(const std::string& key) { return lookup(key).help; }

std::pair<std::string, std::string> split_assignment(const std::string& assignment) {
  auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(assignment, "override '" + assignment + "' is not of the form section.key=value");
  return {trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1))};
}

void apply_overrides(ScenarioConfig& cfg, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) {
    auto [k, v] = split_assignment(a);
    set_param(cfg, k, v);
  }
}

void merge_config(ScenarioConfig& base, std::istream& in, const std::string& origin) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(origin, origin + ": " + e.message() + " (line " +
                                  std::to_string(e.line()) + ")");
  }
  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty())
      throw ConfigError(section, origin + ": key '" + section + "' outside any [section]");
    for (const auto& [key, value] : body) set_param(base, section + "." + key, value.data());
  }
}

ScenarioConfig parse_config(std::istream& in, const std::string& origin) {
  ScenarioConfig cfg;
  merge_config(cfg, in, origin);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::filesystem::path p = path;
  if (!std::filesystem::exists(p) && p.is_relative()) {
    auto dir = default_config_dir();
    if (!dir.empty() && std::filesystem::exists(dir / p)) p = dir / p;
  }
  std::ifstream in(p);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  return parse_config(in, p.string());
}

void write_config(std::ostream& out, const ScenarioConfig& cfg) {
  std::string current;
  for (const auto& [key, param] : registry()) {
    auto dot = key.find('.');
    std::string section = key.substr(0, dot);
    if (section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << section << "]\n";
      current = section;
    }
    out << key.substr(dot + 1) << " = " << param.get(cfg) << '\n';
  }
}

std::filesystem::path default_config_dir() {
  const char* env = std::getenv("RYDMEM_CONFIG_DIR");
  return env ? std::filesystem::path(env) : std::filesystem::path();
}

double thermal_velocity(double temperature_k, double mass_kg) {
  if (!(temperature_k >= 0.0)) throw std::domain_error("temperature must be non-negative");
  if (!(mass_kg > 0.0)) throw std::domain_error("mass must be positive");
  return std::sqrt(PhysicalConstants::boltzmann_constant * temperature_k / mass_kg);
}

Wavevectors effective_wavevectors(double probe_nm, double control_nm, double aux_probe_nm,
                                  double aux_control_nm) {
  for (double l : {probe_nm, control_nm, aux_probe_nm, aux_control_nm})
    if (!(l > 0.0)) throw std::domain_error("wavelengths must be positive");
  auto k = [](double nm) { return kTwoPi / units::nm_to_m(nm); };
  Wavevectors w;
  w.k_eff = std::abs(k(control_nm) - k(probe_nm));
  w.k_eff_aux = std::abs(k(aux_control_nm) - k(aux_probe_nm));
  w.delta_k = std::abs(w.k_eff - w.k_eff_aux);
  return w;
}

double fastest_frequency(const ScenarioConfig& cfg, bool include_raman) {
  const double sqrt_n = std::sqrt(static_cast<double>(std::max(cfg.atoms.atom_number, 1)));
  double w = std::max(sqrt_n * cfg.probe.peak, cfg.control.peak);
  if (cfg.levels == 6) {
    double n = cfg.atoms.atom_number;
    w = std::max(w, cfg.blockade.epsilon * std::sqrt(2.0 * (n - 1.0)) * cfg.probe.peak);
    w = std::max(w, std::sqrt(2.0) * cfg.control.peak);
    w = std::max(w, cfg.blockade.u_rr);
  }
  if (cfg.atoms.dissipation) {
    w = std::max(w, cfg.atoms.gamma_e);
    if (cfg.levels == 6) w = std::max(w, 2.0 * cfg.atoms.gamma_e);
  }
  if (include_raman && cfg.raman_enabled) w = std::max(w, cfg.raman.detuning);
  return w;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what, double value) {
  throw ConfigError(field, field + " " + what + " (got " + format_double(value) + ")");
}

void require_positive(const std::string& field, double v) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(field, "must be > 0", v);
}

void check_pulse(const std::string& section, const PulseShape& p) {
  if (!(p.peak >= 0.0) || !std::isfinite(p.peak)) fail(section + ".peak_mhz", "must be >= 0", p.peak);
  if (p.kind == PulseKind::gaussian) require_positive(section + ".width_ns", p.width);
  if (p.kind == PulseKind::smoothed_rect || p.kind == PulseKind::smoothed_square) {
    require_positive(section + ".rise_ns", p.rise);
    if (!(p.t_off > p.t_on)) fail(section + ".t_off_ns", "must exceed t_on_ns", p.t_off);
  }
}

}  // namespace

ScenarioConfig validate(ScenarioConfig cfg) {
  if (cfg.levels != 3 && cfg.levels != 6)
    fail("scenario.levels", "must be 3 or 6", cfg.levels);
  if (cfg.atoms.atom_number < 1)
    throw ConfigError("atoms.atom_number", "atom_number must be ≥ 1 (got " +
                                               std::to_string(cfg.atoms.atom_number) + ")");
  if (cfg.levels == 6 && cfg.atoms.atom_number < 2)
    fail("atoms.atom_number", "must be >= 2 for the six-level model", cfg.atoms.atom_number);
  require_positive("atoms.gamma_e_mhz", cfg.atoms.gamma_e);
  require_positive("atoms.gamma_r_mhz", cfg.atoms.gamma_r);
  require_positive("atoms.temperature_k", cfg.atoms.temperature);
  require_positive("medium.optical_depth", cfg.medium.optical_depth);
  require_positive("medium.length_um", cfg.medium.length);
  require_positive("optics.probe_nm", cfg.optics.probe_nm);
  require_positive("optics.control_nm", cfg.optics.control_nm);
  require_positive("optics.aux_probe_nm", cfg.optics.aux_probe_nm);
  require_positive("optics.aux_control_nm", cfg.optics.aux_control_nm);
  check_pulse("probe", cfg.probe);
  check_pulse("control", cfg.control);
  if (!(cfg.cd_gain >= 0.0) || !std::isfinite(cfg.cd_gain)) fail("cd.gain", "must be >= 0", cfg.cd_gain);

  require_positive("protocol.write_time_ns", cfg.protocol.write_time);
  require_positive("protocol.storage_time_ns", cfg.protocol.storage_time);
  require_positive("protocol.readout_rise_ns", cfg.protocol.readout_rise);
  require_positive("protocol.readout_duration_ns", cfg.protocol.readout_duration);
  if (cfg.model == Model::population && !(cfg.protocol.t_end > cfg.protocol.t_start))
    fail("protocol.t_end_ns", "must exceed t_start_ns", cfg.protocol.t_end);
  if (cfg.model == Model::storage && !(cfg.protocol.write_time > cfg.protocol.t_start))
    fail("protocol.write_time_ns", "must exceed t_start_ns", cfg.protocol.write_time);

  if (!(cfg.blockade.epsilon >= 0.0 && cfg.blockade.epsilon <= 1.0))
    fail("blockade.epsilon", "must lie in [0, 1]", cfg.blockade.epsilon);
  if (!(cfg.blockade.u_rr >= 0.0)) fail("blockade.u_rr_mhz", "must be >= 0", cfg.blockade.u_rr);

  if (!(cfg.noise.amplitude_bound >= 0.0 && cfg.noise.amplitude_bound < 1.0))
    fail("noise.amplitude_bound", "must lie in [0, 1)", cfg.noise.amplitude_bound);
  if (!(cfg.noise.phase_sigma >= 0.0)) fail("noise.phase_sigma", "must be >= 0", cfg.noise.phase_sigma);
  require_positive("noise.correlation_step_ns", cfg.noise.correlation_step);
  if (cfg.noise.n_realizations < 1)
    fail("noise.n_realizations", "must be >= 1", cfg.noise.n_realizations);

  if (cfg.grid.n_z < 1) fail("grid.n_z", "must be >= 1", cfg.grid.n_z);
  require_positive("grid.dt_ns", cfg.grid.dt);
  require_positive("grid.dt_hold_ns", cfg.grid.dt_hold);
  if (!(cfg.grid.record_interval >= 0.0))
    fail("grid.record_interval_ns", "must be >= 0", cfg.grid.record_interval);

  if (cfg.raman_enabled) {
    require_positive("raman.detuning_mhz", cfg.raman.detuning);
    if (!cfg.cd_enabled)
      throw ConfigError("raman.enabled", "raman.enabled requires cd.enabled = true");
  }

  const double w_step = fastest_frequency(cfg, true);
  if (w_step > 0.0 && cfg.grid.dt > 1.0 / (20.0 * w_step))
    fail("grid.dt_ns",
         "too coarse: must be <= 1/(20 omega_max) = " + format_double(1.0 / (20.0 * w_step)) + " ns",
         cfg.grid.dt);
  const double w_hold = fastest_frequency(cfg, false);
  if (w_hold > 0.0 && cfg.grid.dt_hold > 1.0 / (20.0 * w_hold))
    fail("grid.dt_hold_ns",
         "too coarse: must be <= 1/(20 omega_max) = " + format_double(1.0 / (20.0 * w_hold)) + " ns",
         cfg.grid.dt_hold);

  Wavevectors w = effective_wavevectors(cfg.optics.probe_nm, cfg.optics.control_nm,
                                        cfg.optics.aux_probe_nm, cfg.optics.aux_control_nm);
  cfg.derived.k_eff = w.k_eff;
  cfg.derived.k_eff_aux = w.k_eff_aux;
  cfg.derived.delta_k = w.delta_k;
  cfg.derived.k_sum = kTwoPi / units::nm_to_m(cfg.optics.probe_nm) +
                      kTwoPi / units::nm_to_m(cfg.optics.control_nm);
  cfg.derived.thermal_velocity = thermal_velocity(cfg.atoms.temperature, PhysicalConstants::rb87_mass);
  const double k_deph =
      cfg.medium.dephasing_k == DephasingWavevector::sum ? cfg.derived.k_sum : cfg.derived.k_eff;
  // rad/m * m/s = rad/s -> rad/ns
  cfg.derived.dephasing_kv = k_deph * cfg.derived.thermal_velocity * 1e-9;
  cfg.derived.delta_k_per_um =
      cfg.medium.phase_mismatch ? units::rad_per_m_to_rad_per_um(w.delta_k) : 0.0;
  cfg.derived.validated = true;
  return cfg;
}

}  // namespace rydmem
