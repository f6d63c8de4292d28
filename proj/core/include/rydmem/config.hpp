#pragma once

// Scenario configuration: every physical and numerical parameter of one run.
// Values are held in internal units (see units.hpp); the text format quotes
// frequencies as nu/2pi in MHz and converts on load.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rydmem/pulses.hpp"

namespace rydmem {

enum class Model { population, storage };
enum class InitialState { ground, dark };
enum class DephasingWavevector { sum, difference };

std::string_view to_string(Model m);
std::string_view to_string(InitialState s);
std::string_view to_string(DephasingWavevector k);

struct AtomParams {
  int atom_number = 500;
  double gamma_e = 2.0 * 3.14159265358979323846 * 6e-3;  // rad/ns, 6 MHz
  double gamma_r = 2.0 * 3.14159265358979323846 * 1e-5;  // rad/ns, 10 kHz
  /// Lindblad decay channels on/off. Rates stay positive either way.
  bool dissipation = true;
  double temperature = 10e-6;  // K
};

struct MediumParams {
  double optical_depth = 5.0;
  double length = 100.0;  // um
  bool phase_mismatch = true;
  bool dephasing = true;
  DephasingWavevector dephasing_k = DephasingWavevector::sum;
};

struct OpticsParams {
  double probe_nm = 780.2415;
  double control_nm = 479.8389;
  double aux_probe_nm = 780.1139;
  double aux_control_nm = 479.8871;
};

struct ProtocolParams {
  double t_start = 0.0;  // ns
  double t_end = 0.0;    // ns; storage runs derive their end from the readout
  double write_time = 250.0;       // ns, T_write
  double storage_time = 800.0;     // ns, t_s
  double readout_rise = 45.0;      // ns
  double readout_duration = 600.0; // ns
  InitialState initial_state = InitialState::ground;
};

struct BlockadeParams {
  double epsilon = 0.0;
  double u_rr = 0.0;  // rad/ns
};

struct NoiseSpec {
  bool amplitude = false;
  bool phase = false;
  double amplitude_bound = 0.20;
  double phase_sigma = 0.1 * 3.14159265358979323846;  // rad
  double correlation_step = 1.0;                        // ns
  int n_realizations = 30;
  std::uint64_t base_seed = 20240601;

  bool active() const { return amplitude || phase; }
};

struct GridSpec {
  int n_z = 100;
  double dt = 0.1;       // ns; the fine step while Raman fields are on
  double dt_hold = 0.1;  // ns; step used once the Raman drive has ended
  double record_interval = 0.0;  // ns; 0 records every step
};

/// Quantities filled in by validate().
struct DerivedParams {
  double k_eff = 0.0;       // rad/m
  double k_eff_aux = 0.0;   // rad/m
  double delta_k = 0.0;     // rad/m
  double k_sum = 0.0;       // rad/m, |k_p| + |k_c|
  double thermal_velocity = 0.0;  // m/s
  double dephasing_kv = 0.0;      // rad/ns
  double delta_k_per_um = 0.0;    // rad/um, zero when phase_mismatch is off
  bool validated = false;
};

struct ScenarioConfig {
  std::string name = "custom";
  Model model = Model::population;
  int levels = 3;

  AtomParams atoms;
  MediumParams medium;
  OpticsParams optics;
  PulseShape probe;
  PulseShape control;
  bool cd_enabled = false;
  double cd_gain = 2.0;
  ProtocolParams protocol;
  RamanFields raman;
  bool raman_enabled = false;
  BlockadeParams blockade;
  NoiseSpec noise;
  GridSpec grid;
  DerivedParams derived;

  /// Write-stage pulses plus, for storage runs, gating and readout.
  PulseSet pulse_set() const;
  double readout_on() const { return protocol.write_time + protocol.storage_time; }
  /// Last simulated time.
  double end_time() const;
  /// Raman fields are on during [t_start, raman_end()].
  double raman_end() const;
};

/// Key-value access by "section.key" names shared by files, --set and sweeps.
/// Frequencies are nu/2pi in MHz, times in ns, lengths in um.
void set_param(ScenarioConfig& cfg, const std::string& key, const std::string& value);
std::string get_param(const ScenarioConfig& cfg, const std::string& key);
std::vector<std::string> param_keys();
std::string param_help(const std::string& key);

/// Apply "section.key=value" overrides in order.
void apply_overrides(ScenarioConfig& cfg, const std::vector<std::string>& assignments);
std::pair<std::string, std::string> split_assignment(const std::string& assignment);

ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(std::istream& in, const std::string& origin = "<stream>");
/// Merge the keys present in `in` onto `base`.
void merge_config(ScenarioConfig& base, std::istream& in, const std::string& origin = "<stream>");
void write_config(std::ostream& out, const ScenarioConfig& cfg);

/// Checks every invariant and populates cfg.derived. Throws ConfigError naming
/// the first violated field.
ScenarioConfig validate(ScenarioConfig cfg);

/// Largest angular frequency that the fixed-step integrator must resolve.
double fastest_frequency(const ScenarioConfig& cfg, bool include_raman);

/// sqrt(kB T / m) [m/s]. T = 0 returns 0; negative T throws std::domain_error.
double thermal_velocity(double temperature_k, double mass_kg);

struct Wavevectors {
  double k_eff = 0.0;      // rad/m
  double k_eff_aux = 0.0;  // rad/m
  double delta_k = 0.0;    // rad/m
};

/// k = |2 pi/lambda_c - 2 pi/lambda_p| per path. Wavelengths in nm.
Wavevectors effective_wavevectors(double probe_nm, double control_nm, double aux_probe_nm,
                                  double aux_control_nm);

/// Directory searched for config files when a relative path does not exist.
/// Taken from RYDMEM_CONFIG_DIR; empty if unset.
std::filesystem::path default_config_dir();

}  // namespace rydmem
