#pragma once

// Named scenarios. A preset bundles one or more labelled configurations
// (variants) that together make up one figure.

#include <string>
#include <vector>

#include "rydmem/config.hpp"

namespace rydmem {

struct PresetVariant {
  std::string label;
  ScenarioConfig config;
};

struct Preset {
  std::string name;
  std::string description;
  std::vector<PresetVariant> variants;
};

/// All presets, in a fixed order.
const std::vector<Preset>& presets();
/// Throws ConfigError("preset", ...) for unknown names.
const Preset& find_preset(const std::string& name);

/// Shared defaults: N = 500, Gamma/2pi = 6 MHz, Gamma_r/2pi = 10 kHz,
/// alpha = 5, L = 100 um, 10 uK, Omega_p/2pi = 0.28 MHz, Omega_c/2pi = 7 MHz.
ScenarioConfig base_config();

/// Population run of the conventional pulse pair (smoothed rectangular control).
ScenarioConfig conventional_population(double write_time);
/// Population run of the Gaussian pair t_p = 0.65T, t_c = 0.40T, sigma = T/4.
ScenarioConfig gaussian_pair_population(double write_time, bool cd);
ScenarioConfig conventional_storage(double write_time);
ScenarioConfig gaussian_pair_storage(double write_time, bool cd);

}  // namespace rydmem
