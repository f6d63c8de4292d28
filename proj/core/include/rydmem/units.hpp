#pragma once

// Units contract used everywhere inside the library:
//   time              ns
//   angular frequency rad/ns
//   length            um
//   wave vector       rad/um
//   temperature       K
// Configuration files quote frequencies as nu/2pi in MHz; convert on load.

#include <numbers>

namespace rydmem {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

namespace units {

/// nu/2pi [MHz] -> omega [rad/ns].
constexpr double mhz_to_rad_per_ns(double nu_mhz) { return nu_mhz * kTwoPi * 1e-3; }
constexpr double rad_per_ns_to_mhz(double omega) { return omega / (kTwoPi * 1e-3); }

constexpr double rad_per_m_to_rad_per_um(double k) { return k * 1e-6; }
constexpr double rad_per_um_to_rad_per_m(double k) { return k * 1e6; }

// 1 m/s = 1e6 um / 1e9 ns
constexpr double m_per_s_to_um_per_ns(double v) { return v * 1e-3; }

constexpr double nm_to_m(double x) { return x * 1e-9; }

}  // namespace units

/// CODATA 2018 values. Never scenario-dependent.
struct PhysicalConstants {
  static constexpr double boltzmann_constant = 1.380649e-23;          // J/K (exact)
  static constexpr double atomic_mass_unit = 1.66053906660e-27;       // kg
  static constexpr double rb87_mass = 86.909180531 * atomic_mass_unit;  // kg
  static constexpr double speed_of_light = 299792458.0;               // m/s (exact)
};

}  // namespace rydmem
