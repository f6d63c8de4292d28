#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "rydmem/config.hpp"
#include "rydmem/errors.hpp"
#include "rydmem/presets.hpp"
#include "rydmem/units.hpp"

using namespace rydmem;

TEST_SUITE("config") {

TEST_CASE("unit conversions round-trip") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e4, 1e4);
  for (int i = 0; i < 1000; ++i) {
    const double x = u(rng);
    CHECK(units::rad_per_ns_to_mhz(units::mhz_to_rad_per_ns(x)) == doctest::Approx(x).epsilon(1e-15));
    CHECK(units::rad_per_um_to_rad_per_m(units::rad_per_m_to_rad_per_um(x)) ==
          doctest::Approx(x).epsilon(1e-15));
  }
  CHECK(units::mhz_to_rad_per_ns(1.0) == doctest::Approx(2.0 * std::numbers::pi * 1e-3).epsilon(1e-16));
}

TEST_CASE("atom_number zero is rejected") {
  ScenarioConfig c = find_preset("fig2b").variants[0].config;
  c.atoms.atom_number = 0;
  try {
    validate(c);
    FAIL("accepted N = 0");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "atoms.atom_number");
    CHECK(std::string(e.what()).find("atom_number must be ≥ 1") != std::string::npos);
  }
}

TEST_CASE("storage preset parameters are accepted") {
  const ScenarioConfig c = validate(find_preset("fig3a").variants[0].config);
  CHECK(c.medium.optical_depth == 5.0);
  CHECK(c.atoms.atom_number == 500);
  CHECK(c.medium.length == 100.0);
  CHECK(c.atoms.gamma_e == doctest::Approx(units::mhz_to_rad_per_ns(6.0)));
  CHECK(c.derived.validated);
}

TEST_CASE("every preset validates") {
  for (const auto& p : presets())
    for (const auto& v : p.variants) {
      CAPTURE(p.name);
      CAPTURE(v.label);
      CHECK_NOTHROW(validate(v.config));
    }
}

TEST_CASE("coarse step with Raman fields is rejected") {
  ScenarioConfig c = find_preset("fig8").variants[1].config;
  REQUIRE(c.raman_enabled);
  c.grid.dt = 1.0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  try {
    validate(c);
  } catch (const ConfigError& e) {
    CHECK(e.field() == "grid.dt_ns");
  }
  // 1/(20 * 2pi * 10 rad/ns)
  const double bound = 1.0 / (20.0 * units::mhz_to_rad_per_ns(1e4));
  CHECK(bound == doctest::Approx(7.9577e-4).epsilon(1e-4));
  c.grid.dt = 0.99 * bound;
  CHECK_NOTHROW(validate(c));
  c.grid.dt = 1.01 * bound;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("raman requires the CD drive") {
  ScenarioConfig c = find_preset("fig8").variants[1].config;
  c.cd_enabled = false;
  CHECK_THROWS_AS(validate(c), ConfigError);
}

TEST_CASE("invalid ranges name their field") {
  auto field_of = [](ScenarioConfig c) -> std::string {
    try {
      validate(c);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  const ScenarioConfig base = find_preset("fig7").variants[0].config;
  ScenarioConfig c = base;
  c.blockade.epsilon = 1.5;
  CHECK(field_of(c) == "blockade.epsilon");
  c = base;
  c.atoms.gamma_e = 0.0;
  CHECK(field_of(c) == "atoms.gamma_e_mhz");
  c = base;
  c.medium.length = -1.0;
  CHECK(field_of(c) == "medium.length_um");
  c = base;
  c.atoms.atom_number = 1;
  CHECK(field_of(c) == "atoms.atom_number");
  c = base;
  c.noise.amplitude_bound = 1.0;
  CHECK(field_of(c) == "noise.amplitude_bound");
  c = base;
  c.grid.n_z = 0;
  CHECK(field_of(c) == "grid.n_z");
}

TEST_CASE("thermal velocity") {
  const double m = PhysicalConstants::rb87_mass;
  CHECK(thermal_velocity(0.0, m) == 0.0);
  const double v10 = thermal_velocity(10e-6, m);
  CHECK(v10 == doctest::Approx(0.0309).epsilon(2e-3));
  CHECK(thermal_velocity(40e-6, m) == doctest::Approx(2.0 * v10).epsilon(1e-15));
  CHECK_THROWS_AS(thermal_velocity(-1e-6, m), std::domain_error);
}

TEST_CASE("effective wave vectors") {
  const OpticsParams o;
  const Wavevectors w = effective_wavevectors(o.probe_nm, o.control_nm, o.aux_probe_nm, o.aux_control_nm);
  CHECK(w.k_eff == doctest::Approx(5041491.7).epsilon(1e-7));
  CHECK(w.k_eff_aux == doctest::Approx(5038858.0).epsilon(1e-6));
  CHECK(w.delta_k == doctest::Approx(2633.0).epsilon(0.01));
  // accumulated phase over 100 um
  CHECK(w.delta_k * 100e-6 == doctest::Approx(0.263).epsilon(0.005));
  const Wavevectors same = effective_wavevectors(780.0, 480.0, 780.0, 480.0);
  CHECK(same.delta_k == 0.0);
  CHECK(same.k_eff == same.k_eff_aux);
}

TEST_CASE("phase mismatch switch zeroes the per-um value") {
  ScenarioConfig c = find_preset("fig3c").variants[0].config;
  c = validate(c);
  CHECK(c.derived.delta_k_per_um == doctest::Approx(c.derived.delta_k * 1e-6));
  c.medium.phase_mismatch = false;
  CHECK(validate(c).derived.delta_k_per_um == 0.0);
}

TEST_CASE("text format converts MHz and parses sections") {
  std::istringstream in(R"(# comment
[scenario]
name = demo
model = storage

[atoms]
atom_number = 200
gamma_e_mhz = 6

[probe]
kind = gaussian
peak_mhz = 0.28
center_ns = 100
width_ns = 40

[noise]
phase_sigma = 0.1pi
)");
  const ScenarioConfig c = parse_config(in, "demo.ini");
  CHECK(c.name == "demo");
  CHECK(c.model == Model::storage);
  CHECK(c.atoms.atom_number == 200);
  CHECK(c.atoms.gamma_e == doctest::Approx(2.0 * std::numbers::pi * 6e-3));
  CHECK(c.probe.kind == PulseKind::gaussian);
  CHECK(c.probe.peak == doctest::Approx(2.0 * std::numbers::pi * 0.28e-3));
  CHECK(c.noise.phase_sigma == doctest::Approx(0.1 * std::numbers::pi));
}

TEST_CASE("unknown keys and malformed values are config errors") {
  ScenarioConfig c;
  CHECK_THROWS_AS(set_param(c, "atoms.nonsense", "1"), ConfigError);
  CHECK_THROWS_AS(set_param(c, "atoms.atom_number", "many"), ConfigError);
  CHECK_THROWS_AS(set_param(c, "probe.kind", "triangle"), ConfigError);
  CHECK_THROWS_AS(apply_overrides(c, {"no_equals_sign"}), ConfigError);
  std::istringstream bad("[atoms]\nfoo = 1\n");
  CHECK_THROWS_AS(parse_config(bad), ConfigError);
}

TEST_CASE("write then parse reproduces every preset exactly") {
  for (const auto& p : presets())
    for (const auto& v : p.variants) {
      std::ostringstream out;
      write_config(out, v.config);
      std::istringstream in(out.str());
      const ScenarioConfig back = parse_config(in);
      for (const auto& k : param_keys()) {
        CAPTURE(p.name);
        CAPTURE(k);
        CHECK(get_param(back, k) == get_param(v.config, k));
      }
      CHECK(back.probe.peak == v.config.probe.peak);
      CHECK(back.control.rise == v.config.control.rise);
      CHECK(back.grid.dt == v.config.grid.dt);
    }
}

TEST_CASE("overrides apply in order") {
  ScenarioConfig c = find_preset("fig3c").variants[0].config;
  apply_overrides(c, {"grid.n_z=50", "grid.n_z=200", "control.peak_mhz=5"});
  CHECK(c.grid.n_z == 200);
  CHECK(c.control.peak == doctest::Approx(units::mhz_to_rad_per_ns(5.0)));
  CHECK(split_assignment("a.b = 3").first == "a.b");
  CHECK(split_assignment("a.b = 3").second == "3");
}

TEST_CASE("relative config paths fall back to the config directory") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "rydmem_cfgdir_test";
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "mine.ini");
    f << "[scenario]\nname = from_env\n";
  }
  ::setenv("RYDMEM_CONFIG_DIR", dir.c_str(), 1);
  CHECK(default_config_dir() == dir);
  CHECK(load_config("mine.ini").name == "from_env");
  ::unsetenv("RYDMEM_CONFIG_DIR");
  CHECK_THROWS(load_config("definitely_missing_file.ini"));
  fs::remove_all(dir);
}

}  // TEST_SUITE
