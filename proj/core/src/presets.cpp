#include "rydmem/presets.hpp"

#include <numbers>

#include "rydmem/errors.hpp"
#include "rydmem/units.hpp"

namespace rydmem {

namespace {
constexpr double mhz(double x) { return units::mhz_to_rad_per_ns(x); }
constexpr double kProbePeak = 0.28;   // MHz
constexpr double kControlPeak = 7.0;  // MHz
}  // namespace

ScenarioConfig base_config() {
  ScenarioConfig c;
  c.atoms.atom_number = 500;
  c.atoms.gamma_e = mhz(6.0);
  c.atoms.gamma_r = mhz(0.01);
  c.atoms.dissipation = true;
  c.atoms.temperature = 10e-6;
  c.medium.optical_depth = 5.0;
  c.medium.length = 100.0;
  c.medium.phase_mismatch = true;
  c.medium.dephasing = true;
  c.medium.dephasing_k = DephasingWavevector::sum;
  c.cd_gain = 2.0;
  c.raman.detuning = mhz(10000.0);
  c.raman.stark_compensation = true;
  c.grid.n_z = 100;
  c.grid.dt = 0.1;
  c.grid.dt_hold = 0.1;
  c.grid.record_interval = 0.0;
  return c;
}

// Population scenarios run without decay: the single-superatom transfer is
// coherent, and decay during a 250-500 ns window caps P_R well below the
// reported values.
ScenarioConfig conventional_population(double T) {
  ScenarioConfig c = base_config();
  c.model = Model::population;
  c.atoms.dissipation = false;
  c.probe = PulseShape::gaussian(mhz(kProbePeak), 0.68 * T, T / 4.0);
  c.control = PulseShape::smoothed_rect(mhz(kControlPeak), -T, 0.58 * T, 0.18 * T);
  c.cd_enabled = false;
  c.protocol.t_start = 0.0;
  c.protocol.t_end = T;
  c.protocol.write_time = T;
  return c;
}

ScenarioConfig gaussian_pair_population(double T, bool cd) {
  ScenarioConfig c = base_config();
  c.model = Model::population;
  c.atoms.dissipation = false;
  c.probe = PulseShape::gaussian(mhz(kProbePeak), 0.65 * T, T / 4.0);
  c.control = PulseShape::gaussian(mhz(kControlPeak), 0.40 * T, T / 4.0);
  c.cd_enabled = cd;
  c.protocol.t_start = -0.2 * T;
  c.protocol.t_end = 1.3 * T;
  c.protocol.write_time = T;
  return c;
}

ScenarioConfig conventional_storage(double T) {
  ScenarioConfig c = conventional_population(T);
  c.model = Model::storage;
  c.atoms.dissipation = true;
  c.protocol.t_start = 0.0;
  c.protocol.storage_time = 800.0;
  c.protocol.readout_rise = 0.18 * T;
  c.protocol.readout_duration = 600.0;
  return c;
}

ScenarioConfig gaussian_pair_storage(double T, bool cd) {
  ScenarioConfig c = gaussian_pair_population(T, cd);
  c.model = Model::storage;
  c.atoms.dissipation = true;
  c.protocol.t_start = 0.0;
  c.protocol.storage_time = 800.0;
  c.protocol.readout_rise = 0.18 * T;
  c.protocol.readout_duration = 600.0;
  return c;
}

namespace {

ScenarioConfig named(ScenarioConfig c, const std::string& name) {
  c.name = name;
  return c;
}

// Square control with a Gaussian probe centred in the write window.
ScenarioConfig square_control(double T, double probe_peak_mhz, double sigma, Model model) {
  ScenarioConfig c = base_config();
  c.model = model;
  c.probe = PulseShape::gaussian(mhz(probe_peak_mhz), 0.5 * T, sigma);
  c.control = PulseShape::smoothed_square(mhz(kControlPeak), -0.5 * T, 0.6 * T, 0.1 * T);
  c.cd_enabled = true;
  c.protocol.write_time = T;
  c.protocol.t_start = 0.0;
  if (model == Model::population) {
    c.atoms.dissipation = false;
    c.protocol.t_end = T;
  } else {
    c.protocol.storage_time = 800.0;
    c.protocol.readout_rise = 0.18 * T;
    c.protocol.readout_duration = 600.0;
  }
  return c;
}

ScenarioConfig blockade(ScenarioConfig c) {
  c.levels = 6;
  c.blockade.epsilon = 0.3;
  c.blockade.u_rr = mhz(5.0);
  return c;
}

ScenarioConfig with_noise(ScenarioConfig c, bool amplitude, bool phase) {
  c.noise.amplitude = amplitude;
  c.noise.phase = phase;
  c.noise.amplitude_bound = 0.20;
  c.noise.phase_sigma = 0.1 * std::numbers::pi;
  c.noise.correlation_step = 1.0;
  c.noise.n_realizations = 30;
  return c;
}

ScenarioConfig raman(ScenarioConfig c, bool enabled, bool compensation) {
  c.raman_enabled = enabled;
  c.raman.stark_compensation = compensation;
  c.grid.record_interval = 0.1;
  if (enabled) {
    c.grid.dt_hold = c.grid.dt;
    c.grid.dt = 5e-4;
  }
  return c;
}

ScenarioConfig fig8_storage(bool cd_raman, bool compensation) {
  ScenarioConfig c = raman(gaussian_pair_storage(250.0, true), cd_raman, compensation);
  c.grid.n_z = 40;
  return c;
}

std::vector<Preset> build() {
  std::vector<Preset> p;
  const double T = 250.0;
  auto single = [](std::string name, std::string desc, std::string label, ScenarioConfig c) {
    return Preset{name, std::move(desc), {{std::move(label), named(std::move(c), name)}}};
  };

  p.push_back(single("fig2a", "conventional EIT write, T = 500 ns: pulse sequence", "conventional",
                     conventional_population(500.0)));
  p.push_back(single("fig2b", "conventional EIT write, T = 500 ns: populations", "conventional",
                     conventional_population(500.0)));
  p.push_back(single("fig2c", "conventional EIT write, T = 250 ns: pulse sequence", "conventional",
                     conventional_population(T)));
  p.push_back(single("fig2d", "conventional EIT write, T = 250 ns: populations", "conventional",
                     conventional_population(T)));
  p.push_back(single("fig2e", "Gaussian pair with CD drive, T = 250 ns: pulse sequence", "cd",
                     gaussian_pair_population(T, true)));
  p.push_back(single("fig2f", "Gaussian pair with CD drive, T = 250 ns: populations", "cd",
                     gaussian_pair_population(T, true)));

  p.push_back(single("fig3a", "storage and retrieval, conventional, T_write = 500 ns", "conventional",
                     conventional_storage(500.0)));
  p.push_back(single("fig3b", "storage and retrieval, conventional, T_write = 250 ns", "conventional",
                     conventional_storage(T)));
  p.push_back(single("fig3c", "storage and retrieval with CD drive, T_write = 250 ns", "cd",
                     gaussian_pair_storage(T, true)));

  {
    Preset fig{"fig4a", "retrieved signal versus storage time t_s", {}};
    for (double ts : {800.0, 1500.0, 3000.0}) {
      ScenarioConfig c = named(gaussian_pair_storage(T, true), "fig4a");
      c.protocol.storage_time = ts;
      fig.variants.push_back({"ts" + std::to_string(static_cast<int>(ts)), c});
    }
    p.push_back(fig);
  }
  {
    Preset fig{"fig4b", "retrieved signal versus optical depth at t_s = 800 ns", {}};
    for (int a : {3, 5, 7}) {
      ScenarioConfig c = named(gaussian_pair_storage(T, true), "fig4b");
      c.medium.optical_depth = a;
      fig.variants.push_back({"alpha" + std::to_string(a), c});
    }
    p.push_back(fig);
  }
  p.push_back(Preset{"fig5a",
                     "square control, broad probe (sigma_p = T/3, 0.28 MHz)",
                     {{"storage", named(square_control(T, 0.28, T / 3.0, Model::storage), "fig5a")},
                      {"populations",
                       named(square_control(T, 0.28, T / 3.0, Model::population), "fig5a")}}});
  p.push_back(Preset{"fig5c",
                     "square control, narrow probe (sigma_p = T/6, 0.4 MHz)",
                     {{"storage", named(square_control(T, 0.4, T / 6.0, Model::storage), "fig5c")},
                      {"populations",
                       named(square_control(T, 0.4, T / 6.0, Model::population), "fig5c")}}});

  p.push_back(single("fig6a", "CD amplitude noise, +-20 %, 30 realisations", "amplitude",
                     with_noise(gaussian_pair_population(T, true), true, false)));
  p.push_back(single("fig6c", "CD phase noise, sigma = 0.1 pi, 30 realisations", "phase",
                     with_noise(gaussian_pair_population(T, true), false, true)));

  p.push_back(Preset{
      "fig7",
      "imperfect blockade (eps = 0.3, U_rr/2pi = 5 MHz), with and without CD",
      {{"population_nocd", named(blockade(gaussian_pair_population(T, false)), "fig7")},
       {"population_cd", named(blockade(gaussian_pair_population(T, true)), "fig7")},
       {"storage_nocd", named(blockade(gaussian_pair_storage(T, false)), "fig7")},
       {"storage_cd", named(blockade(gaussian_pair_storage(T, true)), "fig7")}}});

  p.push_back(Preset{
      "fig8",
      "ideal CD versus two-photon Raman realisation, with and without Stark compensation",
      {{"population_ideal", named(raman(gaussian_pair_population(T, true), false, true), "fig8")},
       {"population_raman", named(raman(gaussian_pair_population(T, true), true, true), "fig8")},
       {"population_raman_uncomp",
        named(raman(gaussian_pair_population(T, true), true, false), "fig8")},
       {"storage_ideal", named(fig8_storage(false, true), "fig8")},
       {"storage_raman", named(fig8_storage(true, true), "fig8")},
       {"storage_raman_uncomp", named(fig8_storage(true, false), "fig8")}}});
  return p;
}

}  // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> p = build();
  return p;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  throw ConfigError("preset", "unknown preset '" + name + "'");
}

}  // namespace rydmem
