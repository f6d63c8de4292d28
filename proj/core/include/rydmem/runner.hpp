#pragma once

// Scenario execution, artifact emission and parameter sweeps.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rydmem/collective.hpp"
#include "rydmem/config.hpp"
#include "rydmem/maxwell_bloch.hpp"
#include "rydmem/noise.hpp"
#include "rydmem/presets.hpp"

namespace rydmem {

struct RunOptions {
  std::filesystem::path out_root = "out";
  std::vector<std::string> overrides;  // "section.key=value", applied last
  int threads = 1;
  std::optional<std::uint64_t> seed;   // replaces noise.base_seed
  bool write_files = true;
  /// Fixed directory stamp instead of the wall-clock time (tests).
  std::optional<std::string> stamp;
};

/// Outcome of one configuration.
struct VariantResult {
  std::string label;
  ScenarioConfig config;
  std::map<std::string, double> metrics;
  std::optional<PopulationTrajectory> population;
  std::optional<StorageResult> storage;
  std::optional<EnsembleResult> ensemble;
  std::vector<std::string> files;  // relative to the run directory
  std::vector<std::string> log;
};

struct RunReport {
  std::string preset;
  std::filesystem::path directory;
  std::vector<VariantResult> variants;
  double wall_seconds = 0.0;
  std::vector<std::string> files;

  const VariantResult& variant(const std::string& label) const;
};

/// Runs the pipeline selected by cfg.model, cfg.levels and the noise flags.
/// The config is validated first.
VariantResult simulate(const ScenarioConfig& cfg, const std::string& label, int threads = 1);

/// Preset variants with overrides applied (base -> variant -> overrides -> seed).
std::vector<PresetVariant> resolve_preset(const std::string& name, const RunOptions& opts);

RunReport run_preset(const std::string& name, const RunOptions& opts);
RunReport run_config(const ScenarioConfig& cfg, const RunOptions& opts);

struct SweepPoint {
  std::string value;
  bool ok = false;
  std::string error;
  std::map<std::string, double> metrics;
};

struct SweepReport {
  std::string preset;
  std::string axis;
  std::filesystem::path directory;
  std::vector<SweepPoint> points;
};

/// One run of the preset's first variant per value, in parallel across
/// values. Failed points are recorded and the sweep continues.
SweepReport run_sweep(const std::string& preset, const std::string& axis,
                      const std::vector<std::string>& values, const RunOptions& opts);
SweepReport run_sweep(const ScenarioConfig& base, const std::string& axis,
                      const std::vector<std::string>& values, const RunOptions& opts);

/// Samples probe, control and CD envelopes (t_ns, omega_p, omega_c, omega_cd).
void export_pulses(const ScenarioConfig& cfg, const std::filesystem::path& path, double dt);

/// Writes the CSVs of one variant into dir/data and returns the relative paths.
std::vector<std::string> write_variant_data(const VariantResult& v, const std::filesystem::path& dir);

std::string make_stamp();

}  // namespace rydmem
