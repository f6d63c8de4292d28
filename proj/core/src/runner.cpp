#include "rydmem/runner.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "rydmem/csv.hpp"
#include "rydmem/errors.hpp"
#include "rydmem/multiexcitation.hpp"
#include "rydmem/parallel.hpp"

namespace rydmem {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void add_invariants(std::map<std::string, double>& m, const InvariantSummary& s) {
  m["invariant_max_trace_error"] = s.max_trace_error;
  m["invariant_max_hermiticity_error"] = s.max_hermiticity_error;
  m["invariant_min_eigenvalue"] = s.min_eigenvalue;
  m["invariant_steps"] = static_cast<double>(s.steps);
}

double value_at(const std::vector<double>& t, const std::vector<double>& y, double when) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i] >= when - 1e-9) return y[i];
  return y.empty() ? kNaN : y.back();
}

std::string fmt(double v) { return format_number(v); }

}  // namespace

const VariantResult& RunReport::variant(const std::string& label) const {
  for (const auto& v : variants)
    if (v.label == label) return v;
  throw std::out_of_range("no variant '" + label + "'");
}

VariantResult simulate(const ScenarioConfig& raw, const std::string& label, int threads) {
  VariantResult v;
  v.label = label;
  v.config = validate(raw);
  const ScenarioConfig& cfg = v.config;
  auto& m = v.metrics;

  if (cfg.noise.active()) {
    EnsembleResult e = run_ensemble(cfg, cfg.noise, threads);
    m["mean_final_P_R"] = e.mean_final_p_r();
    m["stderr_final_P_R"] = e.stderr_final_p_r();
    m["mean_final_rydberg"] = e.mean_final_rydberg();
    m["n_realizations"] = static_cast<double>(e.records.size());
    double min_f = std::numeric_limits<double>::infinity();
    for (const auto& r : e.records)
      if (!std::isnan(r.min_fidelity)) min_f = std::min(min_f, r.min_fidelity);
    m["min_fidelity_over_realizations"] = std::isfinite(min_f) ? min_f : kNaN;
    add_invariants(m, e.invariants);
    std::ostringstream seeds;
    seeds << "rng " << e.rng_algorithm << ", seeds " << cfg.noise.base_seed << ".."
          << cfg.noise.base_seed + static_cast<std::uint64_t>(e.records.size()) - 1;
    v.log.push_back(seeds.str());
    v.ensemble = std::move(e);
    return v;
  }

  if (cfg.model == Model::population) {
    PopulationTrajectory tr = cfg.levels == 6 ? run_population6(cfg) : run_population3(cfg);
    m["final_P_G"] = tr.p_g.back();
    m["final_P_E"] = tr.p_e.back();
    m["final_P_R"] = tr.p_r.back();
    m["min_fidelity"] = tr.min_fidelity();
    m["degenerate_cd_samples"] = static_cast<double>(tr.degenerate_cd_samples);
    if (cfg.levels == 6) {
      m["final_P_EE"] = tr.p_ee.back();
      m["final_P_RE"] = tr.p_re.back();
      m["final_P_RR"] = tr.p_rr.back();
      m["final_rydberg"] = tr.final_rydberg();
    }
    add_invariants(m, tr.invariants);
    if (tr.degenerate_cd_samples > 0)
      v.log.push_back("warning: CD drive evaluated where both fields vanish (" +
                      std::to_string(tr.degenerate_cd_samples) + " samples); set to 0");
    v.population = std::move(tr);
    return v;
  }

  StorageOptions opts;
  opts.threads = threads;
  StorageResult r = cfg.levels == 6 ? run_storage6(cfg, opts) : run_storage_retrieval(cfg, opts);
  m["efficiency"] = r.efficiency;
  m["leak_fraction"] = r.input_energy > 0.0 ? r.leak_energy / r.input_energy : kNaN;
  m["input_energy"] = r.input_energy;
  m["max_excess_output"] = r.max_excess_output;
  m["readout_start_ns"] = r.readout_start;
  m["P_R_at_write_end"] = value_at(r.t, r.p_r, cfg.protocol.write_time);
  m["P_E_at_write_end"] = value_at(r.t, r.p_e, cfg.protocol.write_time);
  m["final_P_G"] = r.p_g.back();
  m["final_P_E"] = r.p_e.back();
  m["final_P_R"] = r.p_r.back();
  if (cfg.levels == 6) {
    m["P_RE_at_write_end"] = value_at(r.t, r.p_re, cfg.protocol.write_time);
    m["P_RR_at_write_end"] = value_at(r.t, r.p_rr, cfg.protocol.write_time);
    m["final_P_RE"] = r.p_re.back();
    m["final_P_RR"] = r.p_rr.back();
  }
  m["degenerate_cd_samples"] = static_cast<double>(r.degenerate_cd_samples);
  add_invariants(m, r.invariants);
  if (r.degenerate_cd_samples > 0)
    v.log.push_back("warning: CD drive evaluated where both fields vanish (" +
                    std::to_string(r.degenerate_cd_samples) + " samples); set to 0");
  if (r.dsp_matter_convention)
    v.log.push_back("note: DSP evaluated with both fields zero; matter-only convention used");
  v.storage = std::move(r);
  return v;
}

void export_pulses(const ScenarioConfig& cfg, const fs::path& path, double dt) {
  const PulseSet ps = cfg.pulse_set();
  CsvTable table(schemas::pulses());
  const TimeGrid g = TimeGrid::uniform(cfg.protocol.t_start, cfg.end_time(), dt);
  for (double t : g.points())
    table.add_row({t, ps.probe_at(t), ps.control_at(t), cd_rabi(ps, cfg.atoms.atom_number, t)});
  table.write(path);
}

std::vector<std::string> write_variant_data(const VariantResult& v, const fs::path& dir) {
  std::vector<std::string> files;
  const fs::path data = dir / "data";
  auto emit = [&](const CsvTable& t, const std::string& name) {
    t.write(data / name);
    files.push_back("data/" + name);
  };
  const ScenarioConfig& cfg = v.config;
  {
    const std::string name = v.label + "_pulses.csv";
    export_pulses(cfg, data / name, 0.5);
    files.push_back("data/" + name);
  }
  if (v.population) {
    const auto& tr = *v.population;
    const bool six = !tr.p_re.empty();
    CsvTable t(six ? schemas::trajectory6() : schemas::trajectory3());
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      if (six)
        t.add_row({tr.t[i], tr.p_g[i], tr.p_e[i], tr.p_r[i], tr.fidelity[i], tr.p_re[i], tr.p_rr[i],
                   tr.p_ee[i]});
      else
        t.add_row({tr.t[i], tr.p_g[i], tr.p_e[i], tr.p_r[i], tr.fidelity[i]});
    }
    emit(t, v.label + "_trajectory.csv");
  }
  if (v.storage) {
    const auto& r = *v.storage;
    CsvTable out(schemas::storage_output());
    for (std::size_t i = 0; i < r.t.size(); ++i)
      out.add_row({r.t[i], r.omega_in[i].real(), r.omega_in[i].imag(), r.omega_out[i].real(),
                   r.omega_out[i].imag()});
    emit(out, v.label + "_output.csv");
    const bool six = !r.p_re.empty();
    CsvTable pop(six ? schemas::storage_populations6() : schemas::storage_populations3());
    for (std::size_t i = 0; i < r.t.size(); ++i) {
      if (six)
        pop.add_row({r.t[i], r.p_g[i], r.p_e[i], r.p_r[i], r.omega_c[i], r.omega_cd[i], r.p_re[i],
                     r.p_rr[i], r.p_ee[i]});
      else
        pop.add_row({r.t[i], r.p_g[i], r.p_e[i], r.p_r[i], r.omega_c[i], r.omega_cd[i]});
    }
    emit(pop, v.label + "_populations.csv");
    CsvTable dsp(schemas::dsp_trace());
    for (std::size_t i = 0; i < r.t.size(); ++i)
      dsp.add_row({r.t[i], r.dsp_abs2[i], r.dsp_photonic_abs[i], r.dsp_matter_abs[i]});
    emit(dsp, v.label + "_dsp.csv");
    for (const auto& s : r.snapshots) {
      CsvTable snap(schemas::snapshot());
      for (std::size_t j = 0; j < s.z.size(); ++j)
        snap.add_row({s.z[j], s.p_r[j], s.abs_rho_rg[j], s.abs_omega_p[j]});
      std::ostringstream name;
      name << v.label << "_snapshot_t" << std::llround(s.t) << "ns.csv";
      emit(snap, name.str());
    }
  }
  if (v.ensemble) {
    const auto& e = *v.ensemble;
    CsvTable rec(schemas::ensemble_records());
    for (const auto& r : e.records)
      rec.add_row({static_cast<double>(r.index), static_cast<double>(r.seed), r.eta, r.final_p_g,
                   r.final_p_e, r.final_p_r, r.final_rydberg, r.min_fidelity, r.efficiency});
    emit(rec, v.label + "_ensemble_records.csv");
    CsvTable mean(schemas::ensemble_mean());
    for (std::size_t i = 0; i < e.t.size(); ++i)
      mean.add_row({e.t[i], e.mean_p_g[i], e.mean_p_e[i], e.mean_p_r[i], e.mean_fidelity[i]});
    emit(mean, v.label + "_ensemble_mean.csv");
  }
  return files;
}

std::string make_stamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

namespace {

fs::path unique_dir(const fs::path& root, const std::string& preset, const std::string& stamp) {
  fs::path dir = root / preset / stamp;
  for (int k = 2; fs::exists(dir); ++k) dir = root / preset / (stamp + "-" + std::to_string(k));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::error_code ec;
  fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

json config_json(const ScenarioConfig& cfg) {
  json j = json::object();
  for (const auto& k : param_keys()) j[k] = get_param(cfg, k);
  return j;
}

json derived_json(const ScenarioConfig& cfg) {
  return {{"k_eff_rad_per_m", cfg.derived.k_eff},
          {"k_eff_aux_rad_per_m", cfg.derived.k_eff_aux},
          {"delta_k_rad_per_m", cfg.derived.delta_k},
          {"k_sum_rad_per_m", cfg.derived.k_sum},
          {"thermal_velocity_m_per_s", cfg.derived.thermal_velocity},
          {"dephasing_kv_rad_per_ns", cfg.derived.dephasing_kv}};
}

std::string plot_script(const RunReport& rep) {
  std::ostringstream py;
  py << "#!/usr/bin/env python3\n"
     << "# Regenerates the panels of run '" << rep.preset << "' from ../data.\n"
     << "import os\n"
     << "import numpy as np\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "HERE = os.path.dirname(os.path.abspath(__file__))\n"
     << "DATA = os.path.join(HERE, '..', 'data')\n\n"
     << "def load(name):\n"
     << "    return np.genfromtxt(os.path.join(DATA, name), delimiter=',', names=True)\n\n"
     << "PANELS = [\n";
  for (const auto& v : rep.variants) {
    const char* kind = v.population ? "population" : v.storage ? "storage" : "ensemble";
    py << "    ('" << v.label << "', '" << kind << "'),\n";
  }
  py << "]\n\n"
     << "fig, axes = plt.subplots(len(PANELS), 2, figsize=(10, 3.2 * len(PANELS)), squeeze=False)\n"
     << "for row, (label, kind) in enumerate(PANELS):\n"
     << "    ax_p, ax_d = axes[row]\n"
     << "    p = load(label + '_pulses.csv')\n"
     << "    scale = 2e-3 * np.pi  # rad/ns per MHz\n"
     << "    ax_p.plot(p['t_ns'], p['omega_p'] / scale, label='probe')\n"
     << "    ax_p.plot(p['t_ns'], p['omega_c'] / scale, label='control')\n"
     << "    ax_p.plot(p['t_ns'], p['omega_cd'] / scale, label='CD')\n"
     << "    ax_p.set_ylabel('Rabi / 2pi [MHz]')\n"
     << "    ax_p.set_title(label)\n"
     << "    ax_p.legend(fontsize=8)\n"
     << "    if kind == 'population':\n"
     << "        d = load(label + '_trajectory.csv')\n"
     << "        for col in ('P_G', 'P_E', 'P_R'):\n"
     << "            ax_d.plot(d['t_ns'], d[col], label=col)\n"
     << "        if 'P_RE' in d.dtype.names:\n"
     << "            ax_d.plot(d['t_ns'], d['P_R'] + d['P_RE'], label='P_R+P_RE')\n"
     << "            ax_d.plot(d['t_ns'], d['P_RR'], label='P_RR')\n"
     << "        ax_d.plot(d['t_ns'], d['fidelity_dark'], 'k--', label='dark-state fidelity')\n"
     << "        ax_d.set_ylabel('population')\n"
     << "    elif kind == 'storage':\n"
     << "        d = load(label + '_output.csv')\n"
     << "        ax_d.plot(d['t_ns'], d['omega_in_re']**2 + d['omega_in_im']**2, label='|input|^2')\n"
     << "        ax_d.plot(d['t_ns'], d['omega_out_re']**2 + d['omega_out_im']**2, label='|output|^2')\n"
     << "        ax_d.set_ylabel('intensity [(rad/ns)^2]')\n"
     << "    else:\n"
     << "        d = load(label + '_ensemble_mean.csv')\n"
     << "        for col in ('P_G', 'P_E', 'P_R'):\n"
     << "            ax_d.plot(d['t_ns'], d[col], label='mean ' + col)\n"
     << "        ax_d.set_ylabel('population')\n"
     << "    ax_d.set_xlabel('t [ns]')\n"
     << "    ax_d.legend(fontsize=8)\n"
     << "fig.tight_layout()\n"
     << "fig.savefig(os.path.join(HERE, '" << rep.preset << ".png'), dpi=150)\n";
  return py.str();
}

void write_report(RunReport& rep, const RunOptions& opts) {
  std::ostringstream log;
  for (const auto& v : rep.variants) {
    for (const auto& f : v.files) rep.files.push_back(f);
    for (const auto& line : v.log) log << v.label << ": " << line << '\n';
    std::ostringstream ini;
    write_config(ini, v.config);
    const std::string cfg_name = "manifest/" + v.label + ".ini";
    write_text(rep.directory / cfg_name, ini.str());
    rep.files.push_back(cfg_name);
  }
  write_text(rep.directory / "plots" / "plot.py", plot_script(rep));
  rep.files.push_back("plots/plot.py");

  json m;
  m["preset"] = rep.preset;
  m["version"] = "0.1.0";
  m["overrides"] = opts.overrides;
  m["threads"] = opts.threads;
  m["rng_algorithm"] = kRngAlgorithm;
  m["wall_seconds"] = rep.wall_seconds;
  json vars = json::array();
  for (const auto& v : rep.variants) {
    json jv;
    jv["label"] = v.label;
    jv["config"] = config_json(v.config);
    jv["derived"] = derived_json(v.config);
    jv["metrics"] = v.metrics;
    jv["files"] = v.files;
    jv["log"] = v.log;
    if (v.ensemble) {
      json seeds = json::array();
      for (const auto& r : v.ensemble->records) seeds.push_back(r.seed);
      jv["seeds"] = seeds;
    }
    vars.push_back(jv);
  }
  m["variants"] = vars;
  rep.files.push_back("manifest/manifest.json");
  rep.files.push_back("run.log");
  m["artifacts"] = rep.files;
  write_text(rep.directory / "manifest" / "manifest.json", m.dump(2) + "\n");

  std::ostringstream head;
  head << "preset " << rep.preset << '\n'
       << "rng " << kRngAlgorithm << '\n'
       << "threads " << opts.threads << '\n';
  for (const auto& o : opts.overrides) head << "override " << o << '\n';
  for (const auto& v : rep.variants) {
    head << "variant " << v.label << ':';
    for (const auto& [k, x] : v.metrics) head << ' ' << k << '=' << fmt(x);
    head << '\n';
  }
  head << "wall_seconds " << fmt(rep.wall_seconds) << '\n';
  write_text(rep.directory / "run.log", head.str() + log.str());
}

RunReport execute(const std::string& name, std::vector<PresetVariant> variants,
                  const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.preset = name;
  // validate everything before any output is produced
  for (auto& v : variants) v.config = validate(v.config);
  for (const auto& v : variants) rep.variants.push_back(simulate(v.config, v.label, opts.threads));
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (opts.write_files) {
    rep.directory = unique_dir(opts.out_root, name, opts.stamp.value_or(make_stamp()));
    for (auto& v : rep.variants) v.files = write_variant_data(v, rep.directory);
    write_report(rep, opts);
  }
  return rep;
}

void apply_run_options(ScenarioConfig& cfg, const RunOptions& opts) {
  apply_overrides(cfg, opts.overrides);
  if (opts.seed) cfg.noise.base_seed = *opts.seed;
}

}  // namespace

std::vector<PresetVariant> resolve_preset(const std::string& name, const RunOptions& opts) {
  std::vector<PresetVariant> vs = find_preset(name).variants;
  for (auto& v : vs) apply_run_options(v.config, opts);
  return vs;
}

RunReport run_preset(const std::string& name, const RunOptions& opts) {
  return execute(name, resolve_preset(name, opts), opts);
}

RunReport run_config(const ScenarioConfig& base, const RunOptions& opts) {
  ScenarioConfig cfg = base;
  apply_run_options(cfg, opts);
  return execute(cfg.name, {{cfg.name, cfg}}, opts);
}

SweepReport run_sweep(const ScenarioConfig& base0, const std::string& axis,
                      const std::vector<std::string>& values, const RunOptions& opts) {
  ScenarioConfig base = base0;
  apply_run_options(base, opts);
  get_param(base, axis);  // unknown axis -> ConfigError before any work

  SweepReport rep;
  rep.preset = base.name;
  rep.axis = axis;
  rep.points.resize(values.size());
  parallel_for(static_cast<int>(values.size()), opts.threads, [&](int i) {
    SweepPoint& p = rep.points[i];
    p.value = values[i];
    try {
      ScenarioConfig c = base;
      set_param(c, axis, values[i]);
      VariantResult v = simulate(c, base.name, 1);
      p.metrics = v.metrics;
      p.ok = true;
    } catch (const std::exception& e) {
      p.ok = false;
      p.error = e.what();
    }
  });

  if (opts.write_files) {
    rep.directory = unique_dir(opts.out_root, base.name, opts.stamp.value_or(make_stamp()) + "-sweep");
    CsvTable t(schemas::sweep());
    auto get = [](const SweepPoint& p, const char* k) {
      auto it = p.metrics.find(k);
      return it == p.metrics.end() ? kNaN : it->second;
    };
    for (const auto& p : rep.points) {
      const double fid = std::isnan(get(p, "min_fidelity")) ? get(p, "min_fidelity_over_realizations")
                                                              : get(p, "min_fidelity");
      const double pr = std::isnan(get(p, "final_P_R")) ? get(p, "mean_final_P_R") : get(p, "final_P_R");
      t.add_row_text({p.value, p.ok ? "ok" : "failed", fmt(get(p, "efficiency")),
                      fmt(get(p, "final_P_G")), fmt(get(p, "final_P_E")), fmt(pr),
                      fmt(get(p, "final_P_RE")), fmt(get(p, "final_P_RR")), fmt(fid)});
    }
    std::string safe = axis;
    for (char& ch : safe)
      if (ch == '.') ch = '_';
    t.write(rep.directory / "data" / ("sweep_" + safe + ".csv"));

    json m;
    m["preset"] = base.name;
    m["axis"] = axis;
    m["values"] = values;
    m["rng_algorithm"] = kRngAlgorithm;
    m["config"] = config_json(base);
    json pts = json::array();
    for (const auto& p : rep.points)
      pts.push_back({{"value", p.value}, {"ok", p.ok}, {"error", p.error}, {"metrics", p.metrics}});
    m["points"] = pts;
    write_text(rep.directory / "manifest" / "manifest.json", m.dump(2) + "\n");
    std::ostringstream log;
    log << "sweep " << axis << " over " << values.size() << " values\n";
    for (const auto& p : rep.points)
      log << p.value << ": " << (p.ok ? "ok" : "failed: " + p.error) << '\n';
    write_text(rep.directory / "run.log", log.str());
  }
  return rep;
}

SweepReport run_sweep(const std::string& preset, const std::string& axis,
                      const std::vector<std::string>& values, const RunOptions& opts) {
  const Preset& p = find_preset(preset);
  ScenarioConfig base = p.variants.front().config;
  base.name = p.name;
  return run_sweep(base, axis, values, opts);
}

}  // namespace rydmem
