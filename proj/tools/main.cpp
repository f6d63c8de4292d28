// rydmem: command-line front end for presets, config files and sweeps.

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rydmem/csv.hpp"
#include "rydmem/errors.hpp"
#include "rydmem/runner.hpp"

namespace {

using namespace rydmem;
using json = nlohmann::json;

enum Exit { ok = 0, config_error = 2, invariant_breach = 3, io_error = 4 };

std::mutex console;

void report(const json& record) {
  std::lock_guard lk(console);
  std::cerr << record.dump() << '\n';
}

struct Common {
  std::string target;  // preset name
  std::string config;
  std::vector<std::string> sets;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_common(CLI::App* cmd, Common& c, bool positional = true) {
  if (positional) cmd->add_option("preset", c.target, "preset name (see list-presets)");
  cmd->add_option("--config", c.config, "scenario config file (INI)");
  cmd->add_option("--set", c.sets, "override, section.key=value (repeatable)");
  cmd->add_option("--out", c.out, "output root directory");
  cmd->add_option("--seed", c.seed, "base seed for noise ensembles");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

RunOptions options(const Common& c) {
  RunOptions o;
  o.out_root = c.out;
  o.overrides = c.sets;
  o.threads = c.threads;
  o.seed = c.seed;
  return o;
}

// Single config described by either a preset's first variant or a file.
ScenarioConfig base_of(const Common& c) {
  if (!c.config.empty()) {
    ScenarioConfig cfg = load_config(c.config);
    apply_overrides(cfg, c.sets);
    if (c.seed) cfg.noise.base_seed = *c.seed;
    return cfg;
  }
  if (c.target.empty()) throw ConfigError("preset", "give a preset name or --config");
  return resolve_preset(c.target, options(c)).front().config;
}

void print_report(const RunReport& r) {
  std::lock_guard lk(console);
  std::cout << "preset " << r.preset << " -> " << r.directory.string() << '\n';
  for (const auto& v : r.variants) {
    std::cout << "  " << v.label;
    for (const auto& [k, x] : v.metrics)
      if (k.rfind("invariant_", 0) != 0) std::cout << ' ' << k << '=' << format_number(x);
    std::cout << '\n';
  }
}

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rydberg-EIT storage simulator with counterdiabatic driving"};
  app.require_subcommand(1);

  Common run_c, sweep_c, val_c, exp_c;
  auto* run = app.add_subcommand("run", "run a preset or config file");
  add_common(run, run_c);

  auto* sweep = app.add_subcommand("sweep", "one run per value of a parameter");
  add_common(sweep, sweep_c);
  std::string axis, values;
  sweep->add_option("--axis", axis, "parameter path, e.g. protocol.storage_time_ns")->required();
  sweep->add_option("--values", values, "comma-separated values")->required();

  auto* list = app.add_subcommand("list-presets", "list built-in presets");
  auto* val = app.add_subcommand("validate", "validate a preset or config file");
  add_common(val, val_c);
  auto* exp = app.add_subcommand("export-pulses", "write probe, control and CD envelopes to CSV");
  add_common(exp, exp_c);
  double exp_dt = 0.5;
  std::string exp_file = "pulses.csv";
  exp->add_option("--dt", exp_dt, "sample spacing [ns]")->check(CLI::PositiveNumber);
  exp->add_option("--file", exp_file, "output CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    report({{"error", "usage"}, {"message", e.what()}});
    return config_error;
  }

  try {
    if (*list) {
      for (const auto& p : presets()) {
        std::cout << p.name << "  " << p.description << "  [";
        for (std::size_t i = 0; i < p.variants.size(); ++i)
          std::cout << (i ? ", " : "") << p.variants[i].label;
        std::cout << "]\n";
      }
    } else if (*run) {
      const RunOptions o = options(run_c);
      RunReport r;
      if (!run_c.config.empty()) {
        ScenarioConfig cfg = load_config(run_c.config);
        r = run_config(cfg, o);
      } else {
        if (run_c.target.empty()) throw ConfigError("preset", "give a preset name or --config");
        r = run_preset(run_c.target, o);
      }
      print_report(r);
    } else if (*sweep) {
      RunOptions o = options(sweep_c);
      SweepReport r;
      const auto vals = split_values(values);
      if (!sweep_c.config.empty())
        r = run_sweep(load_config(sweep_c.config), axis, vals, o);
      else
        r = run_sweep(sweep_c.target, axis, vals, o);
      std::cout << "sweep " << r.axis << " -> " << r.directory.string() << '\n';
      for (const auto& p : r.points) {
        std::cout << "  " << p.value << (p.ok ? " ok" : " failed");
        if (!p.ok) {
          report({{"error", "sweep_point"}, {"value", p.value}, {"message", p.error}});
        }
        for (const char* k : {"efficiency", "final_P_R", "mean_final_P_R", "final_P_RR"}) {
          auto it = p.metrics.find(k);
          if (it != p.metrics.end()) std::cout << ' ' << k << '=' << format_number(it->second);
        }
        std::cout << '\n';
      }
    } else if (*val) {
      if (!val_c.config.empty()) {
        ScenarioConfig cfg = validate(base_of(val_c));
        std::cout << cfg.name << ": ok\n";
      } else {
        if (val_c.target.empty()) throw ConfigError("preset", "give a preset name or --config");
        for (const auto& v : resolve_preset(val_c.target, options(val_c))) {
          validate(v.config);
          std::cout << val_c.target << '/' << v.label << ": ok\n";
        }
      }
    } else if (*exp) {
      ScenarioConfig cfg = validate(base_of(exp_c));
      export_pulses(cfg, exp_file, exp_dt);
      std::cout << exp_file << '\n';
    }
  } catch (const ConfigError& e) {
    report({{"error", "config"}, {"field", e.field()}, {"message", e.what()}});
    return config_error;
  } catch (const InvariantError& e) {
    report({{"error", "invariant"},
            {"message", e.what()},
            {"step", e.step()},
            {"t_ns", e.time_ns()},
            {"z_um", e.z_um()}});
    return invariant_breach;
  } catch (const IoError& e) {
    report({{"error", "io"}, {"message", e.what()}});
    return io_error;
  } catch (const std::filesystem::filesystem_error& e) {
    report({{"error", "io"}, {"message", e.what()}});
    return io_error;
  } catch (const std::exception& e) {
    report({{"error", "internal"}, {"message", e.what()}});
    return 1;
  }
  return ok;
}
