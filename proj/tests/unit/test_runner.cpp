#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "rydmem/csv.hpp"
#include "rydmem/errors.hpp"
#include "rydmem/runner.hpp"

using namespace rydmem;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("rydmem_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

RunOptions quiet(const fs::path& out) {
  RunOptions o;
  o.out_root = out;
  o.stamp = "fixed";
  return o;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("csv tables enforce their schema") {
  CsvTable t(CsvSchema::numeric("demo", {"a", "b"}));
  t.add_row({1.0, 2.5});
  CHECK_NOTHROW(t.validate());
  CHECK(t.to_string() == "a,b\n1,2.5\n");
  CsvTable short_row(CsvSchema::numeric("demo", {"a", "b"}));
  short_row.add_row({1.0});
  CHECK_THROWS(short_row.validate());

  CsvTable nan(CsvSchema::numeric("demo", {"a"}));
  nan.add_row({std::numeric_limits<double>::quiet_NaN()});
  CHECK_THROWS(nan.validate());

  CsvSchema s{"mixed", {{"label", false, false}, {"x", true, true}}};
  CsvTable m(s);
  m.add_row_text({"p", "nan"});
  CHECK_NOTHROW(m.validate());
  m.add_row_text({"q", "abc"});
  CHECK_THROWS(m.validate());
}

TEST_CASE("csv writes are atomic and read back") {
  TempDir tmp("csv");
  CsvTable t(CsvSchema::numeric("demo", {"x", "y"}));
  t.add_row({0.1, 1.0 / 3.0});
  t.write(tmp.path / "sub" / "t.csv");
  const CsvData d = read_csv(tmp.path / "sub" / "t.csv");
  CHECK(d.header == std::vector<std::string>{"x", "y"});
  CHECK(d.column("y")[0] == 1.0 / 3.0);
  for (const auto& e : fs::directory_iterator(tmp.path / "sub")) CHECK(e.path().filename() == "t.csv");

  CsvTable bad(CsvSchema::numeric("demo", {"x"}));
  bad.add_row({std::numeric_limits<double>::infinity()});
  CHECK_THROWS(bad.write(tmp.path / "bad.csv"));
  CHECK_FALSE(fs::exists(tmp.path / "bad.csv"));
}

TEST_CASE("a preset run writes its full artifact set") {
  TempDir tmp("run");
  const RunReport rep = run_preset("fig2f", quiet(tmp.path));
  const fs::path dir = tmp.path / "fig2f" / "fixed";
  CHECK(rep.directory == dir);
  for (const char* f : {"manifest/manifest.json", "manifest/cd.ini", "plots/plot.py", "run.log",
                        "data/cd_pulses.csv", "data/cd_trajectory.csv"})
    CHECK_MESSAGE(fs::exists(dir / f), f);

  const auto m = nlohmann::json::parse(slurp(dir / "manifest" / "manifest.json"));
  CHECK(m["preset"] == "fig2f");
  CHECK(m["rng_algorithm"] == kRngAlgorithm);
  CHECK(m["variants"].size() == 1);
  CHECK(m["variants"][0]["metrics"]["final_P_R"].get<double>() > 0.98);

  const CsvData traj = read_csv(dir / "data" / "cd_trajectory.csv");
  CHECK(traj.column("P_R").back() == rep.variant("cd").metrics.at("final_P_R"));

  // same stamp again goes to a fresh directory
  const RunReport again = run_preset("fig2f", quiet(tmp.path));
  CHECK(again.directory == tmp.path / "fig2f" / "fixed-2");
}

TEST_CASE("rerunning the recorded config reproduces the data") {
  TempDir tmp("rerun");
  RunOptions o = quiet(tmp.path);
  o.overrides = {"grid.n_z=20", "protocol.storage_time_ns=300"};
  const RunReport a = run_preset("fig3c", o);
  const ScenarioConfig snap = load_config(a.directory / "manifest" / "cd.ini");
  const RunReport b = run_config(snap, quiet(tmp.path / "again"));
  REQUIRE(a.variants.size() == 1);
  const auto& fa = a.variants[0].files;
  const auto& fb = b.variants[0].files;
  REQUIRE(fa.size() == fb.size());
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CAPTURE(fa[i]);
    CHECK(slurp(a.directory / fa[i]) == slurp(b.directory / fb[i]));
  }
  CHECK(a.variants[0].metrics == b.variants[0].metrics);
}

TEST_CASE("overrides and seeds reach the variants") {
  RunOptions o;
  o.overrides = {"grid.n_z=12"};
  o.seed = 7;
  for (const auto& v : resolve_preset("fig4a", o)) {
    CHECK(v.config.grid.n_z == 12);
    CHECK(v.config.noise.base_seed == 7u);
  }
  o.overrides = {"grid.bogus=1"};
  CHECK_THROWS_AS(resolve_preset("fig4a", o), ConfigError);
  CHECK_THROWS_AS(run_preset("no_such_preset", o), ConfigError);
}

TEST_CASE("a one-point sweep equals the plain run") {
  RunOptions o;
  o.write_files = false;
  o.overrides = {"grid.n_z=20"};
  const SweepReport s = run_sweep("fig3c", "protocol.storage_time_ns", {"800"}, o);
  REQUIRE(s.points.size() == 1);
  REQUIRE(s.points[0].ok);
  const RunReport r = run_preset("fig3c", o);
  CHECK(s.points[0].metrics.at("efficiency") == r.variants[0].metrics.at("efficiency"));
}

TEST_CASE("sweeps record failures and keep going") {
  TempDir tmp("sweep");
  RunOptions o = quiet(tmp.path);
  o.overrides = {"grid.n_z=20"};
  o.threads = 2;
  const SweepReport s = run_sweep("fig3c", "protocol.storage_time_ns", {"400", "-5", "1600"}, o);
  REQUIRE(s.points.size() == 3);
  CHECK(s.points[0].ok);
  CHECK_FALSE(s.points[1].ok);
  CHECK(s.points[1].error.find("storage_time") != std::string::npos);
  CHECK(s.points[2].ok);
  CHECK(s.points[2].metrics.at("efficiency") < s.points[0].metrics.at("efficiency"));

  const CsvData d = read_csv(s.directory / "data" / "sweep_protocol_storage_time_ns.csv");
  REQUIRE(d.rows.size() == 3);
  CHECK(d.rows[1][1] == "failed");
  CHECK(fs::exists(s.directory / "manifest" / "manifest.json"));
  CHECK_THROWS_AS(run_sweep("fig3c", "grid.nope", {"1"}, o), ConfigError);
}

TEST_CASE("pulse export") {
  TempDir tmp("pulses");
  const ScenarioConfig c = validate(find_preset("fig2e").variants[0].config);
  export_pulses(c, tmp.path / "p.csv", 1.0);
  const CsvData d = read_csv(tmp.path / "p.csv");
  CHECK(d.header.size() == 4);
  const auto t = d.column("t_ns");
  CHECK(t.front() == c.protocol.t_start);
  CHECK(t[1] - t[0] == doctest::Approx(1.0));
}

#ifdef RYDMEM_CLI_PATH
namespace {
int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + RYDMEM_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
}  // namespace

TEST_CASE("command line exit codes") {
  TempDir tmp("cli");
  CHECK(cli("list-presets") == 0);
  CHECK(cli("validate fig3c") == 0);
  CHECK(cli("run no_such_preset --out " + tmp.path.string()) == 2);
  CHECK(cli("run fig2f --set grid.n_z=abc --out " + tmp.path.string()) == 2);
  CHECK(cli("run fig2f --set atoms.atom_number=0 --out " + tmp.path.string()) == 2);
  {
    std::ofstream f(tmp.path / "plainfile");
    f << "x";
  }
  CHECK(cli("run fig2f --out " + (tmp.path / "plainfile" / "sub").string()) == 4);
  CHECK(cli("run fig2f --out " + tmp.path.string()) == 0);
  CHECK(fs::exists(tmp.path / "fig2f"));
  CHECK(cli("frobnicate") == 2);
}
#endif

}  // TEST_SUITE
