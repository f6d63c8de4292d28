#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rydmem/collective.hpp"
#include "rydmem/presets.hpp"
#include "rydmem/noise.hpp"

using namespace rydmem;

namespace {
ScenarioConfig fig6(const char* name) { return find_preset(name).variants[0].config; }
}  // namespace

TEST_SUITE("noise") {

TEST_CASE("normal and uniform transforms") {
  NoiseStream s(1);
  double sum = 0.0, sq = 0.0, lo = 1.0, hi = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = s.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    const double x = s.normal();
    sum += x;
    sq += x * x;
  }
  CHECK(lo >= 0.0);
  CHECK(hi < 1.0);
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("zero noise leaves the drive untouched") {
  NoiseSpec spec;
  spec.amplitude = spec.phase = true;
  spec.amplitude_bound = 0.0;
  spec.phase_sigma = 0.0;
  std::vector<double> t, cd;
  for (int i = 0; i <= 500; ++i) {
    t.push_back(0.5 * i);
    cd.push_back(std::sin(0.01 * i));
  }
  const std::vector<cplx> out = perturb_cd(t, cd, spec, 99);
  for (std::size_t i = 0; i < cd.size(); ++i) CHECK(out[i] == cplx(cd[i]));
}

TEST_CASE("amplitude noise is one constant factor per realisation") {
  NoiseSpec spec;
  spec.amplitude = true;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const CdPerturbation p(spec, seed, 0.0, 300.0);
    const cplx first = p.apply(0.0, 0.5) / 0.5;
    CHECK(first.imag() == 0.0);
    CHECK(first.real() >= 0.8);
    CHECK(first.real() <= 1.2);
    CHECK(first.real() == 1.0 + p.eta());
    for (double t = 0.0; t <= 300.0; t += 17.0) CHECK(p.apply(t, 0.3) == (1.0 + p.eta()) * 0.3);
  }
}

TEST_CASE("phase nodes have the configured spread") {
  NoiseSpec spec;
  spec.phase = true;
  const CdPerturbation p(spec, 5, 0.0, 20000.0);
  const auto& ph = p.phases();
  REQUIRE(ph.size() >= 10000);
  double m = 0.0;
  for (double x : ph) m += x;
  m /= static_cast<double>(ph.size());
  double v = 0.0;
  for (double x : ph) v += (x - m) * (x - m);
  v /= static_cast<double>(ph.size() - 1);
  const double sigma = 0.1 * std::numbers::pi;
  CHECK(v == doctest::Approx(sigma * sigma).epsilon(0.05));
  // modulus is untouched
  for (double t = 0.0; t < 50.0; t += 0.37) CHECK(std::abs(p.apply(t, 2.0)) == doctest::Approx(2.0));
}

TEST_CASE("phase is continuous and hits the nodes") {
  NoiseSpec spec;
  spec.phase = true;
  spec.correlation_step = 2.0;
  const CdPerturbation p(spec, 8, 10.0, 60.0);
  const auto& ph = p.phases();
  for (std::size_t k = 0; k < ph.size(); ++k) CHECK(p.phase_at(10.0 + 2.0 * k) == doctest::Approx(ph[k]));
  CHECK(p.phase_at(11.0) == doctest::Approx(0.5 * (ph[0] + ph[1])));
  CHECK(p.phase_at(-100.0) == ph.front());
  CHECK(p.phase_at(1e6) == ph.back());
}

TEST_CASE("the phase sequence does not depend on the amplitude flag") {
  NoiseSpec a, b;
  a.phase = b.phase = true;
  b.amplitude = true;
  const CdPerturbation pa(a, 42, 0.0, 100.0), pb(b, 42, 0.0, 100.0);
  CHECK(pa.phases() == pb.phases());
  CHECK(pa.eta() == 0.0);
  CHECK(pb.eta() != 0.0);
}

TEST_CASE("rng algorithm is recorded") {
  CHECK(std::string(kRngAlgorithm) == "mt19937_64+box-muller");
  NoiseSpec spec;
  spec.amplitude = true;
  spec.n_realizations = 2;
  ScenarioConfig c = validate(fig6("fig6a"));
  const EnsembleResult r = run_ensemble(c, spec);
  CHECK(r.rng_algorithm == kRngAlgorithm);
  CHECK(r.records[0].seed == spec.base_seed);
  CHECK(r.records[1].seed == spec.base_seed + 1);
}

TEST_CASE("a single noiseless realisation is the plain run") {
  const ScenarioConfig c = validate(fig6("fig6a"));
  NoiseSpec spec = c.noise;
  spec.amplitude_bound = 0.0;
  spec.n_realizations = 1;
  const EnsembleResult e = run_ensemble(c, spec);
  const PopulationTrajectory tr = run_population3(c);
  REQUIRE(e.t.size() == tr.t.size());
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    CHECK(e.mean_p_r[i] == tr.p_r[i]);
    CHECK(e.mean_p_g[i] == tr.p_g[i]);
  }
}

TEST_CASE("ensembles are bitwise reproducible across thread counts") {
  const ScenarioConfig c = validate(fig6("fig6c"));
  NoiseSpec spec = c.noise;
  spec.n_realizations = 6;
  const EnsembleResult a = run_ensemble(c, spec, 1);
  const EnsembleResult b = run_ensemble(c, spec, 3);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].final_p_r == b.records[i].final_p_r);
    CHECK(a.records[i].seed == b.records[i].seed);
  }
  CHECK(a.mean_p_r == b.mean_p_r);
}

TEST_CASE("the ensemble mean is recomputable from the realisations") {
  const ScenarioConfig c = validate(fig6("fig6a"));
  NoiseSpec spec = c.noise;
  spec.n_realizations = 5;
  const EnsembleResult e = run_ensemble(c, spec);
  REQUIRE(e.p_r.size() == 5);
  for (std::size_t k = 0; k < e.t.size(); k += 97) {
    double s = 0.0;
    for (const auto& tr : e.p_r) s += tr[k];
    CHECK(e.mean_p_r[k] == doctest::Approx(s / 5).epsilon(1e-14));
  }
  double s = 0.0;
  for (const auto& r : e.records) s += r.final_p_r;
  CHECK(e.mean_final_p_r() == doctest::Approx(s / 5).epsilon(1e-14));
}

TEST_CASE("more realisations move the mean by less than its error") {
  const ScenarioConfig c = validate(fig6("fig6a"));
  NoiseSpec spec = c.noise;
  const EnsembleResult a = run_ensemble(c, spec);
  spec.n_realizations *= 2;
  const EnsembleResult b = run_ensemble(c, spec);
  CHECK(std::abs(a.mean_final_p_r() - b.mean_final_p_r()) < a.stderr_final_p_r());
}

TEST_CASE("noisy CD still transfers") {
  for (const char* name : {"fig6a", "fig6c"}) {
    const ScenarioConfig c = validate(fig6(name));
    const EnsembleResult e = run_ensemble(c, c.noise);
    CAPTURE(name);
    CHECK(e.mean_final_p_r() == doctest::Approx(0.99).epsilon(0.01));
    CHECK(e.invariants.min_eigenvalue > -1e-8);
  }
}

TEST_CASE("n_realizations below one is rejected") {
  const ScenarioConfig c = validate(fig6("fig6a"));
  NoiseSpec spec = c.noise;
  spec.n_realizations = 0;
  CHECK_THROWS(run_ensemble(c, spec));
}

}  // TEST_SUITE
