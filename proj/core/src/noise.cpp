#include "rydmem/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "rydmem/errors.hpp"
#include "rydmem/multiexcitation.hpp"
#include "rydmem/parallel.hpp"

namespace rydmem {

double NoiseStream::normal() {
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CdPerturbation::CdPerturbation(const NoiseSpec& spec, std::uint64_t seed, double t0, double t1)
    : amplitude_(spec.amplitude), phase_(spec.phase), t0_(t0), step_(spec.correlation_step) {
  NoiseStream rng(seed);
  // eta is always drawn first so the phase sequence does not depend on the mode flags
  const double u = rng.uniform();
  eta_ = amplitude_ ? spec.amplitude_bound * (2.0 * u - 1.0) : 0.0;
  if (phase_) {
    const auto count = static_cast<std::size_t>(std::ceil((t1 - t0) / step_)) + 1;
    phases_.resize(count);
    for (auto& p : phases_) p = spec.phase_sigma * rng.normal();
  }
}

double CdPerturbation::phase_at(double t) const {
  if (phases_.empty()) return 0.0;
  // linear between nodes: a jump inside an integration step would cost RK4 its order
  const double x = std::clamp((t - t0_) / step_, 0.0, static_cast<double>(phases_.size() - 1));
  const auto k = std::min(static_cast<std::size_t>(x), phases_.size() - 1);
  if (k + 1 == phases_.size()) return phases_[k];
  const double f = x - static_cast<double>(k);
  return (1.0 - f) * phases_[k] + f * phases_[k + 1];
}

cplx CdPerturbation::apply(double t, double cd) const {
  cplx v = (1.0 + eta_) * cd;
  if (phase_) v *= std::polar(1.0, phase_at(t));
  return v;
}

std::vector<cplx> perturb_cd(const std::vector<double>& t, const std::vector<double>& cd,
                             const NoiseSpec& spec, std::uint64_t seed) {
  std::vector<cplx> out(cd.size());
  if (t.empty()) return out;
  CdPerturbation p(spec, seed, t.front(), t.back());
  for (std::size_t i = 0; i < cd.size(); ++i) out[i] = p.apply(t[i], cd[i]);
  return out;
}

double EnsembleResult::mean_final_p_r() const {
  double s = 0.0;
  for (const auto& r : records) s += r.final_p_r;
  return s / static_cast<double>(records.size());
}

double EnsembleResult::stderr_final_p_r() const {
  const double n = static_cast<double>(records.size());
  if (n < 2) return 0.0;
  const double m = mean_final_p_r();
  double v = 0.0;
  for (const auto& r : records) v += (r.final_p_r - m) * (r.final_p_r - m);
  return std::sqrt(v / (n - 1.0) / n);
}

double EnsembleResult::mean_final_rydberg() const {
  double s = 0.0;
  for (const auto& r : records) s += r.final_rydberg;
  return s / static_cast<double>(records.size());
}

namespace {

struct RealizationOutput {
  RealizationRecord record;
  std::vector<double> t, p_g, p_e, p_r, fidelity;
  std::vector<cplx> omega_out;
  InvariantSummary invariants;
};

RealizationOutput run_one(const ScenarioConfig& cfg, const NoiseSpec& spec, int index) {
  RealizationOutput o;
  const std::uint64_t seed = spec.base_seed + static_cast<std::uint64_t>(index);
  CdPerturbation pert(spec, seed, cfg.protocol.t_start, cfg.end_time());
  CdModifier mod = [&pert](double t, double cd) { return pert.apply(t, cd); };
  o.record.index = index;
  o.record.seed = seed;
  o.record.eta = pert.eta();
  o.record.efficiency = std::numeric_limits<double>::quiet_NaN();
  if (cfg.model == Model::population) {
    PopulationTrajectory tr = cfg.levels == 6 ? run_population6(cfg, mod) : run_population3(cfg, mod);
    o.t = tr.t;
    o.p_g = tr.p_g;
    o.p_e = tr.p_e;
    o.p_r = tr.p_r;
    o.fidelity = tr.fidelity;
    o.invariants = tr.invariants;
    o.record.final_p_g = tr.p_g.back();
    o.record.final_p_e = tr.p_e.back();
    o.record.final_p_r = tr.p_r.back();
    o.record.final_rydberg = tr.final_rydberg();
    o.record.min_fidelity = tr.min_fidelity();
  } else {
    StorageOptions opts;
    opts.cd_modifier = mod;
    StorageResult r = cfg.levels == 6 ? run_storage6(cfg, opts) : run_storage_retrieval(cfg, opts);
    o.t = r.t;
    o.p_g = r.p_g;
    o.p_e = r.p_e;
    o.p_r = r.p_r;
    o.fidelity.assign(r.t.size(), std::numeric_limits<double>::quiet_NaN());
    o.omega_out = r.omega_out;
    o.invariants = r.invariants;
    o.record.final_p_g = r.p_g.back();
    o.record.final_p_e = r.p_e.back();
    o.record.final_p_r = r.p_r.back();
    o.record.final_rydberg = r.p_r.back() + (r.p_re.empty() ? 0.0 : r.p_re.back());
    o.record.min_fidelity = std::numeric_limits<double>::quiet_NaN();
    o.record.efficiency = r.efficiency;
  }
  return o;
}

}  // namespace

EnsembleResult run_ensemble(const ScenarioConfig& cfg, const NoiseSpec& spec, int threads) {
  if (spec.n_realizations < 1)
    throw ConfigError("noise.n_realizations", "n_realizations must be >= 1");
  const int n = spec.n_realizations;
  std::vector<RealizationOutput> outs(static_cast<std::size_t>(n));
  parallel_for(n, threads, [&](int i) {
    try {
      outs[i] = run_one(cfg, spec, i);
    } catch (const InvariantError& e) {
      throw InvariantError("realization " + std::to_string(i) + ": " + e.what(), e.step(),
                           e.time_ns(), e.z_um());
    } catch (const ConfigError& e) {
      throw ConfigError(e.field(), "realization " + std::to_string(i) + ": " + e.what());
    }
  });

  EnsembleResult res;
  res.t = outs.front().t;
  const std::size_t m = res.t.size();
  res.mean_p_g.assign(m, 0.0);
  res.mean_p_e.assign(m, 0.0);
  res.mean_p_r.assign(m, 0.0);
  res.mean_fidelity.assign(m, 0.0);
  if (!outs.front().omega_out.empty()) res.mean_omega_out.assign(m, cplx(0.0));
  for (const auto& o : outs) {
    res.records.push_back(o.record);
    res.p_r.push_back(o.p_r);
    res.invariants.merge(o.invariants);
    for (std::size_t k = 0; k < m; ++k) {
      res.mean_p_g[k] += o.p_g[k];
      res.mean_p_e[k] += o.p_e[k];
      res.mean_p_r[k] += o.p_r[k];
      res.mean_fidelity[k] += o.fidelity[k];
      if (!res.mean_omega_out.empty()) res.mean_omega_out[k] += o.omega_out[k];
    }
  }
  const double inv = 1.0 / n;
  for (std::size_t k = 0; k < m; ++k) {
    res.mean_p_g[k] *= inv;
    res.mean_p_e[k] *= inv;
    res.mean_p_r[k] *= inv;
    res.mean_fidelity[k] *= inv;
    if (!res.mean_omega_out.empty()) res.mean_omega_out[k] *= inv;
  }
  return res;
}

}  // namespace rydmem
