#pragma once

// Amplitude and phase noise on the CD drive and seeded ensemble runs.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "rydmem/collective.hpp"
#include "rydmem/config.hpp"
#include "rydmem/maxwell_bloch.hpp"

namespace rydmem {

/// Name recorded in run logs; results are portable given this and the seed.
inline constexpr const char* kRngAlgorithm = "mt19937_64+box-muller";

/// mt19937_64 with explicitly specified uniform and normal transforms (the
/// standard library distributions are implementation-defined).
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : engine_(seed) {}
  /// Uniform on [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Standard normal via the cosine branch of Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
};

/// One realisation of the CD perturbation:
///   amplitude: Omega_CD -> (1 + eta) Omega_CD, eta ~ U[-bound, bound] once
///   phase:     Omega_CD -> Omega_CD exp(i dphi(t)), dphi linear between
///              i.i.d. N(0, sigma^2) nodes spaced correlation_step apart
class CdPerturbation {
 public:
  CdPerturbation(const NoiseSpec& spec, std::uint64_t seed, double t0, double t1);

  cplx apply(double t, double cd) const;
  cplx operator()(double t, double cd) const { return apply(t, cd); }

  double eta() const { return eta_; }
  double phase_at(double t) const;
  const std::vector<double>& phases() const { return phases_; }

 private:
  bool amplitude_;
  bool phase_;
  double eta_ = 0.0;
  double t0_;
  double step_;
  std::vector<double> phases_;
};

/// Perturbed samples of a sampled CD trace.
std::vector<cplx> perturb_cd(const std::vector<double>& t, const std::vector<double>& cd,
                             const NoiseSpec& spec, std::uint64_t seed);

struct RealizationRecord {
  int index = 0;
  std::uint64_t seed = 0;
  double eta = 0.0;
  double final_p_g = 0.0;
  double final_p_e = 0.0;
  double final_p_r = 0.0;
  double final_rydberg = 0.0;  // P_R + P_RE for six levels
  double min_fidelity = 0.0;
  double efficiency = 0.0;     // storage runs only, NaN otherwise
};

struct EnsembleResult {
  std::string rng_algorithm = kRngAlgorithm;
  std::vector<RealizationRecord> records;
  std::vector<double> t;
  std::vector<double> mean_p_g, mean_p_e, mean_p_r, mean_fidelity;
  std::vector<cplx> mean_omega_out;  // storage runs only
  /// Per-realisation P_R traces, index-aligned with `records`.
  std::vector<std::vector<double>> p_r;
  InvariantSummary invariants;

  double mean_final_p_r() const;
  double stderr_final_p_r() const;
  double mean_final_rydberg() const;
};

/// n_realizations independent runs with seeds base_seed + i, averaged in
/// index order. Per-realisation failures are rethrown naming the index.
EnsembleResult run_ensemble(const ScenarioConfig& cfg, const NoiseSpec& spec, int threads = 1);

}  // namespace rydmem
