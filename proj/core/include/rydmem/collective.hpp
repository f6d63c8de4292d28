#pragma once

// Single-superatom dynamics in the collective basis (G, E, R):
// Hamiltonians, dark/bright eigensystem and Lindblad evolution.

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "rydmem/config.hpp"
#include "rydmem/integrator.hpp"
#include "rydmem/pulses.hpp"

namespace rydmem {

using Matrix3 = MatrixC<3>;
using Vector3 = VectorC<3>;

/// Index order of the three collective states.
namespace basis3 {
inline constexpr int G = 0;
inline constexpr int E = 1;
inline constexpr int R = 2;
}  // namespace basis3

/// -1/2 [sqrt(N) Omega_p |E><G| + Omega_c |R><E| + h.c.]. A complex probe
/// enters <E|H|G>; <G|H|E> is its conjugate.
Matrix3 build_h_eff(cplx omega_p, double omega_c, int atom_number);

/// <R|H|G> = -(i/2) Omega_CD e^{i phase}, <G|H|R> its conjugate, so that for a
/// real drive and phase 0, <G|H|R> = i Omega_CD / 2.
Matrix3 build_h_cd(cplx omega_cd, double phase = 0.0);

struct DarkBright {
  Vector3 dark;   // eigenvalue 0
  Vector3 plus;   // eigenvalue +Omega_Rabi/2
  Vector3 minus;  // eigenvalue -Omega_Rabi/2
  double e0 = 0.0;
  double e_plus = 0.0;
  double e_minus = 0.0;
};

/// |Psi_0> = cos(theta)|G> - sin(theta)|R>. Throws std::domain_error
/// ("degenerate eigensystem") when both fields vanish.
DarkBright dark_bright_states(double omega_p, double omega_c, int atom_number);

/// Resonant fields at one point, fed to the Raman Hamiltonian.
struct RamanDrive {
  cplx probe{0.0};     // Omega_p (local)
  double control = 0.0;
  double cd = 0.0;     // target Omega_CD
};

/// Physical Hamiltonian with the CD drive realised by two far-detuned fields:
///   <E|H|G> = -1/2 (sqrt(N) Omega_p + Omega'_p e^{i phase} e^{-i Delta t})
///   <R|H|E> = -1/2 (Omega_c + conj(Omega'_c) e^{+i Delta t})
/// plus the compensation -diag(dG, dE, dR) when enabled. With
/// `oscillating == false` the adiabatically eliminated form is returned
/// instead: H_eff + H_CD + Stark shifts (+ compensation).
Matrix3 build_h_raman(double t, const RamanDrive& drive, const RamanFields& raman,
                      int atom_number, bool oscillating, double phase = 0.0);
Matrix3 build_h_raman(double t, const PulseSet& pulses, const RamanFields& raman, int atom_number,
                      bool oscillating);

/// Decay |from> -> |to> at `rate`.
struct DecayChannel {
  int to;
  int from;
  double rate;
};

/// -i[H, rho] + sum_k rate_k D[|to_k><from_k|] rho.
template <int D>
MatrixC<D> lindblad_rhs(const MatrixC<D>& h, const MatrixC<D>& rho,
                        const std::vector<DecayChannel>& channels) {
  const cplx mi(0.0, -1.0);
  MatrixC<D> d = mi * (h * rho - rho * h);
  for (const auto& c : channels) {
    if (c.rate == 0.0) continue;
    const int b = c.from;
    const double g2 = 0.5 * c.rate;
    d(c.to, c.to) += c.rate * rho(b, b);
    for (int j = 0; j < D; ++j) {
      d(b, j) -= g2 * rho(b, j);
      d(j, b) -= g2 * rho(j, b);
    }
  }
  return d;
}

std::vector<DecayChannel> channels3(double gamma_e, double gamma_r);

/// Pure dephasing of the Rydberg excitation number n (one entry per basis
/// state): d rho_ij -= rate (n_i - n_j)^2 rho_ij. Damps rho_rg at `rate`.
template <int D>
void add_rydberg_dephasing(MatrixC<D>& d, const MatrixC<D>& rho, const std::array<int, D>& n,
                           double rate) {
  if (rate == 0.0) return;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      const int k = n[i] - n[j];
      if (k != 0) d(i, j) -= rate * (k * k) * rho(i, j);
    }
}
Matrix3 lindblad3_rhs(const Matrix3& h, const Matrix3& rho, double gamma_e, double gamma_r);

/// Time series of one superatom. The six-level columns stay empty for the
/// three-level model.
struct PopulationTrajectory {
  std::vector<double> t;
  std::vector<double> p_g, p_e, p_r;
  std::vector<double> p_ee, p_re, p_rr;
  std::vector<double> fidelity;  // <Psi_0|rho|Psi_0>, NaN where undefined
  Eigen::MatrixXcd final_rho;
  InvariantSummary invariants;
  long degenerate_cd_samples = 0;

  double final_p_r() const { return p_r.back(); }
  /// P_R + P_RE for the six-level model, P_R otherwise.
  double final_rydberg() const { return p_r.back() + (p_re.empty() ? 0.0 : p_re.back()); }
  double min_fidelity() const;
};

using Hamiltonian3Fn = std::function<Matrix3(double)>;
using DarkStateFn = std::function<std::optional<Vector3>(double)>;

/// Fixed-step RK4 of the master equation with E->G (gamma_e) and R->G
/// (gamma_r). Invariants are checked every step; positivity at each record.
PopulationTrajectory evolve_master3(const Matrix3& rho0, const Hamiltonian3Fn& h, double gamma_e,
                                    double gamma_r, const TimeGrid& grid,
                                    const DarkStateFn& dark = {}, double record_interval = 0.0);

/// Maps the ideal CD value at t to the drive actually applied (noise hooks).
using CdModifier = std::function<cplx(double t, double cd)>;

/// Step plan used by population and storage runs: dt while Raman fields are
/// active, dt_hold afterwards (dt everywhere without Raman).
TimeGrid make_time_grid(const ScenarioConfig& cfg);

/// Population dynamics of one superatom for a validated three-level config.
PopulationTrajectory run_population3(const ScenarioConfig& cfg, const CdModifier& modifier = {});

/// Dark state of the write-stage fields at t, if defined.
std::optional<Vector3> dark_state_at(const PulseSet& pulses, int atom_number, double t);

}  // namespace rydmem
