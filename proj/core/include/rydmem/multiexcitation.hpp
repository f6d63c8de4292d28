#pragma once

// Double-excitation manifold (G, E, R, EE, RE, RR) with imperfect blockade.

#include "rydmem/collective.hpp"
#include "rydmem/maxwell_bloch.hpp"

namespace rydmem {

using Matrix6 = MatrixC<6>;

namespace basis6 {
inline constexpr int G = 0;
inline constexpr int E = 1;
inline constexpr int R = 2;
inline constexpr int EE = 3;
inline constexpr int RE = 4;
inline constexpr int RR = 5;
}  // namespace basis6

/// H_T with overall -1/2 prefactor: sqrt(N) Omega_p on G-E, Omega_c on E-R,
/// eps sqrt(2(N-1)) Omega_p on E-EE, eps sqrt(N-1) Omega_p on R-RE,
/// sqrt(2) Omega_c on EE-RE and RE-RR, +U_rr on RR, and the CD coupling
/// -(i/2) Omega_CD e^{i phase} on <R|H|G>. Throws std::invalid_argument for N < 2.
Matrix6 build_h_t(cplx omega_p, double omega_c, cplx omega_cd, int atom_number,
                  const BlockadeParams& bp, double phase = 0.0);

/// E->G (G), R->G (Gr), EE->E (2G), RE->R (G), RE->E (Gr), RR->R (2Gr).
std::vector<DecayChannel> channels6(double gamma_e, double gamma_r);
Matrix6 lindblad6_rhs(const Matrix6& rho, const Matrix6& h_t, double gamma_e, double gamma_r);

/// Single-superatom six-level population dynamics.
PopulationTrajectory run_population6(const ScenarioConfig& cfg, const CdModifier& modifier = {});

/// Medium run with a six-level density matrix per cell; the field is driven
/// by <E|rho|G>.
StorageResult run_storage6(const ScenarioConfig& cfg, const StorageOptions& opts = {});

}  // namespace rydmem
