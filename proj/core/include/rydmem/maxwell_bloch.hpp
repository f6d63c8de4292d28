#pragma once

// Spatially resolved storage and retrieval: per-cell optical Bloch equations
// co-integrated with probe propagation in the retarded frame.

#include <vector>

#include "rydmem/collective.hpp"
#include "rydmem/config.hpp"

namespace rydmem {

/// Per-cell OBE parameters.
struct ObeParams {
  int atom_number = 1;
  double gamma_e = 0.0;   // rad/ns, 0 when dissipation is off
  double gamma_r = 0.0;   // rad/ns
  double delta_k = 0.0;   // rad/um
  bool dephasing = false;
  double kv = 0.0;        // k v [rad/ns]
  double t_ref = 0.0;     // ns, dephasing clock origin
};

ObeParams obe_params(const ScenarioConfig& cfg);

/// (k v)^2 (t - t_ref) for t >= t_ref, else 0.
double dephasing_rate(const ObeParams& p, double t);

/// Explicit optical Bloch equations. The CD coupling carries e^{i dk z};
/// motional dephasing damps the Rydberg coherences rho_rg and rho_re.
Matrix3 obe_rhs(const Matrix3& rho, cplx omega_p, double omega_c, cplx omega_cd, double z,
                double t, const ObeParams& p);

struct PropagationParams {
  double kappa = 0.0;   // alpha Gamma / (2 sqrt(N) L), rad/(ns um)
  double length = 0.0;  // um
  int n_z = 1;
  double dz = 0.0;

  /// Cell centres z_j = (j + 1/2) dz.
  std::vector<double> centres() const;
};

PropagationParams propagation_params(const ScenarioConfig& cfg);

struct FieldProfile {
  std::vector<cplx> cells;  // Omega_p at the cell centres
  cplx output{0.0};         // Omega_p(L)
};

/// dz Omega_p = i kappa rho_eg integrated from the boundary value, with each
/// cell contributing its full width to the exit value and half its width to
/// its own centre.
FieldProfile mse_step(const std::vector<cplx>& rho_eg, cplx boundary, double kappa, double dz);
void mse_accumulate(const cplx* rho_eg, int n, cplx boundary, double kappa, double dz, cplx* cells,
                    cplx* output);

struct MediumGrid {
  std::vector<double> z;          // um
  std::vector<Matrix3> rho;
  std::vector<cplx> field;        // local probe at each centre
};

struct DspRecord {
  std::vector<double> z;
  std::vector<cplx> polariton;  // cos(theta) Omega_p - sin(theta) sqrt(N) rho_rg
  std::vector<cplx> photonic;
  std::vector<cplx> matter;
  /// At least one cell had both fields zero; theta = pi/2 was used there.
  bool matter_convention = false;
};

DspRecord dsp_decompose(const MediumGrid& grid, double omega_c, int atom_number);

struct Snapshot {
  double t = 0.0;
  std::vector<double> z, p_r, abs_rho_rg, abs_omega_p;
};

struct StorageResult {
  std::vector<double> t;
  std::vector<cplx> omega_in, omega_out;
  std::vector<double> omega_c, omega_cd;  // applied control and |CD|
  // cell averages
  std::vector<double> p_g, p_e, p_r, p_ee, p_re, p_rr;
  // DSP at the middle cell
  std::vector<double> dsp_abs2, dsp_photonic_abs, dsp_matter_abs;
  std::vector<Snapshot> snapshots;

  double readout_start = 0.0;
  double readout_end = 0.0;
  double input_energy = 0.0;
  double output_energy = 0.0;  // inside the readout window
  double leak_energy = 0.0;    // before the readout window
  double efficiency = 0.0;
  /// max_t [E_out(t) - E_in(t)] / E_in(total); <= 0 for a passive medium.
  double max_excess_output = 0.0;
  InvariantSummary invariants;
  long degenerate_cd_samples = 0;
  bool dsp_matter_convention = false;
  int levels = 3;
};

struct StorageOptions {
  int threads = 1;
  /// Snapshot times; empty selects {T_write, readout on, end}.
  std::vector<double> snapshot_times;
  CdModifier cd_modifier;
};

StorageResult run_storage_retrieval(const ScenarioConfig& cfg, const StorageOptions& opts = {});

/// int_window |Omega_out|^2 / int_all |Omega_in|^2 by the trapezoid rule on
/// the recorded samples. Throws std::domain_error for zero input energy.
double retrieval_efficiency(const StorageResult& result, double t0, double t1);

}  // namespace rydmem
