#include "rydmem/maxwell_bloch.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "medium_detail.hpp"

namespace rydmem {

ObeParams obe_params(const ScenarioConfig& cfg) {
  ObeParams p;
  p.atom_number = cfg.atoms.atom_number;
  p.gamma_e = cfg.atoms.dissipation ? cfg.atoms.gamma_e : 0.0;
  p.gamma_r = cfg.atoms.dissipation ? cfg.atoms.gamma_r : 0.0;
  p.delta_k = cfg.derived.delta_k_per_um;
  p.dephasing = cfg.medium.dephasing;
  p.kv = cfg.derived.dephasing_kv;
  p.t_ref = cfg.protocol.write_time;
  return p;
}

double dephasing_rate(const ObeParams& p, double t) {
  if (!p.dephasing || t < p.t_ref) return 0.0;
  return p.kv * p.kv * (t - p.t_ref);
}

Matrix3 obe_rhs(const Matrix3& rho, cplx omega_p, double omega_c, cplx omega_cd, double z,
                double t, const ObeParams& p) {
  using namespace basis3;
  const cplx i(0.0, 1.0);
  const cplx P = std::sqrt(static_cast<double>(p.atom_number)) * omega_p;
  const double C = omega_c;
  const cplx W = omega_cd * std::polar(1.0, p.delta_k * z);
  const double ge = p.gamma_e;
  const double gr = p.gamma_r;
  const double gd = dephasing_rate(p, t);

  const double gg = rho(G, G).real();
  const double ee = rho(E, E).real();
  const double rr = rho(R, R).real();
  const cplx rg = rho(R, G);
  const cplx eg = rho(E, G);
  const cplx er = rho(E, R);
  const cplx re = rho(R, E);
  const cplx gr_ = rho(G, R);

  const cplx d_rg = -0.5 * W * (gg - rr) + 0.5 * i * C * eg - 0.5 * i * P * re - (0.5 * gr + gd) * rg;
  const cplx d_eg = 0.5 * i * P * (gg - ee) + 0.5 * i * C * rg + 0.5 * W * er - 0.5 * ge * eg;
  const cplx d_er = 0.5 * i * P * gr_ + 0.5 * i * C * (rr - ee) - 0.5 * std::conj(W) * eg -
                    (0.5 * (ge + gr) + gd) * er;
  const double d_rr = (0.5 * i * C * (er - std::conj(er))).real() -
                      0.5 * (W * std::conj(rg) + std::conj(W) * rg).real() - gr * rr;
  const double d_ee = (0.5 * i * (P * std::conj(eg) - std::conj(P) * eg)).real() +
                      (0.5 * i * C * (std::conj(er) - er)).real() - ge * ee;

  Matrix3 d;
  d(R, G) = d_rg;
  d(G, R) = std::conj(d_rg);
  d(E, G) = d_eg;
  d(G, E) = std::conj(d_eg);
  d(E, R) = d_er;
  d(R, E) = std::conj(d_er);
  d(R, R) = d_rr;
  d(E, E) = d_ee;
  d(G, G) = -(d_rr + d_ee);
  return d;
}

std::vector<double> PropagationParams::centres() const {
  std::vector<double> z(static_cast<std::size_t>(n_z));
  for (int j = 0; j < n_z; ++j) z[j] = (j + 0.5) * dz;
  return z;
}

PropagationParams propagation_params(const ScenarioConfig& cfg) {
  PropagationParams p;
  p.length = cfg.medium.length;
  p.n_z = cfg.grid.n_z;
  p.dz = p.length / p.n_z;
  p.kappa = cfg.medium.optical_depth * cfg.atoms.gamma_e /
            (2.0 * std::sqrt(static_cast<double>(cfg.atoms.atom_number)) * p.length);
  return p;
}

void mse_accumulate(const cplx* rho_eg, int n, cplx boundary, double kappa, double dz, cplx* cells,
                    cplx* output) {
  const cplx c = cplx(0.0, kappa * dz);
  cplx acc = boundary;
  for (int j = 0; j < n; ++j) {
    cells[j] = acc + 0.5 * c * rho_eg[j];
    acc += c * rho_eg[j];
  }
  *output = acc;
}

FieldProfile mse_step(const std::vector<cplx>& rho_eg, cplx boundary, double kappa, double dz) {
  FieldProfile f;
  f.cells.resize(rho_eg.size());
  mse_accumulate(rho_eg.data(), static_cast<int>(rho_eg.size()), boundary, kappa, dz,
                 f.cells.data(), &f.output);
  return f;
}

DspRecord dsp_decompose(const MediumGrid& grid, double omega_c, int atom_number) {
  const double rn = std::sqrt(static_cast<double>(atom_number));
  DspRecord d;
  d.z = grid.z;
  for (std::size_t j = 0; j < grid.rho.size(); ++j) {
    const cplx om = grid.field[j];
    double theta = std::numbers::pi / 2;
    if (std::abs(om) == 0.0 && omega_c == 0.0)
      d.matter_convention = true;
    else
      theta = std::atan2(rn * std::abs(om), omega_c);
    const cplx ph = std::cos(theta) * om;
    const cplx ma = -std::sin(theta) * rn * grid.rho[j](basis3::R, basis3::G);
    d.photonic.push_back(ph);
    d.matter.push_back(ma);
    d.polariton.push_back(ph + ma);
  }
  return d;
}

StorageResult run_storage_retrieval(const ScenarioConfig& cfg, const StorageOptions& opts) {
  if (cfg.levels != 3) throw ConfigError("scenario.levels", "run_storage_retrieval needs 3 levels");
  const ObeParams p = obe_params(cfg);
  const auto channels = channels3(p.gamma_e, p.gamma_r);
  auto rhs = [&](const Matrix3& rho, cplx probe, double control, cplx cd_applied, double cd, int,
                 double z, double t, bool raman) -> Matrix3 {
    if (!raman) return obe_rhs(rho, probe, control, cd_applied, z, t, p);
    const Matrix3 h = build_h_raman(t, RamanDrive{probe, control, cd}, cfg.raman, p.atom_number,
                                    true, p.delta_k * z);
    Matrix3 d = lindblad_rhs<3>(h, rho, channels);
    add_rydberg_dephasing<3>(d, rho, {0, 0, 1}, dephasing_rate(p, t));
    return d;
  };
  return detail::run_medium<3>(cfg, opts, rhs);
}

double retrieval_efficiency(const StorageResult& r, double t0, double t1) {
  double e_in = 0.0, e_out = 0.0;
  for (std::size_t i = 0; i + 1 < r.t.size(); ++i) {
    const double h = r.t[i + 1] - r.t[i];
    e_in += 0.5 * h * (std::norm(r.omega_in[i]) + std::norm(r.omega_in[i + 1]));
    if (r.t[i] >= t0 - 1e-12 && r.t[i + 1] <= t1 + 1e-12)
      e_out += 0.5 * h * (std::norm(r.omega_out[i]) + std::norm(r.omega_out[i + 1]));
  }
  if (!(e_in > 0.0)) throw std::domain_error("zero input energy");
  return e_out / e_in;
}

}  // namespace rydmem
