#include "rydmem/multiexcitation.hpp"

#include <cmath>
#include <stdexcept>

#include "evolve_detail.hpp"
#include "medium_detail.hpp"

namespace rydmem {

Matrix6 build_h_t(cplx omega_p, double omega_c, cplx omega_cd, int atom_number,
                  const BlockadeParams& bp, double phase) {
  using namespace basis6;
  if (atom_number < 2) throw std::invalid_argument("six-level model needs N >= 2");
  const double n = atom_number;
  Matrix6 h = Matrix6::Zero();
  auto couple = [&h](int a, int b, cplx v) {  // <a|H|b> = v
    h(a, b) = v;
    h(b, a) = std::conj(v);
  };
  couple(E, G, -0.5 * std::sqrt(n) * omega_p);
  couple(R, E, -0.5 * omega_c);
  couple(R, G, cplx(0.0, -0.5) * omega_cd * std::polar(1.0, phase));
  couple(EE, E, -0.5 * bp.epsilon * std::sqrt(2.0 * (n - 1.0)) * omega_p);
  couple(RE, R, -0.5 * bp.epsilon * std::sqrt(n - 1.0) * omega_p);
  couple(EE, RE, -0.5 * std::sqrt(2.0) * omega_c);
  couple(RE, RR, -0.5 * std::sqrt(2.0) * omega_c);
  h(RR, RR) = bp.u_rr;
  return h;
}

std::vector<DecayChannel> channels6(double gamma_e, double gamma_r) {
  using namespace basis6;
  return {{G, E, gamma_e},   {G, R, gamma_r},  {E, EE, 2.0 * gamma_e},
          {R, RE, gamma_e},  {E, RE, gamma_r}, {R, RR, 2.0 * gamma_r}};
}

Matrix6 lindblad6_rhs(const Matrix6& rho, const Matrix6& h_t, double gamma_e, double gamma_r) {
  return lindblad_rhs<6>(h_t, rho, channels6(gamma_e, gamma_r));
}

PopulationTrajectory run_population6(const ScenarioConfig& cfg, const CdModifier& modifier) {
  if (cfg.raman_enabled)
    throw ConfigError("raman.enabled", "the Raman realisation is only available with 3 levels");
  const PulseSet pulses = cfg.pulse_set();
  const int n = cfg.atoms.atom_number;
  const double ge = cfg.atoms.dissipation ? cfg.atoms.gamma_e : 0.0;
  const double gr = cfg.atoms.dissipation ? cfg.atoms.gamma_r : 0.0;
  long degenerate = 0;
  auto h = [&](double t) -> Matrix6 {
    const CdEvaluation cd = evaluate_cd(pulses, n, t);
    if (cd.degenerate) ++degenerate;
    const cplx w = modifier ? modifier(t, cd.rabi) : cplx(cd.rabi);
    return build_h_t(pulses.probe_at(t), pulses.control_at(t), w, n, cfg.blockade);
  };
  DarkStateFn dark = [&](double t) { return dark_state_at(pulses, n, t); };
  Matrix6 rho0 = Matrix6::Zero();
  if (cfg.protocol.initial_state == InitialState::dark) {
    auto psi = dark_state_at(pulses, n, cfg.protocol.t_start);
    if (!psi) throw ConfigError("scenario.initial_state", "dark state undefined at t_start");
    rho0.topLeftCorner<3, 3>() = *psi * psi->adjoint();
  } else {
    rho0(basis6::G, basis6::G) = 1.0;
  }
  PopulationTrajectory tr = detail::evolve_master<6>(rho0, h, channels6(ge, gr), make_time_grid(cfg),
                                                     dark, cfg.grid.record_interval);
  tr.degenerate_cd_samples = degenerate;
  return tr;
}

StorageResult run_storage6(const ScenarioConfig& cfg, const StorageOptions& opts) {
  if (cfg.raman_enabled)
    throw ConfigError("raman.enabled", "the Raman realisation is only available with 3 levels");
  const ObeParams p = obe_params(cfg);
  const auto channels = channels6(p.gamma_e, p.gamma_r);
  auto rhs = [&](const Matrix6& rho, cplx probe, double control, cplx cd_applied, double, int,
                 double z, double t, bool) -> Matrix6 {
    const Matrix6 h = build_h_t(probe, control, cd_applied, p.atom_number, cfg.blockade, p.delta_k * z);
    Matrix6 d = lindblad_rhs<6>(h, rho, channels);
    add_rydberg_dephasing<6>(d, rho, {0, 0, 1, 0, 1, 2}, dephasing_rate(p, t));
    return d;
  };
  return detail::run_medium<6>(cfg, opts, rhs);
}

}  // namespace rydmem
