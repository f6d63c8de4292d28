#include "rydmem/collective.hpp"

#include "evolve_detail.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace rydmem {

TimeGrid TimeGrid::uniform(double t0, double t1, double dt) {
  TimeGrid g;
  g.points_.push_back(t0);
  g.extend(t1, dt);
  return g;
}

void TimeGrid::extend(double t1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const double t0 = points_.back();
  if (!(t1 > t0)) return;
  const auto n = static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = (t1 - t0) / static_cast<double>(n);
  points_.reserve(points_.size() + static_cast<std::size_t>(n));
  for (long i = 1; i < n; ++i) points_.push_back(t0 + static_cast<double>(i) * h);
  points_.push_back(t1);
}

Matrix3 build_h_eff(cplx omega_p, double omega_c, int atom_number) {
  using namespace basis3;
  Matrix3 h = Matrix3::Zero();
  const cplx ep = -0.5 * std::sqrt(static_cast<double>(atom_number)) * omega_p;
  h(E, G) = ep;
  h(G, E) = std::conj(ep);
  h(R, E) = h(E, R) = -0.5 * omega_c;
  return h;
}

Matrix3 build_h_cd(cplx omega_cd, double phase) {
  using namespace basis3;
  Matrix3 h = Matrix3::Zero();
  const cplx rg = cplx(0.0, -0.5) * omega_cd * std::polar(1.0, phase);
  h(R, G) = rg;
  h(G, R) = std::conj(rg);
  return h;
}

DarkBright dark_bright_states(double omega_p, double omega_c, int atom_number) {
  using namespace basis3;
  const double a = std::sqrt(static_cast<double>(atom_number)) * omega_p;
  const double rabi = std::hypot(a, omega_c);
  if (!(rabi > 0.0)) throw std::domain_error("degenerate eigensystem");
  const double s = a / rabi;
  const double c = omega_c / rabi;
  const double r2 = std::sqrt(0.5);
  DarkBright db;
  db.dark = Vector3(c, 0.0, -s);
  db.plus = Vector3(r2 * s, -r2, r2 * c);
  db.minus = Vector3(r2 * s, r2, r2 * c);
  db.e0 = 0.0;
  db.e_plus = 0.5 * rabi;
  db.e_minus = -0.5 * rabi;
  return db;
}

Matrix3 build_h_raman(double t, const RamanDrive& d, const RamanFields& raman, int atom_number,
                      bool oscillating, double phase) {
  using namespace basis3;
  const StarkShifts st = stark_terms(d.cd);
  Matrix3 h;
  if (oscillating) {
    const RamanSample aux = raman_map(d.cd, raman.detuning);
    h = Matrix3::Zero();
    const cplx eg = -0.5 * (std::sqrt(static_cast<double>(atom_number)) * d.probe +
                            aux.aux_probe * std::polar(1.0, phase - raman.detuning * t));
    const cplx re = -0.5 * (d.control + std::conj(aux.aux_control) * std::polar(1.0, raman.detuning * t));
    h(E, G) = eg;
    h(G, E) = std::conj(eg);
    h(R, E) = re;
    h(E, R) = std::conj(re);
  } else {
    h = build_h_eff(d.probe, d.control, atom_number) + build_h_cd(d.cd, phase);
    h(G, G) += st.ground;
    h(E, E) += st.excited;
    h(R, R) += st.rydberg;
  }
  if (raman.stark_compensation) {
    h(G, G) -= st.ground;
    h(E, E) -= st.excited;
    h(R, R) -= st.rydberg;
  }
  return h;
}

Matrix3 build_h_raman(double t, const PulseSet& pulses, const RamanFields& raman, int atom_number,
                      bool oscillating) {
  RamanDrive d{pulses.probe_at(t), pulses.control_at(t), cd_rabi(pulses, atom_number, t)};
  return build_h_raman(t, d, raman, atom_number, oscillating, 0.0);
}

std::vector<DecayChannel> channels3(double gamma_e, double gamma_r) {
  using namespace basis3;
  return {{G, E, gamma_e}, {G, R, gamma_r}};
}

Matrix3 lindblad3_rhs(const Matrix3& h, const Matrix3& rho, double gamma_e, double gamma_r) {
  return lindblad_rhs<3>(h, rho, channels3(gamma_e, gamma_r));
}

double PopulationTrajectory::min_fidelity() const {
  double m = std::numeric_limits<double>::infinity();
  for (double f : fidelity)
    if (!std::isnan(f)) m = std::min(m, f);
  return m;
}

PopulationTrajectory evolve_master3(const Matrix3& rho0, const Hamiltonian3Fn& h, double gamma_e,
                                    double gamma_r, const TimeGrid& grid, const DarkStateFn& dark,
                                    double record_interval) {
  return detail::evolve_master<3>(rho0, h, channels3(gamma_e, gamma_r), grid, dark,
                                  record_interval);
}

std::optional<Vector3> dark_state_at(const PulseSet& pulses, int atom_number, double t) {
  const double p = pulses.probe_at(t);
  const double c = pulses.control_at(t);
  if (p == 0.0 && c == 0.0) return std::nullopt;
  return dark_bright_states(p, c, atom_number).dark;
}

TimeGrid make_time_grid(const ScenarioConfig& cfg) {
  const double t0 = cfg.protocol.t_start;
  const double t1 = cfg.end_time();
  if (cfg.raman_enabled) {
    const double tr = std::min(cfg.raman_end(), t1);
    TimeGrid g = TimeGrid::uniform(t0, tr, cfg.grid.dt);
    g.extend(t1, cfg.grid.dt_hold);
    return g;
  }
  if (cfg.model == Model::storage) {
    TimeGrid g = TimeGrid::uniform(t0, cfg.protocol.write_time, cfg.grid.dt);
    g.extend(t1, cfg.grid.dt);
    return g;
  }
  return TimeGrid::uniform(t0, t1, cfg.grid.dt);
}

PopulationTrajectory run_population3(const ScenarioConfig& cfg, const CdModifier& modifier) {
  const PulseSet pulses = cfg.pulse_set();
  const int n = cfg.atoms.atom_number;
  const double ge = cfg.atoms.dissipation ? cfg.atoms.gamma_e : 0.0;
  const double gr = cfg.atoms.dissipation ? cfg.atoms.gamma_r : 0.0;
  const double raman_end = cfg.raman_end();
  long degenerate = 0;

  Hamiltonian3Fn h = [&](double t) -> Matrix3 {
    const double p = pulses.probe_at(t);
    const double c = pulses.control_at(t);
    const CdEvaluation cd = evaluate_cd(pulses, n, t);
    if (cd.degenerate) ++degenerate;
    if (cfg.raman_enabled && t <= raman_end)
      return build_h_raman(t, RamanDrive{p, c, cd.rabi}, cfg.raman, n, true, 0.0);
    const cplx w = modifier ? modifier(t, cd.rabi) : cplx(cd.rabi);
    Matrix3 m = build_h_eff(p, c, n);
    if (w != cplx(0.0)) m += build_h_cd(w);
    return m;
  };
  DarkStateFn dark = [&](double t) { return dark_state_at(pulses, n, t); };

  Matrix3 rho0 = Matrix3::Zero();
  if (cfg.protocol.initial_state == InitialState::dark) {
    auto psi = dark_state_at(pulses, n, cfg.protocol.t_start);
    if (!psi) throw ConfigError("scenario.initial_state", "dark state undefined at t_start");
    rho0 = *psi * psi->adjoint();
  } else {
    rho0(basis3::G, basis3::G) = 1.0;
  }
  PopulationTrajectory tr =
      evolve_master3(rho0, h, ge, gr, make_time_grid(cfg), dark, cfg.grid.record_interval);
  tr.degenerate_cd_samples = degenerate;
  return tr;
}

}  // namespace rydmem
