#pragma once

// Shared RK4 loop for the single-superatom master equations.

#include <limits>

#include "rydmem/collective.hpp"

namespace rydmem::detail {

template <int D, class HFn>
PopulationTrajectory evolve_master(const MatrixC<D>& rho0, const HFn& h,
                                   const std::vector<DecayChannel>& channels, const TimeGrid& grid,
                                   const DarkStateFn& dark, double record_interval) {
  auto rhs = [&](double t, const MatrixC<D>& r) -> MatrixC<D> {
    return lindblad_rhs<D>(h(t), r, channels);
  };
  PopulationTrajectory out;
  Recorder rec(record_interval);
  const auto& ts = grid.points();
  MatrixC<D> rho = rho0;
  auto record = [&](double t, long step) {
    out.t.push_back(t);
    out.p_g.push_back(rho(0, 0).real());
    out.p_e.push_back(rho(1, 1).real());
    out.p_r.push_back(rho(2, 2).real());
    if constexpr (D == 6) {
      out.p_ee.push_back(rho(3, 3).real());
      out.p_re.push_back(rho(4, 4).real());
      out.p_rr.push_back(rho(5, 5).real());
    }
    double f = std::numeric_limits<double>::quiet_NaN();
    if (dark) {
      if (auto psi = dark(t)) {
        Vector3 v = *psi;
        f = (v.adjoint() * rho.template topLeftCorner<3, 3>() * v)(0, 0).real();
      }
    }
    out.fidelity.push_back(f);
    check_positive<D>(rho, step, t, -1.0, out.invariants);
  };
  check_step<D>(rho, 0, ts.front(), -1.0, out.invariants);
  rec.due(ts.front(), false);
  record(ts.front(), 0);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double t = ts[i];
    rho = rk4_step(rhs, t, rho, ts[i + 1] - t);
    const long step = static_cast<long>(i + 1);
    check_step<D>(rho, step, ts[i + 1], -1.0, out.invariants);
    if (rec.due(ts[i + 1], i + 2 == ts.size())) record(ts[i + 1], step);
  }
  out.final_rho = rho;
  return out;
}

}  // namespace rydmem::detail
