#pragma once

// Whole-grid RK4 shared by the three- and six-level medium runs.
//
// Outside the Raman window the field is rebuilt from the stage coherences at
// every RK4 stage. Inside it, rho_eg carries a component oscillating at the
// Raman detuning that radiates into the auxiliary mode, so the signal field is
// sourced by a one-period running average of rho_eg, frozen over each step.

#include <cmath>
#include <limits>
#include <numbers>

#include "rydmem/maxwell_bloch.hpp"

namespace rydmem::detail {

template <int D, class CellRhs>
StorageResult run_medium(const ScenarioConfig& cfg, const StorageOptions& opts,
                         const CellRhs& cell_rhs) {
  using Mat = MatrixC<D>;
  const PulseSet pulses = cfg.pulse_set();
  const int atoms = cfg.atoms.atom_number;
  const PropagationParams prop = propagation_params(cfg);
  const int n = prop.n_z;
  const std::vector<double> z = prop.centres();
  const TimeGrid grid = make_time_grid(cfg);
  const auto& ts = grid.points();
  const double raman_end =
      cfg.raman_enabled ? cfg.raman_end() : -std::numeric_limits<double>::infinity();
  const int threads = std::max(1, opts.threads);

  StorageResult res;
  res.levels = D;
  res.readout_start = cfg.readout_on() - 3.0 * cfg.protocol.readout_rise;
  res.readout_end = cfg.end_time();

  std::vector<double> snap_times = opts.snapshot_times;
  if (snap_times.empty()) snap_times = {cfg.protocol.write_time, cfg.readout_on(), cfg.end_time()};
  std::size_t next_snap = 0;
  std::sort(snap_times.begin(), snap_times.end());

  Mat init = Mat::Zero();
  init(0, 0) = 1.0;
  std::vector<Mat> rho(static_cast<std::size_t>(n), init);
  std::vector<Mat> k1(rho), k2(rho), k3(rho), k4(rho), tmp(rho);
  std::vector<cplx> eg(static_cast<std::size_t>(n)), cells(static_cast<std::size_t>(n));
  cplx out{0.0};

  // running average of rho_eg over one Raman period
  int n_avg = 1;
  if (cfg.raman_enabled) {
    const double period = 2.0 * std::numbers::pi / cfg.raman.detuning;
    n_avg = std::max(1, static_cast<int>(std::lround(period / cfg.grid.dt)));
  }
  std::vector<cplx> ring(static_cast<std::size_t>(n) * n_avg, cplx(0.0));
  std::vector<cplx> ring_sum(static_cast<std::size_t>(n), cplx(0.0));
  int ring_pos = 0;
  int ring_count = 0;
  auto push_ring = [&]() {
    for (int j = 0; j < n; ++j) {
      cplx& slot = ring[static_cast<std::size_t>(j) * n_avg + ring_pos];
      ring_sum[j] += rho[j](1, 0) - slot;
      slot = rho[j](1, 0);
    }
    ring_pos = (ring_pos + 1) % n_avg;
    ring_count = std::min(ring_count + 1, n_avg);
    if (ring_pos == 0) {  // resum to keep rounding from accumulating
      for (int j = 0; j < n; ++j) {
        cplx s{0.0};
        for (int k = 0; k < n_avg; ++k) s += ring[static_cast<std::size_t>(j) * n_avg + k];
        ring_sum[j] = s;
      }
    }
  };

  long degenerate = 0;
  struct Drive {
    double control;
    double cd;
    cplx cd_applied;
  };
  // hold is decided per step so no RK4 stage straddles the switch-off
  auto drive_at = [&](double t, bool hold = false) {
    if (hold) return Drive{pulses.readout_control_at(t), 0.0, cplx(0.0)};
    const CdEvaluation e = evaluate_cd(pulses, atoms, t);
    if (e.degenerate) ++degenerate;
    const cplx w = opts.cd_modifier ? opts.cd_modifier(t, e.rabi) : cplx(e.rabi);
    return Drive{pulses.control_at(t), e.rabi, w};
  };

  auto field_from = [&](const std::vector<Mat>& st, double t) {
    for (int j = 0; j < n; ++j) eg[j] = st[j](1, 0);
    mse_accumulate(eg.data(), n, cplx(pulses.probe_at(t)), prop.kappa, prop.dz, cells.data(), &out);
  };
  auto field_from_average = [&](double t) {
    const double w = ring_count > 0 ? 1.0 / ring_count : 0.0;
    for (int j = 0; j < n; ++j) eg[j] = ring_sum[j] * w;
    mse_accumulate(eg.data(), n, cplx(pulses.probe_at(t)), prop.kappa, prop.dz, cells.data(), &out);
  };

  auto eval = [&](double t, const std::vector<Mat>& st, std::vector<Mat>& k, bool frozen, bool raman,
                  bool hold) {
    if (!frozen) field_from(st, t);
    const Drive d = drive_at(t, hold);
#pragma omp parallel for num_threads(threads) if (threads > 1) schedule(static)
    for (int j = 0; j < n; ++j)
      k[j] = cell_rhs(st[j], cells[j], d.control, d.cd_applied, d.cd, j, z[j], t, raman);
  };

  Recorder rec(cfg.grid.record_interval);
  const int mid = n / 2;
  const double sqrt_n = std::sqrt(static_cast<double>(atoms));
  double cum_in = 0.0, cum_out = 0.0, prev_in = 0.0, prev_out = 0.0, prev_t = ts.front();
  bool have_prev = false;

  auto observe = [&](std::size_t i, bool last) {
    const double t = ts[i];
    const bool in_raman = cfg.raman_enabled && t < raman_end;
    if (in_raman && ring_count > 0)
      field_from_average(t);
    else
      field_from(rho, t);
    const double a_in = std::norm(pulses.probe_at(t));
    const double a_out = std::norm(out);
    if (have_prev) {
      const double h = t - prev_t;
      const double e_in = 0.5 * h * (prev_in + a_in);
      const double e_out = 0.5 * h * (prev_out + a_out);
      cum_in += e_in;
      cum_out += e_out;
      if (prev_t >= res.readout_start - 1e-12)
        res.output_energy += e_out;
      else
        res.leak_energy += e_out;
      res.max_excess_output = std::max(res.max_excess_output, cum_out - cum_in);
    }
    prev_in = a_in;
    prev_out = a_out;
    prev_t = t;
    have_prev = true;

    const bool snap = next_snap < snap_times.size() && t >= snap_times[next_snap] - 1e-9;
    if (!rec.due(t, last) && !snap) return;
    const long step = static_cast<long>(i);
    for (int j = 0; j < n; ++j) check_positive<D>(rho[j], step, t, z[j], res.invariants);
    const Drive d = drive_at(t);
    res.t.push_back(t);
    res.omega_in.push_back(pulses.probe_at(t));
    res.omega_out.push_back(out);
    res.omega_c.push_back(d.control);
    res.omega_cd.push_back(std::abs(d.cd_applied));
    Eigen::Matrix<double, D, 1> pop = Eigen::Matrix<double, D, 1>::Zero();
    for (int j = 0; j < n; ++j) pop += rho[j].diagonal().real();
    pop /= static_cast<double>(n);
    res.p_g.push_back(pop(0));
    res.p_e.push_back(pop(1));
    res.p_r.push_back(pop(2));
    if constexpr (D == 6) {
      res.p_ee.push_back(pop(3));
      res.p_re.push_back(pop(4));
      res.p_rr.push_back(pop(5));
    }
    {
      const double om = std::abs(cells[mid]);
      double theta = std::numbers::pi / 2;
      if (om == 0.0 && d.control == 0.0)
        res.dsp_matter_convention = true;
      else
        theta = std::atan2(sqrt_n * om, d.control);
      const cplx ph = std::cos(theta) * cells[mid];
      const cplx ma = -std::sin(theta) * sqrt_n * rho[mid](2, 0);
      res.dsp_abs2.push_back(std::norm(ph + ma));
      res.dsp_photonic_abs.push_back(std::abs(ph));
      res.dsp_matter_abs.push_back(std::abs(ma));
    }
    while (next_snap < snap_times.size() && t >= snap_times[next_snap] - 1e-9) {
      Snapshot s;
      s.t = t;
      s.z = z;
      for (int j = 0; j < n; ++j) {
        s.p_r.push_back(rho[j](2, 2).real());
        s.abs_rho_rg.push_back(std::abs(rho[j](2, 0)));
        s.abs_omega_p.push_back(std::abs(cells[j]));
      }
      res.snapshots.push_back(std::move(s));
      ++next_snap;
    }
  };

  for (int j = 0; j < n; ++j) check_step<D>(rho[j], 0, ts.front(), z[j], res.invariants);
  if (cfg.raman_enabled) push_ring();
  observe(0, ts.size() == 1);

  for (std::size_t i = 0; i + 1 < ts.size(); ++i) {
    const double t = ts[i];
    const double h = ts[i + 1] - t;
    const bool raman = cfg.raman_enabled && ts[i + 1] <= raman_end + 1e-12;
    const bool hold = pulses.write_end && t >= *pulses.write_end;
    if (raman) field_from_average(t);
    auto stage = [&](double ts_, const std::vector<Mat>& base, const std::vector<Mat>* k, double c,
                     std::vector<Mat>& dst) {
      if (k) {
        for (int j = 0; j < n; ++j) tmp[j] = base[j] + c * (*k)[j];
        eval(ts_, tmp, dst, raman, raman, hold);
      } else {
        eval(ts_, base, dst, raman, raman, hold);
      }
    };
    stage(t, rho, nullptr, 0.0, k1);
    stage(t + 0.5 * h, rho, &k1, 0.5 * h, k2);
    stage(t + 0.5 * h, rho, &k2, 0.5 * h, k3);
    stage(ts[i + 1], rho, &k3, h, k4);
    const long step = static_cast<long>(i + 1);
    for (int j = 0; j < n; ++j) {
      rho[j] += (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
      check_step<D>(rho[j], step, ts[i + 1], z[j], res.invariants);
    }
    if (cfg.raman_enabled) push_ring();
    observe(i + 1, i + 2 == ts.size());
  }

  res.input_energy = cum_in;
  res.efficiency = cum_in > 0.0 ? res.output_energy / cum_in : 0.0;
  res.max_excess_output = cum_in > 0.0 ? res.max_excess_output / cum_in : 0.0;
  res.degenerate_cd_samples = degenerate;
  return res;
}

}  // namespace rydmem::detail
