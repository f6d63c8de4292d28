#pragma once

// Time-dependent field envelopes: probe, control, counterdiabatic (CD) drive,
// and the two-photon Raman realisation of the CD drive.

#include <complex>
#include <optional>
#include <string>
#include <string_view>

namespace rydmem {

enum class PulseKind { zero, gaussian, smoothed_rect, smoothed_square };

std::string_view to_string(PulseKind kind);
/// Throws std::invalid_argument for unknown names.
PulseKind pulse_kind_from_string(std::string_view name);

/// Real, non-negative, continuous envelope [rad/ns].
///
/// gaussian:        peak * exp(-(t - center)^2 / (2 width^2))
/// smoothed_rect:   peak/2 * [erf((t - t_on)/(sqrt2 rise)) - erf((t - t_off)/(sqrt2 rise))]
/// smoothed_square: same functional form as smoothed_rect
struct PulseShape {
  PulseKind kind = PulseKind::zero;
  double peak = 0.0;    // rad/ns
  double center = 0.0;  // ns, gaussian
  double width = 1.0;   // ns, gaussian sigma
  double t_on = 0.0;    // ns, smoothed shapes
  double t_off = 0.0;   // ns
  double rise = 1.0;    // ns, erf rise time

  static PulseShape gaussian(double peak, double center, double sigma);
  static PulseShape smoothed_rect(double peak, double t_on, double t_off, double rise);
  static PulseShape smoothed_square(double peak, double t_on, double t_off, double rise);
  static PulseShape none() { return {}; }
};

double eval_envelope(const PulseShape& shape, double t);
/// Closed-form time derivative of eval_envelope.
double eval_derivative(const PulseShape& shape, double t);

/// Probe, write-stage control, optional readout reactivation and the CD flag.
///
/// When `write_end` is set the write-stage control and the CD drive are
/// switched off for t > write_end (hold stage). The readout control is a
/// smoothed step of height `readout_peak` centred on `readout_on`.
struct PulseSet {
  PulseShape probe;
  PulseShape control;
  bool cd_enabled = false;
  /// Multiplier between the mixing-angle rate and the CD Rabi frequency.
  /// 2 makes H_CD = i(Omega_CD/2)(|G><R| - |R><G|) exactly transitionless.
  double cd_gain = 2.0;
  std::optional<double> write_end;
  std::optional<double> readout_on;
  double readout_rise = 1.0;
  double readout_peak = 0.0;

  double probe_at(double t) const { return eval_envelope(probe, t); }
  double probe_rate(double t) const { return eval_derivative(probe, t); }
  double write_control_at(double t) const;
  double write_control_rate(double t) const;
  double readout_control_at(double t) const;
  /// Total control envelope seen by the atoms.
  double control_at(double t) const { return write_control_at(t) + readout_control_at(t); }
  bool in_write_stage(double t) const { return !write_end || t <= *write_end; }
};

/// theta = atan2(sqrt(N) Omega_p, Omega_c). Throws std::domain_error when both vanish.
double mixing_angle(double omega_p, double omega_c, int atom_number);

struct CdEvaluation {
  double rabi = 0.0;
  /// Both probe and control vanish; the dark state is degenerate and rabi is 0.
  bool degenerate = false;
};

/// d theta / dt from the closed-form envelope derivatives of the write-stage
/// probe and control.
CdEvaluation mixing_angle_rate(const PulseSet& pulses, int atom_number, double t);

/// CD Rabi frequency cd_gain * dtheta/dt, or 0 when cd is disabled or the
/// write stage has ended.
CdEvaluation evaluate_cd(const PulseSet& pulses, int atom_number, double t);
double cd_rabi(const PulseSet& pulses, int atom_number, double t);

/// One sample of the auxiliary Raman pair realising a given CD Rabi frequency.
struct RamanSample {
  double aux_probe = 0.0;                 // Omega'_p, real
  std::complex<double> aux_control{0.0};  // Omega'_c = i sgn(cd) sqrt(2 Delta |cd|)
};

/// Throws std::invalid_argument for detuning <= 0.
RamanSample raman_map(double cd, double detuning);

/// AC Stark shifts of (G, R, E) induced by the Raman pair.
struct StarkShifts {
  double ground = 0.0;
  double rydberg = 0.0;
  double excited = 0.0;
};

StarkShifts stark_terms(double cd);

struct RamanFields {
  double detuning = 0.0;  // rad/ns
  bool stark_compensation = true;
};

}  // namespace rydmem
