#include "rydmem/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rydmem {

std::string_view to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::zero: return "zero";
    case PulseKind::gaussian: return "gaussian";
    case PulseKind::smoothed_rect: return "smoothed_rect";
    case PulseKind::smoothed_square: return "smoothed_square";
  }
  return "zero";
}

PulseKind pulse_kind_from_string(std::string_view name) {
  if (name == "zero" || name == "none") return PulseKind::zero;
  if (name == "gaussian") return PulseKind::gaussian;
  if (name == "smoothed_rect") return PulseKind::smoothed_rect;
  if (name == "smoothed_square") return PulseKind::smoothed_square;
  throw std::invalid_argument("unknown pulse kind '" + std::string(name) + "'");
}

PulseShape PulseShape::gaussian(double peak, double center, double sigma) {
  PulseShape p;
  p.kind = PulseKind::gaussian;
  p.peak = peak;
  p.center = center;
  p.width = sigma;
  return p;
}

PulseShape PulseShape::smoothed_rect(double peak, double t_on, double t_off, double rise) {
  PulseShape p;
  p.kind = PulseKind::smoothed_rect;
  p.peak = peak;
  p.t_on = t_on;
  p.t_off = t_off;
  p.rise = rise;
  return p;
}

PulseShape PulseShape::smoothed_square(double peak, double t_on, double t_off, double rise) {
  PulseShape p = smoothed_rect(peak, t_on, t_off, rise);
  p.kind = PulseKind::smoothed_square;
  return p;
}

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
// d/dx erf(x) = 2/sqrt(pi) exp(-x^2)
constexpr double kErfSlope = 2.0 * std::numbers::inv_sqrtpi;
}  // namespace

double eval_envelope(const PulseShape& s, double t) {
  switch (s.kind) {
    case PulseKind::zero: return 0.0;
    case PulseKind::gaussian: {
      const double x = (t - s.center) / s.width;
      return s.peak * std::exp(-0.5 * x * x);
    }
    case PulseKind::smoothed_rect:
    case PulseKind::smoothed_square: {
      const double a = (t - s.t_on) / (kSqrt2 * s.rise);
      const double b = (t - s.t_off) / (kSqrt2 * s.rise);
      // erf(a) - erf(b) = erfc(b) - erfc(a); pick the form without cancellation.
      double v = (a + b > 0.0) ? std::erfc(b) - std::erfc(a) : std::erfc(-a) - std::erfc(-b);
      return std::max(0.0, 0.5 * s.peak * v);
    }
  }
  return 0.0;
}

double eval_derivative(const PulseShape& s, double t) {
  switch (s.kind) {
    case PulseKind::zero: return 0.0;
    case PulseKind::gaussian: {
      const double x = (t - s.center) / s.width;
      return -s.peak * x / s.width * std::exp(-0.5 * x * x);
    }
    case PulseKind::smoothed_rect:
    case PulseKind::smoothed_square: {
      const double w = kSqrt2 * s.rise;
      const double a = (t - s.t_on) / w;
      const double b = (t - s.t_off) / w;
      return 0.5 * s.peak * kErfSlope / w * (std::exp(-a * a) - std::exp(-b * b));
    }
  }
  return 0.0;
}

double PulseSet::write_control_at(double t) const {
  return in_write_stage(t) ? eval_envelope(control, t) : 0.0;
}

double PulseSet::write_control_rate(double t) const {
  return in_write_stage(t) ? eval_derivative(control, t) : 0.0;
}

double PulseSet::readout_control_at(double t) const {
  if (!readout_on) return 0.0;
  const double x = (t - *readout_on) / (kSqrt2 * readout_rise);
  return 0.5 * readout_peak * std::erfc(-x);
}

double mixing_angle(double omega_p, double omega_c, int atom_number) {
  const double a = std::sqrt(static_cast<double>(atom_number)) * omega_p;
  if (a == 0.0 && omega_c == 0.0) throw std::domain_error("undefined mixing angle");
  return std::atan2(a, omega_c);
}

CdEvaluation mixing_angle_rate(const PulseSet& pulses, int atom_number, double t) {
  const double rn = std::sqrt(static_cast<double>(atom_number));
  const double a = rn * eval_envelope(pulses.probe, t);
  const double b = eval_envelope(pulses.control, t);
  const double s = std::max(std::abs(a), std::abs(b));
  if (s == 0.0) return {0.0, true};
  const double da = rn * eval_derivative(pulses.probe, t) / s;
  const double db = eval_derivative(pulses.control, t) / s;
  const double as = a / s;
  const double bs = b / s;
  return {(bs * da - as * db) / (as * as + bs * bs), false};
}

CdEvaluation evaluate_cd(const PulseSet& pulses, int atom_number, double t) {
  if (!pulses.cd_enabled || !pulses.in_write_stage(t)) return {};
  CdEvaluation e = mixing_angle_rate(pulses, atom_number, t);
  e.rabi *= pulses.cd_gain;
  return e;
}

double cd_rabi(const PulseSet& pulses, int atom_number, double t) {
  return evaluate_cd(pulses, atom_number, t).rabi;
}

RamanSample raman_map(double cd, double detuning) {
  if (!(detuning > 0.0)) throw std::invalid_argument("Raman detuning must be positive");
  const double amp = std::sqrt(2.0 * detuning * std::abs(cd));
  const double sign = cd > 0.0 ? 1.0 : (cd < 0.0 ? -1.0 : 0.0);
  return {amp, std::complex<double>(0.0, sign * amp)};
}

StarkShifts stark_terms(double cd) {
  const double m = std::abs(cd);
  return {0.5 * m, 0.5 * m, -m};
}

}  // namespace rydmem
