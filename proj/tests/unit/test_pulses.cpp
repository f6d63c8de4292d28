#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "rydmem/presets.hpp"
#include "rydmem/pulses.hpp"
#include "rydmem/units.hpp"

using namespace rydmem;
using testing::close_rel;

namespace {
constexpr double mhz(double x) { return units::mhz_to_rad_per_ns(x); }

PulseSet fig2e_pair(double gain) {
  ScenarioConfig c = gaussian_pair_population(250.0, true);
  c.cd_gain = gain;
  return c.pulse_set();
}

double simpson(const auto& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}
}  // namespace

TEST_SUITE("pulses") {

TEST_CASE("gaussian peak and one-sigma points") {
  const auto g = PulseShape::gaussian(mhz(0.28), 162.5, 62.5);
  CHECK(eval_envelope(g, 162.5) == mhz(0.28));
  const double expected = mhz(0.28) * std::exp(-0.5);
  CHECK(eval_envelope(g, 162.5 + 62.5) == doctest::Approx(expected).epsilon(1e-14));
  CHECK(eval_envelope(g, 162.5 - 62.5) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("smoothed rectangle is flat between slow edges") {
  const auto r = PulseShape::smoothed_rect(mhz(7.0), 0.0, 1000.0, 5.0);
  CHECK(eval_envelope(r, 500.0) == doctest::Approx(mhz(7.0)).epsilon(1e-12));
  CHECK(eval_envelope(r, 0.0) == doctest::Approx(0.5 * mhz(7.0)).epsilon(1e-9));
  CHECK(eval_envelope(r, -200.0) < 1e-12);
  // tails far from both edges stay non-negative
  CHECK(eval_envelope(r, 5000.0) >= 0.0);
  CHECK(eval_envelope(r, -5000.0) >= 0.0);
}

TEST_CASE("zero pulse") {
  CHECK(eval_envelope(PulseShape::none(), 3.0) == 0.0);
  CHECK(eval_derivative(PulseShape::none(), 3.0) == 0.0);
  CHECK(pulse_kind_from_string("none") == PulseKind::zero);
  CHECK_THROWS_AS(pulse_kind_from_string("sawtooth"), std::invalid_argument);
}

TEST_CASE("analytic derivatives match finite differences") {
  const PulseShape shapes[] = {PulseShape::gaussian(1.3, 40.0, 12.0),
                               PulseShape::smoothed_rect(0.7, -10.0, 80.0, 9.0),
                               PulseShape::smoothed_square(0.4, 5.0, 30.0, 2.0)};
  const double h = 1e-3;
  for (const auto& s : shapes)
    for (double t = -40.0; t <= 120.0; t += 0.73) {
      const double fd = (eval_envelope(s, t + h) - eval_envelope(s, t - h)) / (2 * h);
      CHECK(eval_derivative(s, t) == doctest::Approx(fd).epsilon(1e-6).scale(1e-6));
    }
}

TEST_CASE("envelopes are continuous on the grid") {
  const PulseShape shapes[] = {PulseShape::gaussian(1.3, 40.0, 12.0),
                               PulseShape::smoothed_rect(0.7, -10.0, 80.0, 9.0)};
  const double dt = 0.1;
  for (const auto& s : shapes) {
    double max_rate = 0.0, max_jump = 0.0;
    for (double t = -50.0; t <= 150.0; t += dt / 10) max_rate = std::max(max_rate, std::abs(eval_derivative(s, t)));
    for (double t = -50.0; t <= 150.0; t += dt)
      max_jump = std::max(max_jump, std::abs(eval_envelope(s, t + dt) - eval_envelope(s, t)));
    CHECK(max_jump <= dt * max_rate * (1.0 + 1e-9));
  }
}

TEST_CASE("mixing angle limits") {
  CHECK(mixing_angle(0.0, 1.0, 500) == 0.0);
  CHECK(mixing_angle(1.0, 0.0, 500) == doctest::Approx(std::numbers::pi / 2));
  CHECK(mixing_angle(1.0, std::sqrt(500.0), 500) == doctest::Approx(std::numbers::pi / 4));
  CHECK_THROWS_AS(mixing_angle(0.0, 0.0, 500), std::domain_error);
}

TEST_CASE("CD vanishes for a constant mixing angle") {
  PulseSet ps;
  ps.cd_enabled = true;
  ps.probe = PulseShape::gaussian(mhz(0.28), 100.0, 30.0);
  ps.control = PulseShape::gaussian(mhz(7.0), 100.0, 30.0);
  for (double t = 0.0; t <= 200.0; t += 3.7) CHECK(std::abs(cd_rabi(ps, 500, t)) < 1e-15);
}

TEST_CASE("CD vanishes at simultaneous extrema") {
  PulseSet ps;
  ps.cd_enabled = true;
  ps.probe = PulseShape::gaussian(mhz(0.28), 100.0, 20.0);
  ps.control = PulseShape::gaussian(mhz(7.0), 100.0, 55.0);
  CHECK(cd_rabi(ps, 500, 100.0) == 0.0);
}

TEST_CASE("CD is the mixing-angle rate times the gain") {
  const int N = 500;
  for (double gain : {1.0, 2.0}) {
    const PulseSet ps = fig2e_pair(gain);
    auto theta = [&](double t) { return mixing_angle(ps.probe_at(t), ps.control_at(t), N); };
    const double h = 1e-3;
    for (double t = -50.0; t <= 325.0; t += 2.5) {
      const double fd = (theta(t + h) - theta(t - h)) / (2 * h);
      const double rate = mixing_angle_rate(ps, N, t).rabi;
      CAPTURE(t);
      CHECK(close_rel(rate, fd, 1e-6));
      CHECK(cd_rabi(ps, N, t) == doctest::Approx(gain * rate).epsilon(1e-15));
    }
  }
}

TEST_CASE("integrated CD equals the mixing-angle change") {
  const int N = 500;
  const PulseSet ps = fig2e_pair(1.0);
  const double t0 = -50.0, t1 = 325.0;
  const double integral = simpson([&](double t) { return cd_rabi(ps, N, t); }, t0, t1, 20000);
  const double dtheta = mixing_angle(ps.probe_at(t1), ps.control_at(t1), N) -
                        mixing_angle(ps.probe_at(t0), ps.control_at(t0), N);
  CHECK(integral == doctest::Approx(dtheta).epsilon(1e-9));
}

TEST_CASE("CD with both fields zero is flagged and zero") {
  PulseSet ps;
  ps.cd_enabled = true;
  const CdEvaluation e = evaluate_cd(ps, 500, 10.0);
  CHECK(e.degenerate);
  CHECK(e.rabi == 0.0);
}

TEST_CASE("write-stage gating") {
  ScenarioConfig c = gaussian_pair_storage(250.0, true);
  const PulseSet ps = c.pulse_set();
  CHECK(cd_rabi(ps, 500, 249.0) != 0.0);
  CHECK(cd_rabi(ps, 500, 251.0) == 0.0);
  CHECK(ps.write_control_at(251.0) == 0.0);
  // readout reaches its plateau
  CHECK(ps.control_at(c.readout_on() + 10 * c.protocol.readout_rise) ==
        doctest::Approx(c.control.peak).epsilon(1e-9));
  CHECK(ps.control_at(c.readout_on()) == doctest::Approx(0.5 * c.control.peak).epsilon(1e-12));
}

TEST_CASE("raman amplitude map") {
  const double delta = mhz(1e4);
  const RamanSample zero = raman_map(0.0, delta);
  CHECK(zero.aux_probe == 0.0);
  CHECK(zero.aux_control == cplx(0.0));

  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.05);
  for (int i = 0; i < 200; ++i) {
    const double cd = n(rng);
    const RamanSample s = raman_map(cd, delta);
    CHECK(std::abs(s.aux_probe * s.aux_control) / (4 * delta) ==
          doctest::Approx(std::abs(cd) / 2).epsilon(1e-13));
    CHECK(s.aux_probe * s.aux_probe == doctest::Approx(std::norm(s.aux_control)).epsilon(1e-15));
    CHECK(s.aux_probe * s.aux_probe == doctest::Approx(2 * delta * std::abs(cd)).epsilon(1e-15));
  }
  const RamanSample s = raman_map(mhz(1.0), delta);
  CHECK(units::rad_per_ns_to_mhz(s.aux_probe) == doctest::Approx(141.42).epsilon(1e-4));
  CHECK_THROWS_AS(raman_map(0.1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(raman_map(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("stark shifts") {
  const StarkShifts z = stark_terms(0.0);
  CHECK(z.ground == 0.0);
  CHECK(z.rydberg == 0.0);
  CHECK(z.excited == 0.0);
  for (double cd : {-0.3, 0.01, 0.2}) {
    const StarkShifts s = stark_terms(cd);
    CHECK(s.ground - s.rydberg == 0.0);
    CHECK(s.ground == doctest::Approx(std::abs(cd) / 2));
  }
  CHECK(units::rad_per_ns_to_mhz(stark_terms(mhz(2.0)).excited) == doctest::Approx(-2.0));
}

}  // TEST_SUITE
