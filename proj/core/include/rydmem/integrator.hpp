#pragma once

// Fixed-step RK4 time grids and density-matrix invariant bookkeeping.

#include <iomanip>
#include <sstream>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "rydmem/errors.hpp"

namespace rydmem {

using cplx = std::complex<double>;
template <int D>
using MatrixC = Eigen::Matrix<cplx, D, D>;
template <int D>
using VectorC = Eigen::Matrix<cplx, D, 1>;

/// Piecewise-uniform time grid. Each segment is split into an integer number
/// of equal steps no longer than its nominal dt, so segment edges are hit
/// exactly.
class TimeGrid {
 public:
  TimeGrid() = default;
  static TimeGrid uniform(double t0, double t1, double dt);

  /// Appends [back(), t1] with nominal step dt.
  void extend(double t1, double dt);

  const std::vector<double>& points() const { return points_; }
  std::size_t steps() const { return points_.empty() ? 0 : points_.size() - 1; }
  double start() const { return points_.front(); }
  double end() const { return points_.back(); }

 private:
  std::vector<double> points_;
};

namespace detail {
inline std::string sci(double v) {
  std::ostringstream os;
  os << std::scientific << std::setprecision(3) << v;
  return os.str();
}
}  // namespace detail

/// Tolerances shared by every engine.
struct InvariantTolerances {
  double trace_per_kilostep = 1e-9;
  double hermiticity = 1e-10;
  double min_eigenvalue = -1e-8;
};

struct InvariantSummary {
  double max_trace_error = 0.0;
  double max_hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  long steps = 0;
  long eigen_checks = 0;

  void merge(const InvariantSummary& o) {
    max_trace_error = std::max(max_trace_error, o.max_trace_error);
    max_hermiticity_error = std::max(max_hermiticity_error, o.max_hermiticity_error);
    min_eigenvalue = std::min(min_eigenvalue, o.min_eigenvalue);
    steps = std::max(steps, o.steps);
    eigen_checks += o.eigen_checks;
  }
};

/// Trace and hermiticity check; throws InvariantError on breach.
template <int D>
void check_step(const MatrixC<D>& rho, long step, double t, double z, InvariantSummary& s,
                const InvariantTolerances& tol = {}) {
  const double tr_err = std::abs(rho.trace() - cplx(1.0));
  double herm = 0.0;
  for (int i = 0; i < D; ++i)
    for (int j = i; j < D; ++j) herm = std::max(herm, std::abs(rho(i, j) - std::conj(rho(j, i))));
  s.max_trace_error = std::max(s.max_trace_error, tr_err);
  s.max_hermiticity_error = std::max(s.max_hermiticity_error, herm);
  s.steps = std::max(s.steps, step);
  const double allowed = tol.trace_per_kilostep * std::max(1.0, static_cast<double>(step) / 1000.0);
  if (!(tr_err <= allowed))
    throw InvariantError("trace drift " + detail::sci(tr_err) + " exceeds tolerance", step, t, z);
  if (!(herm <= tol.hermiticity))
    throw InvariantError("hermiticity error " + detail::sci(herm) + " exceeds tolerance", step,
                         t, z);
}

/// Positivity check (eigen-decomposition); throws InvariantError on breach.
template <int D>
void check_positive(const MatrixC<D>& rho, long step, double t, double z, InvariantSummary& s,
                    const InvariantTolerances& tol = {}) {
  MatrixC<D> h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixC<D>> es(h, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  s.min_eigenvalue = std::min(s.min_eigenvalue, lo);
  ++s.eigen_checks;
  if (!(lo >= tol.min_eigenvalue))
    throw InvariantError("negative eigenvalue " + detail::sci(lo), step, t, z);
}

/// One classical RK4 step of dy/dt = f(t, y) for any Eigen-like state.
template <class State, class F>
State rk4_step(const F& f, double t, const State& y, double dt) {
  const State k1 = f(t, y);
  const State k2 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k1));
  const State k3 = f(t + 0.5 * dt, State(y + (0.5 * dt) * k2));
  const State k4 = f(t + dt, State(y + dt * k3));
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Decides when a sample is stored, given a minimum spacing (0 = every step).
class Recorder {
 public:
  explicit Recorder(double interval) : interval_(interval) {}
  bool due(double t, bool last) {
    const double eps = 1e-9 * interval_;
    if (first_) {
      first_ = false;
      next_ = t + interval_;
      return true;
    }
    if (interval_ <= 0.0 || last) return true;
    if (t < next_ - eps) return false;
    while (next_ <= t + eps) next_ += interval_;
    return true;
  }

 private:
  double interval_;
  double next_ = 0.0;
  bool first_ = true;
};

}  // namespace rydmem
