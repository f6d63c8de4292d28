#pragma once

#include <cmath>
#include <random>

#include "rydmem/integrator.hpp"

namespace testing {

using rydmem::cplx;

inline bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}

/// Random density matrix: A A^dagger / tr.
template <int D>
rydmem::MatrixC<D> random_rho(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  rydmem::MatrixC<D> a;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) a(i, j) = cplx(n(rng), n(rng));
  rydmem::MatrixC<D> r = a * a.adjoint();
  return r / r.trace();
}

inline cplx random_c(std::mt19937_64& rng, double scale) {
  std::normal_distribution<double> n(0.0, scale);
  return {n(rng), n(rng)};
}

}  // namespace testing
