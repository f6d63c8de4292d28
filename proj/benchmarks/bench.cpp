#include <benchmark/benchmark.h>

#include <random>

#include "rydmem/collective.hpp"
#include "rydmem/maxwell_bloch.hpp"
#include "rydmem/multiexcitation.hpp"
#include "rydmem/presets.hpp"

using namespace rydmem;

namespace {

template <int D>
MatrixC<D> some_rho() {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n;
  MatrixC<D> a;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) a(i, j) = cplx(n(rng), n(rng));
  MatrixC<D> r = a * a.adjoint();
  return r / r.trace();
}

void BM_obe_rhs(benchmark::State& st) {
  const ScenarioConfig c = validate(find_preset("fig3c").variants[0].config);
  const ObeParams p = obe_params(c);
  const Matrix3 rho = some_rho<3>();
  for (auto _ : st) benchmark::DoNotOptimize(obe_rhs(rho, 0.002, 0.04, 0.01, 30.0, 900.0, p));
}
BENCHMARK(BM_obe_rhs);

void BM_lindblad6_rhs(benchmark::State& st) {
  const Matrix6 rho = some_rho<6>();
  const Matrix6 h = build_h_t(0.002, 0.04, 0.01, 500, BlockadeParams{0.3, 0.0314});
  for (auto _ : st) benchmark::DoNotOptimize(lindblad6_rhs(rho, h, 0.037, 6e-5));
}
BENCHMARK(BM_lindblad6_rhs);

void BM_population_fig2f(benchmark::State& st) {
  const ScenarioConfig c = validate(find_preset("fig2f").variants[0].config);
  for (auto _ : st) benchmark::DoNotOptimize(run_population3(c).final_p_r());
}
BENCHMARK(BM_population_fig2f)->Unit(benchmark::kMillisecond);

void BM_storage_fig3c(benchmark::State& st) {
  ScenarioConfig c = find_preset("fig3c").variants[0].config;
  c.grid.n_z = static_cast<int>(st.range(0));
  c = validate(c);
  for (auto _ : st) benchmark::DoNotOptimize(run_storage_retrieval(c).efficiency);
}
BENCHMARK(BM_storage_fig3c)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
