#include <complex>

#include <benchmark/benchmark.h>

#include "qnls/banded.hpp"
#include "qnls/evolution.hpp"

namespace {

using namespace qnls;

GridPtr bench_grid(bool cylindrical, int n) {
  return cylindrical ? SymmetryGrid::cylindrical(4, 10.0, n, 10.0, n / 2) : SymmetryGrid::radial(4, 16.0, n);
}

void BM_Step(benchmark::State& st) {
  const auto s0 = gaussian_pair(bench_grid(st.range(0) != 0, static_cast<int>(st.range(1))), 1.0, 2.0, 1.0, 1.0, 0.3);
  SystemState s = s0;
  for (auto _ : st) {
    s = step(s, 1e-4);
    benchmark::DoNotOptimize(s.u.data());
  }
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(s0.u.size()));
}
BENCHMARK(BM_Step)->Args({0, 1024})->Args({0, 4096})->Args({1, 128})->Args({1, 256})->Unit(benchmark::kMicrosecond);

void BM_NonlinearSubstep(benchmark::State& st) {
  SystemState s = gaussian_pair(bench_grid(false, static_cast<int>(st.range(0))), 1.0, 2.0, 1.0, 1.0, 0.3);
  for (auto _ : st) {
    nonlinear_substep(s, 1e-6);
    benchmark::DoNotOptimize(s.v.data());
  }
}
BENCHMARK(BM_NonlinearSubstep)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

void BM_Laplacian(benchmark::State& st) {
  const auto s = gaussian_pair(bench_grid(st.range(0) != 0, static_cast<int>(st.range(1))), 1.0, 2.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(apply_laplacian(*s.grid, s.u));
}
BENCHMARK(BM_Laplacian)->Args({0, 4096})->Args({1, 256})->Unit(benchmark::kMicrosecond);

void BM_Functionals(benchmark::State& st) {
  const auto s = gaussian_pair(bench_grid(false, static_cast<int>(st.range(0))), 1.0, 2.0, 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_functionals(s));
}
BENCHMARK(BM_Functionals)->Arg(1024)->Arg(4096)->Unit(benchmark::kMicrosecond);

void BM_VirialAssembly(benchmark::State& st) {
  const bool cyl = st.range(0) != 0;
  const auto s = gaussian_pair(bench_grid(cyl, static_cast<int>(st.range(1))), 1.0, 1.5, 0.75, 2.0);
  const auto p = cyl ? cutoff::CutoffProfile::cylindrical(2.0) : cutoff::CutoffProfile::radial(2.0);
  for (auto _ : st) benchmark::DoNotOptimize(ddt_m_phi_exact(s, p));
}
BENCHMARK(BM_VirialAssembly)->Args({0, 1024})->Args({1, 256})->Unit(benchmark::kMicrosecond);

// Crank-Nicolson-shaped banded system: identity plus a scaled pentadiagonal stiffness.
void BM_BandedSolve(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  BandedLU<std::complex<double>> lu(n, 2, 2);
  const std::complex<double> a(0.0, 0.5);
  const double k[5] = {1.0 / 12, -4.0 / 3, 2.5, -4.0 / 3, 1.0 / 12};
  for (int i = 0; i < n; ++i)
    for (int o = -2; o <= 2; ++o)
      if (i + o >= 0 && i + o < n) lu.at(i, i + o) = (o == 0 ? 1.0 : 0.0) + a * k[o + 2];
  lu.factorize();
  std::vector<std::complex<double>> b(static_cast<std::size_t>(n), 1.0);
  for (auto _ : st) {
    lu.solve(b.data());
    benchmark::DoNotOptimize(b.data());
  }
}
BENCHMARK(BM_BandedSolve)->Arg(1024)->Arg(16384)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
