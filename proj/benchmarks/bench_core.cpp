#include <benchmark/benchmark.h>

#include "stomod/fourier_solver.hpp"
#include "stomod/oracle.hpp"
#include "stomod/spectrum.hpp"
#include "stomod/units.hpp"

using namespace stomod;

namespace {

OperatingPoint op2() {
    DeviceParams p;
    p.xi = 1.8;
    return derive_operating_point(p);
}

void BM_SolveMatrix(benchmark::State& state) {
    const auto op = op2();
    const ModulationConfig mod{0.05, to_rad_s(100e6), static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(solve_coefficients_matrix(op, mod));
}
BENCHMARK(BM_SolveMatrix)->Arg(5)->Arg(10)->Arg(20)->Arg(80);

void BM_SolveRecursive(benchmark::State& state) {
    const auto op = op2();
    const ModulationConfig mod{0.05, to_rad_s(100e6), static_cast<int>(state.range(0))};
    for (auto _ : state) benchmark::DoNotOptimize(solve_coefficients_recursive(op, mod));
}
BENCHMARK(BM_SolveRecursive)->Arg(10)->Arg(80);

void BM_BackSolve(benchmark::State& state) {
    const auto op = op2();
    for (auto _ : state) benchmark::DoNotOptimize(mu_for_modulation_index(op, to_rad_s(100e6), 10, 1.5));
}
BENCHMARK(BM_BackSolve);

void BM_PsdAnalytic(benchmark::State& state) {
    const auto sol = solve_coefficients_matrix(op2(), {0.2, to_rad_s(100e6), 10});
    const int j_max = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(psd_analytic(sol, j_max, 40));
}
BENCHMARK(BM_PsdAnalytic)->Arg(10)->Arg(30);

void BM_PsdFft(benchmark::State& state) {
    const auto sol = solve_coefficients_matrix(op2(), {0.2, to_rad_s(100e6), 10});
    const auto trace = synthesize_time_trace(sol, 256, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(psd_fft(trace, 40));
}
BENCHMARK(BM_PsdFft)->Arg(8)->Arg(64);

void BM_Integrate(benchmark::State& state) {
    const auto op = op2();
    const ModulationConfig mod{0.05, to_rad_s(100e6), 10};
    const auto icfg = make_integration_config(op, mod, 1024, 1);
    for (auto _ : state) benchmark::DoNotOptimize(integrate(op, mod, icfg));
}
BENCHMARK(BM_Integrate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
