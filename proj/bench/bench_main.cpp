#include <benchmark/benchmark.h>

#include "patrol/crime.hpp"
#include "patrol/index.hpp"
#include "patrol/relaxed.hpp"
#include "patrol/simulator.hpp"

namespace {

const patrol::CrimeCase& case_i() {
    static const patrol::CrimeCase c = patrol::build_case(6, 1);
    return c;
}

const patrol::CrimeCase& case_iii() {
    static const patrol::CrimeCase c = patrol::build_case(14, 1);
    return c;
}

const patrol::DualSolution& dual_i() {
    static const patrol::DualSolution d = [] {
        patrol::SolverOptions opt;
        opt.max_iters = 2000;
        return patrol::maximize_dual(case_i().instance, opt);
    }();
    return d;
}

void BM_DualValueSerial(benchmark::State& state) {
    const auto& inst = case_iii().instance;
    const patrol::Multipliers gamma(inst.areas(), inst.types, inst.horizon, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(patrol::dual_value_serial(inst, gamma).value);
}

void BM_DualValueParallel(benchmark::State& state) {
    const auto& inst = case_iii().instance;
    const patrol::Multipliers gamma(inst.areas(), inst.types, inst.horizon, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(patrol::dual_value(inst, gamma).value);
}

void BM_MonteCarloSerial(benchmark::State& state) {
    const auto& inst = case_i().instance;
    const patrol::IndexTable indices = patrol::compute_indices(inst, dual_i());
    const patrol::SolvedArtifacts artifacts{&indices};
    const int h = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            patrol::monte_carlo_serial(inst, h, patrol::PolicyKind::mai, artifacts, 50, 7, 1.0).summary.mean);
}

void BM_MonteCarloParallel(benchmark::State& state) {
    const auto& inst = case_i().instance;
    const patrol::IndexTable indices = patrol::compute_indices(inst, dual_i());
    const patrol::SolvedArtifacts artifacts{&indices};
    const int h = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            patrol::monte_carlo(inst, h, patrol::PolicyKind::mai, artifacts, 50, 7, 1.0).summary.mean);
}

}  // namespace

BENCHMARK(BM_DualValueSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DualValueParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloSerial)->Arg(5)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(5)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
