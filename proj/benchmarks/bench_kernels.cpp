#include <benchmark/benchmark.h>

#include <cmath>

#include "gausspurify/channels.hpp"
#include "gausspurify/fock.hpp"
#include "gausspurify/oracle.hpp"
#include "gausspurify/risk.hpp"
#include "gausspurify/sweep.hpp"

using namespace gausspurify;

static void BM_DisplacementElement(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    ComplexAmplitude alpha(1.1, -0.4);
    for (auto _ : state) benchmark::DoNotOptimize(displacement_matrix_element(n + 3, n, alpha));
}
BENCHMARK(BM_DisplacementElement)->Arg(0)->Arg(50)->Arg(300);

static void BM_AttenuateThermal(benchmark::State& state) {
    auto in = thermal_state(ThermalParam(0.8), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(attenuate_kernel(0.6, in));
}
BENCHMARK(BM_AttenuateThermal)->Arg(60)->Arg(200)->Arg(1000);

static void BM_AmplifyThermal(benchmark::State& state) {
    auto in = thermal_state(ThermalParam(0.4), static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(amplify_kernel(1.5, in));
}
BENCHMARK(BM_AmplifyThermal)->Arg(40)->Arg(120);

static void BM_QuantumRisk(benchmark::State& state) {
    double k = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(quantum_minimax_risk(0.8, 0.4, k, ChannelKind::attenuate));
        k = k < 0.99 ? k + 1e-4 : 0.5;
    }
}
BENCHMARK(BM_QuantumRisk);

static void BM_ClassicalRisk(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(classical_minimax_risk(1.0, 1.0, std::sqrt(2.0)));
}
BENCHMARK(BM_ClassicalRisk);

static void BM_ProductRisk(benchmark::State& state) {
    auto q = QubitScenario::with_k(1.0 / 3.0, 2.4, 0.8);
    for (auto _ : state) benchmark::DoNotOptimize(combined_risk(q));
}
BENCHMARK(BM_ProductRisk)->Unit(benchmark::kMillisecond);

static void BM_SimulateAttenuator(benchmark::State& state) {
    auto in = thermal_state(ThermalParam(0.5), 45);
    for (auto _ : state) {
        TwoModeSimulator sim(ChannelKind::attenuate, 0.5);
        benchmark::DoNotOptimize(simulate_channel(sim, in, AncillaCandidate::vacuum(), 60));
    }
}
BENCHMARK(BM_SimulateAttenuator)->Unit(benchmark::kMillisecond);

static void BM_SimulateAmplifier(benchmark::State& state) {
    auto in = thermal_state(ThermalParam(0.2), 20);
    for (auto _ : state) {
        TwoModeSimulator sim(ChannelKind::amplify, 1.2);
        benchmark::DoNotOptimize(simulate_channel(sim, in, AncillaCandidate::vacuum(), 60));
    }
}
BENCHMARK(BM_SimulateAmplifier)->Unit(benchmark::kMillisecond);

static void BM_Sweep(benchmark::State& state) {
    auto config = SweepConfig::defaults(SweepTarget::fig6a);
    config.threads = static_cast<unsigned>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(run_sweep(config));
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
