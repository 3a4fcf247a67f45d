#include <benchmark/benchmark.h>

#include <numbers>

#include "spintomo/fringe.hpp"
#include "spintomo/optics.hpp"
#include "spintomo/random.hpp"
#include "spintomo/source.hpp"
#include "spintomo/tomography.hpp"

namespace {

using namespace spintomo;

constexpr double kPi = std::numbers::pi;

ProbabilityTable sample_table() {
    const DensityMatrix rho = noisy_state(input_state(0.024), 0.98);
    return predicted_table(rho.matrix(), five_directions());
}

void BM_EigenvaluesHermitian(benchmark::State& state) {
    const Mat3 rho = noisy_state(input_state(0.1), 0.9).matrix();
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigenvalues_hermitian(rho));
    }
}
BENCHMARK(BM_EigenvaluesHermitian);

void BM_PredictedTable(benchmark::State& state) {
    const Mat3 rho = noisy_state(input_state(0.024), 0.98).matrix();
    for (auto _ : state) {
        benchmark::DoNotOptimize(predicted_table(rho, five_directions()));
    }
}
BENCHMARK(BM_PredictedTable);

void BM_LinearInversion(benchmark::State& state) {
    const ProbabilityTable table = sample_table();
    for (auto _ : state) {
        benchmark::DoNotOptimize(linear_inversion(table));
    }
}
BENCHMARK(BM_LinearInversion);

void BM_MleReconstruct(benchmark::State& state) {
    const CountRecord counts = counts_from_table(sample_table(), 1e4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(mle_reconstruct(counts));
    }
}
BENCHMARK(BM_MleReconstruct);

void BM_SimulateFringe(benchmark::State& state) {
    std::vector<double> phis(static_cast<std::size_t>(state.range(0)));
    for (std::size_t i = 0; i < phis.size(); ++i) {
        phis[i] = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(phis.size());
    }
    const SourceParams params(0.024, 0.98);
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_fringe(params, kPi / 2.0, phis));
    }
}
BENCHMARK(BM_SimulateFringe)->Arg(50)->Arg(500);

void BM_FitFringe(benchmark::State& state) {
    std::vector<double> phis(50);
    for (std::size_t i = 0; i < phis.size(); ++i) {
        phis[i] = 2.0 * kPi * static_cast<double>(i) / 50.0;
    }
    const FringeProbabilities probs =
        simulate_fringe(SourceParams(0.024, 0.98), kPi / 2.0, phis);
    Rng rng(1);
    const FringeCounts counts = synthesize_counts(probs, {14830.0, 10535.0, 8353.0}, rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_fringe(counts));
    }
}
BENCHMARK(BM_FitFringe);

void BM_DirectionToSettings(benchmark::State& state) {
    const SpinDirection n = SpinDirection::normalized({0.3, -0.5, 0.81});
    for (auto _ : state) {
        benchmark::DoNotOptimize(direction_to_settings(n));
    }
}
BENCHMARK(BM_DirectionToSettings);

void BM_PoissonLargeMean(benchmark::State& state) {
    Rng rng(7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(rng.poisson(14830.0));
    }
}
BENCHMARK(BM_PoissonLargeMean);

} // namespace

BENCHMARK_MAIN();
