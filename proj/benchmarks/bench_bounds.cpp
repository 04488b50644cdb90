#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "qzzb/bound.hpp"
#include "qzzb/noise.hpp"
#include "qzzb/oracle.hpp"
#include "qzzb/probes.hpp"

namespace {

using namespace qzzb;

const SpeedLimitConstants kConst;

void BM_ModeBoundNoon(benchmark::State& state) {
    const auto spec = mode_number_spectrum(noon_state(4), 0);
    QuadratureConfig cfg;
    cfg.intervals = static_cast<std::size_t>(state.range(0));
    const double w = 40.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(qzzb_mode_bound(
            [&](double tau) { return fidelity_from_spectrum(spec, tau); }, w, cfg));
    }
}
BENCHMARK(BM_ModeBoundNoon)->Arg(1024)->Arg(4096)->Arg(16384);

void BM_Variant2Bound(benchmark::State& state) {
    const auto spec = mode_number_spectrum(noon_state(4), 0);
    QuadratureConfig cfg;
    cfg.intervals = 1024;
    for (auto _ : state) {
        benchmark::DoNotOptimize(zzb_variant2_mode_bound(
            [&](double tau) { return fidelity_from_spectrum(spec, tau); }, 40.0, cfg));
    }
}
BENCHMARK(BM_Variant2Bound);

void BM_PhotonLossOptimize(benchmark::State& state) {
    const auto spec = OptimalProbeSpec::make(3, 20);
    const double a2 = spec.alpha * spec.alpha;
    const double mean = a2 * 20.0, var = a2 * (1.0 - a2) * 400.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(photon_loss_optimize(mean, var, 20, 0.55));
    }
}
BENCHMARK(BM_PhotonLossOptimize);

void BM_SqueezedModeStats(benchmark::State& state) {
    const auto modes = state.range(0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(squeezed_mode_stats(modes, 0.8));
    }
}
BENCHMARK(BM_SqueezedModeStats)->Arg(3)->Arg(6)->Arg(11);

void BM_HelstromError(benchmark::State& state) {
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(0x5eedbe7c);
    std::normal_distribution<double> g(0.0, 1.0);
    auto mixed = [&]() {
        MatC m(dim, dim);
        for (auto& x : m.a) x = {g(rng), g(rng)};
        MatC rho = matmul(m, adjoint(m));
        std::complex<double> tr = 0.0;
        for (std::size_t i = 0; i < dim; ++i) tr += rho(i, i);
        for (auto& x : rho.a) x /= tr.real();
        for (std::size_t i = 0; i < dim; ++i) rho(i, i) = rho(i, i).real();
        return oracle::DensityMatrix(std::move(rho));
    };
    const auto r0 = mixed();
    const auto r1 = mixed();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            oracle::helstrom_error(oracle::HypothesisTest(0.5, 0.5, r0, r1)));
    }
}
BENCHMARK(BM_HelstromError)->Arg(8)->Arg(16);

void BM_BlockedSqueezeSim(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle::squeeze_stats_blocked(state.range(0), 0.5));
    }
}
BENCHMARK(BM_BlockedSqueezeSim)->Arg(3)->Arg(6);

} // namespace

BENCHMARK_MAIN();
