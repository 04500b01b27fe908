// bench_core.cpp — microbenchmarks for the hot numerical kernels

#include "rabiqpt/analysis.hpp"
#include "rabiqpt/dynamics.hpp"
#include "rabiqpt/model.hpp"
#include "rabiqpt/tomography.hpp"

#include <benchmark/benchmark.h>

using namespace rabiqpt;

namespace {

EffectiveParams mid_quench() { return schedule_at(QuenchSchedule{}, us(2.0)); }

void BM_Expm(benchmark::State& state) {
    const FockSpace s(static_cast<int>(state.range(0)));
    const Matrix h = effective_rabi_hamiltonian(mid_quench(), s) * cd{0.0, -ns(1.0)};
    for (auto _ : state) benchmark::DoNotOptimize(expm(h));
}
BENCHMARK(BM_Expm)->Arg(20)->Arg(40)->Arg(60)->Unit(benchmark::kMicrosecond);

void BM_LindbladRhs(benchmark::State& state) {
    const FockSpace s(static_cast<int>(state.range(0)));
    const Matrix h = effective_rabi_hamiltonian(mid_quench(), s);
    const LindbladSpec l = effective_frame_channels(DecoherenceRates{}, s);
    const int dim = 2 * s.cutoff();
    const Matrix rho = Matrix::Identity(dim, dim) / cd{static_cast<double>(dim), 0.0};
    for (auto _ : state) benchmark::DoNotOptimize(lindblad_rhs(h, l, rho));
}
BENCHMARK(BM_LindbladRhs)->Arg(20)->Arg(40)->Arg(50)->Unit(benchmark::kMicrosecond);

void BM_WignerGrid(benchmark::State& state) {
    const FockSpace s(30);
    const Matrix rho = ket_to_density((coherent_state(2.0, s) + coherent_state(-2.0, s)).normalized());
    const PhaseGrid grid = PhaseGrid::square(4.0, static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(wigner_direct(rho, grid));
}
BENCHMARK(BM_WignerGrid)->Arg(21)->Arg(41)->Unit(benchmark::kMillisecond);

void BM_PhotonFit(benchmark::State& state) {
    FitConfig cfg;
    PhotonDistribution pd;
    pd.probs = {0.3, 0.25, 0.2, 0.1, 0.08, 0.05, 0.02};
    const RabiSignal sig = synthesize_rabi_signal(pd, cfg, rabi_taus(cfg, 16.0, 480));
    cfg.n_max = 8;
    for (auto _ : state) benchmark::DoNotOptimize(fit_photon_distribution(sig, cfg));
}
BENCHMARK(BM_PhotonFit)->Unit(benchmark::kMillisecond);

void BM_Reconstruction(benchmark::State& state) {
    const FockSpace s(15);
    const Matrix rho = ket_to_density((coherent_state(1.5, s) + coherent_state(-1.5, s)).normalized());
    const WignerGrid w = wigner_direct(rho, PhaseGrid::for_mean_photon_number(2.25));
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct_density(w, 15));
}
BENCHMARK(BM_Reconstruction)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
