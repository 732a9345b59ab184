#include <benchmark/benchmark.h>

#include "qbm/bath_kernel.hpp"
#include "qbm/classical_dynamics.hpp"
#include "qbm/heisenberg_commutator.hpp"
#include "qbm/kubo_solver.hpp"
#include "qbm/noise_sampler.hpp"

namespace {

qbm::BathSpec drude_bath() {
    qbm::BathSpec b;
    b.gamma = 0.1;
    b.temperature = 2.0;
    b.cutoff = qbm::DrudeCutoff{10.0};
    return b;
}

void BM_TabulateKernel(benchmark::State& state) {
    const auto bath = drude_bath();
    for (auto _ : state) benchmark::DoNotOptimize(qbm::tabulate_kernel(bath, 0.01, static_cast<int>(state.range(0))));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TabulateKernel)->Arg(256)->Arg(1024);

void BM_SampleCirculant(benchmark::State& state) {
    qbm::EnsembleSpec e;
    e.n_realizations = 1;
    const qbm::NoiseSampler sampler(drude_bath(), 0.01, static_cast<int>(state.range(0)), e);
    for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(0));
}
BENCHMARK(BM_SampleCirculant)->Arg(1024)->Arg(8192);

void BM_SampleSpectral(benchmark::State& state) {
    qbm::EnsembleSpec e;
    e.n_realizations = 1;
    e.method = qbm::SamplingMethod::SpectralSynthesis;
    const qbm::NoiseSampler sampler(drude_bath(), 0.01, static_cast<int>(state.range(0)), e);
    for (auto _ : state) benchmark::DoNotOptimize(sampler.sample(0));
}
BENCHMARK(BM_SampleSpectral)->Arg(1024);

void BM_ClassicalIntegrate(benchmark::State& state) {
    qbm::SystemSpec system;
    const qbm::NoisePath noise{0.01, std::vector<double>(static_cast<std::size_t>(state.range(0)), 0.1)};
    for (auto _ : state) benchmark::DoNotOptimize(qbm::integrate(system, drude_bath(), noise, 1.0, 0.0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClassicalIntegrate)->Arg(100000);

void BM_KuboSteps(benchmark::State& state) {
    qbm::SystemSpec system;
    const int dim = static_cast<int>(state.range(0));
    const auto ops = qbm::build_operators(system, 1.0, dim);
    const auto rho0 = qbm::initial_density(ops, qbm::CoherentState{{1.0, 0.0}});
    const qbm::NoisePath noise{0.01, std::vector<double>(101, 0.1)};
    qbm::KuboOptions options;
    options.record_every = 100;
    options.store_snapshots = false;
    for (auto _ : state) benchmark::DoNotOptimize(qbm::evolve_noisy(rho0, ops, drude_bath(), noise, options));
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_KuboSteps)->Arg(16)->Arg(32)->Arg(64);

void BM_CommutatorTrace(benchmark::State& state) {
    qbm::SystemSpec system;
    qbm::BathSpec bath;
    bath.gamma = 0.5;
    bath.cutoff = qbm::HardCutoff{200.0};
    const auto modes = qbm::ModeBath::uniform(bath, static_cast<int>(state.range(0)));
    const auto times = qbm::uniform_times(5.0, 101);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            qbm::commutator_trace_with(system, bath, modes, times, qbm::NoiseAlgebra::Quantum));
}
BENCHMARK(BM_CommutatorTrace)->Arg(20000);

} // namespace

BENCHMARK_MAIN();
