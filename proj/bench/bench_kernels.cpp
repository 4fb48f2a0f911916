#include <benchmark/benchmark.h>

#include <map>

#include "vlab/occupation.hpp"
#include "vlab/pathsim.hpp"

namespace {

const vlab::PathSimulator& simulator(std::size_t steps) {
  static std::map<std::size_t, vlab::PathSimulator> cache;
  auto it = cache.find(steps);
  if (it == cache.end())
    it = cache
             .emplace(steps, vlab::PathSimulator(vlab::VolterraKernel::fractional_rl(0.4, 1.5),
                                                 vlab::LevyModel::stable_iso(1.5), vlab::uniform_grid(1.0, steps)))
             .first;
  return it->second;
}

void BM_EnsembleSerial(benchmark::State& st) {
  const auto& sim = simulator(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(vlab::simulate_ensemble(sim, 1, 64, vlab::Execution::Serial));
  st.SetItemsProcessed(st.iterations() * 64);
}

void BM_EnsembleParallel(benchmark::State& st) {
  const auto& sim = simulator(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(vlab::simulate_ensemble(sim, 1, 64, vlab::Execution::Parallel));
  st.SetItemsProcessed(st.iterations() * 64);
}

void BM_ConvolutionDirect(benchmark::State& st) {
  const auto& sim = simulator(static_cast<std::size_t>(st.range(0)));
  std::uint64_t r = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sim.simulate_with(1, r++, vlab::ConvolutionMethod::Direct));
}

void BM_ConvolutionFFT(benchmark::State& st) {
  const auto& sim = simulator(static_cast<std::size_t>(st.range(0)));
  std::uint64_t r = 0;
  for (auto _ : st) benchmark::DoNotOptimize(sim.simulate_with(1, r++, vlab::ConvolutionMethod::FFT));
}

void BM_OccupationDirect(benchmark::State& st) {
  const auto path = simulator(4096).simulate(1, 0);
  const vlab::FreqLattice lat{1, 0.5, static_cast<int>(st.range(0))};
  for (auto _ : st)
    benchmark::DoNotOptimize(vlab::occupation_fourier(path, 0.0, 1.0, lat, vlab::OccupationMethod::Direct));
}

void BM_OccupationFast(benchmark::State& st) {
  const auto path = simulator(4096).simulate(1, 0);
  const vlab::FreqLattice lat{1, 0.5, static_cast<int>(st.range(0))};
  for (auto _ : st)
    benchmark::DoNotOptimize(vlab::occupation_fourier(path, 0.0, 1.0, lat, vlab::OccupationMethod::Fast));
}

}  // namespace

BENCHMARK(BM_EnsembleSerial)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(1024)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolutionDirect)->Arg(512)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ConvolutionFFT)->Arg(512)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OccupationDirect)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_OccupationFast)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
