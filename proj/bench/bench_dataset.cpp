#include <benchmark/benchmark.h>

#include "modrec/experiment.hpp"

namespace {

modrec::ExperimentConfig bench_config(std::size_t n_per_modulation) {
    auto c = modrec::ExperimentConfig::from_preset(modrec::Preset::Ci);
    c.n_per_modulation = n_per_modulation;
    c.n_symbols = 600;
    c.training_sizes = {1};
    c.master_seed = 1;
    return c;
}

void BM_DatasetSerial(benchmark::State& state) {
    const auto c = bench_config(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(modrec::generate_dataset_serial(c, 5.0));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 7);
}

void BM_DatasetParallel(benchmark::State& state) {
    const auto c = bench_config(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(modrec::generate_dataset(c, 5.0));
    state.SetItemsProcessed(state.iterations() * state.range(0) * 7);
}

void BM_Features(benchmark::State& state) {
    const modrec::RealizationSpec spec{modrec::Modulation::QAM16, 600, 6, 0.5, 5.0, 0.0, 7};
    const auto r = modrec::synthesize_realization(spec);
    for (auto _ : state) benchmark::DoNotOptimize(modrec::extract_features(r.samples));
}

}  // namespace

BENCHMARK(BM_DatasetSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DatasetParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Features)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
