#include <benchmark/benchmark.h>

#include <filesystem>
#include <unistd.h>

#include "textchar/ingestion.hpp"
#include "textchar/metrics.hpp"
#include "textchar/simulation.hpp"

using namespace textchar;

namespace {

EmbeddedCluster blob(std::size_t m, std::size_t dim) {
    BlobSpec spec;
    spec.count = m;
    spec.dim = dim;
    spec.seed = 42;
    return gaussian_blob(spec);
}

void bm_axis_stats(benchmark::State& state) {
    const auto c = blob(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(axis_stats(c));
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}
BENCHMARK(bm_axis_stats)->Args({10000, 2})->Args({10000, 768})->Unit(benchmark::kMillisecond);

void bm_homogeneity(benchmark::State& state) {
    const auto c = blob(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    for (auto _ : state) benchmark::DoNotOptimize(homogeneity(c, static_cast<std::size_t>(state.range(2))));
    const auto m = state.range(0);
    state.SetItemsProcessed(state.iterations() * m * (m - 1) / 2);
    state.SetLabel("pairs");
}
BENCHMARK(bm_homogeneity)
    ->Args({500, 2, 1})
    ->Args({2000, 2, 1})
    ->Args({2000, 768, 1})
    ->Args({2000, 768, 0})
    ->Unit(benchmark::kMillisecond);

void bm_gaussian_blob(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(blob(10000, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(bm_gaussian_blob)->Arg(2)->Arg(768)->Unit(benchmark::kMillisecond);

void bm_binary_round_trip(benchmark::State& state) {
    const auto c = blob(2000, 768);
    LabeledEmbeddings data;
    data.dim = c.dim();
    for (std::size_t i = 0; i < c.size(); ++i) {
        data.records.push_back({"r" + std::to_string(i), "a", "default", {c.row(i).begin(), c.row(i).end()}});
    }
    const auto path = std::filesystem::temp_directory_path() / ("textchar_bench_" + std::to_string(::getpid()) + ".bin");
    for (auto _ : state) {
        write_vectors(data, path, VectorFormat::binary);
        benchmark::DoNotOptimize(read_vectors(path, VectorFormat::binary));
    }
    std::filesystem::remove(path);
    std::filesystem::remove(binary_sidecar_path(path));
}
BENCHMARK(bm_binary_round_trip)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
