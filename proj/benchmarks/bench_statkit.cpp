#include <benchmark/benchmark.h>

#include "simaudit/rng.hpp"
#include "simaudit/statkit.hpp"

using namespace simaudit;
using namespace simaudit::stats;

namespace {

std::vector<Sample> make_groups(int k, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Sample> groups(k);
    for (auto& g : groups) {
        g.values.reserve(n);
        for (int i = 0; i < n; ++i) g.values.push_back(rng.next_normal());
    }
    return groups;
}

}  // namespace

static void BM_KruskalWallis(benchmark::State& state) {
    const auto groups = make_groups(5, static_cast<int>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(kruskal_wallis(groups));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KruskalWallis)->Range(256, 1 << 14)->Complexity();

static void BM_CliffsDelta(benchmark::State& state) {
    const auto groups = make_groups(2, static_cast<int>(state.range(0)), 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cliffs_delta(groups[0], groups[1]));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CliffsDelta)->Range(256, 1 << 14)->Complexity();

static void BM_LeveneTest(benchmark::State& state) {
    const auto groups = make_groups(4, static_cast<int>(state.range(0)), 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(levene_test(groups));
    }
}
BENCHMARK(BM_LeveneTest)->Range(256, 1 << 14);

static void BM_CorrelationMatrix8(benchmark::State& state) {
    const auto cols = make_groups(8, static_cast<int>(state.range(0)), 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(correlation_matrix(cols));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CorrelationMatrix8)->Range(512, 1 << 13)->Complexity();

static void BM_BhFdr(benchmark::State& state) {
    Rng rng(5);
    std::vector<double> pvals(state.range(0));
    for (auto& p : pvals) p = rng.next_double();
    for (auto _ : state) {
        benchmark::DoNotOptimize(bh_fdr(pvals, 0.05));
    }
}
BENCHMARK(BM_BhFdr)->Range(16, 4096);
