#include <benchmark/benchmark.h>

#include "simaudit/ingest.hpp"
#include "simaudit/network.hpp"
#include "simaudit/stability.hpp"
#include "simaudit/synth.hpp"

using namespace simaudit;

namespace {

// Factorial synthetic cohort: profiles x 4 models x 2 conditions x iterations.
SynthSpec replica_spec(int profile_count, int iterations) {
    SynthSpec spec;
    spec.rng_seed = 20250101;
    spec.iterations = iterations;
    spec.models = {"model-a", "model-b", "model-c", "model-d"};
    const auto profiles = all_profiles();
    spec.profiles.assign(profiles.begin(), profiles.begin() + profile_count);
    for (const auto& p : spec.profiles) {
        CohortParams params;
        params.target_mean = 8.0;
        params.copula = equicorrelated_copula(8, 0.35);
        spec.params[{p, InstrumentId::PHQ8}] = params;
    }
    return spec;
}

}  // namespace

static void BM_Generate(benchmark::State& state) {
    const auto spec = replica_spec(static_cast<int>(state.range(0)), 30);
    for (auto _ : state) {
        benchmark::DoNotOptimize(generate(spec));
    }
}
BENCHMARK(BM_Generate)->Arg(12)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

static void BM_MatchCrossRun(benchmark::State& state) {
    const auto dataset = generate(replica_spec(120, 30));
    for (auto _ : state) {
        benchmark::DoNotOptimize(match_cross_run(dataset));
    }
}
BENCHMARK(BM_MatchCrossRun)->Unit(benchmark::kMillisecond);

static void BM_StabilityReport(benchmark::State& state) {
    const auto dataset = generate(replica_spec(120, 30));
    const auto matches = match_cross_run(dataset);
    for (auto _ : state) {
        benchmark::DoNotOptimize(stability_report(dataset, matches));
    }
}
BENCHMARK(BM_StabilityReport)->Unit(benchmark::kMillisecond);

static void BM_NoiseFloor(benchmark::State& state) {
    const auto dataset = generate(replica_spec(120, 30));
    for (auto _ : state) {
        benchmark::DoNotOptimize(noise_floor(dataset, Dimension::Race, "White",
                                             InstrumentId::PHQ8,
                                             static_cast<int>(state.range(0)), 7, 60, 1));
    }
}
BENCHMARK(BM_NoiseFloor)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
