#include <benchmark/benchmark.h>

#include "levyruin/model.hpp"
#include "levyruin/rng.hpp"
#include "levyruin/simulate.hpp"

#include <nlohmann/json.hpp>

namespace {

using namespace levyruin;

ModelSpec heavy_model() {
    return build_model(nlohmann::json{
        {"claim", {{"variant", "poly_tilted_exp"}, {"alpha", 1.0}, {"p", 3.0}}},
        {"lambda", 1.0},
        {"premium", 2.0},
        {"sigma", 0.0}});
}

void BM_claim_sample_poly(benchmark::State& state) {
    const ModelSpec m = heavy_model();
    Rng rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sample_claim(m, rng));
}
BENCHMARK(BM_claim_sample_poly);

void BM_claim_sample_exponential(benchmark::State& state) {
    const ModelSpec m = build_model(nlohmann::json{
        {"claim", {{"variant", "exponential"}, {"mu", 1.0}}},
        {"lambda", 1.0},
        {"premium", 2.0},
        {"sigma", 0.0}});
    Rng rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(sample_claim(m, rng));
}
BENCHMARK(BM_claim_sample_exponential);

void BM_first_passage_attempt(benchmark::State& state) {
    const ModelSpec m = heavy_model();
    Rng rng(1, 0);
    const HorizonPolicy pol{6.0, 100000000};
    std::uint64_t ruined = 0;
    for (auto _ : state) {
        const auto s = first_passage(m, 8.0, rng, pol);
        ruined += s.ruined ? 1 : 0;
    }
    benchmark::DoNotOptimize(ruined);
}
BENCHMARK(BM_first_passage_attempt);

void BM_rng_u64(benchmark::State& state) {
    Rng rng(1, 0);
    for (auto _ : state) benchmark::DoNotOptimize(rng.next_u64());
}
BENCHMARK(BM_rng_u64);

} // namespace

BENCHMARK_MAIN();
