#include <benchmark/benchmark.h>

#include "levyruin/fluctuation.hpp"
#include "levyruin/model.hpp"

#include <nlohmann/json.hpp>

namespace {

using namespace levyruin;

const ModelSpec& heavy_model() {
    static const ModelSpec m = build_model(nlohmann::json{
        {"claim", {{"variant", "poly_tilted_exp"}, {"alpha", 1.0}, {"p", 3.0}}},
        {"lambda", 1.0},
        {"premium", 2.0},
        {"sigma", 0.0}});
    return m;
}

void BM_kappa(benchmark::State& state) {
    LadderExponents lad(heavy_model());
    double b = -0.9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(lad.kappa(0.5, b));
        b = b >= 2.0 ? -0.9 : b + 0.1;
    }
}
BENCHMARK(BM_kappa);

void BM_phi_hat_uncached(benchmark::State& state) {
    double a = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(phi_hat(heavy_model(), a));
        a += 0.01;
    }
}
BENCHMARK(BM_phi_hat_uncached);

void BM_renewal_table_plain(benchmark::State& state) {
    RenewalOptions opt;
    opt.h = 0.01;
    opt.build_tilted = false;
    for (auto _ : state) benchmark::DoNotOptimize(renewal_table(heavy_model(), opt));
}
BENCHMARK(BM_renewal_table_plain)->Unit(benchmark::kMillisecond);

void BM_renewal_table_tilted(benchmark::State& state) {
    RenewalOptions opt;
    opt.h = 0.01;
    for (auto _ : state) benchmark::DoNotOptimize(renewal_table(heavy_model(), opt));
}
BENCHMARK(BM_renewal_table_tilted)->Unit(benchmark::kMillisecond);

} // namespace
