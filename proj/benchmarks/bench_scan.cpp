/*
 * Copyright (c) 2026, The FES Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <benchmark/benchmark.h>

#include <cmath>

#include "fes/exactstats.hpp"
#include "fes/grid.hpp"
#include "fes/mhg.hpp"
#include "fes/scanner.hpp"
#include "fes/simlab.hpp"

namespace {

using namespace fes;

PointSet null_data(Count n, std::uint64_t seed) {
    Rng rng(seed);
    return generate({ScenarioKind::null, n, 1}, rng);
}

// Balanced 2x2 table with total n; cost grows with the support width.
void BM_FisherExact(benchmark::State& state) {
    const Count q = state.range(0) / 4;
    const Table2x2 t{q + q / 10, q - q / 10, q - q / 10, q + q / 10};
    reserve_log_factorials(t.total());
    for (auto _ : state) benchmark::DoNotOptimize(fisher_exact(t, true).p);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FisherExact)->RangeMultiplier(4)->Range(64, 1 << 18)->Complexity();

void BM_RankTransform(benchmark::State& state) {
    const auto pts = null_data(state.range(0), 1);
    for (auto _ : state) {
        Rng rng(7);
        benchmark::DoNotOptimize(rank_transform(pts, rng));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RankTransform)->RangeMultiplier(2)->Range(1 << 14, 1 << 19)->Complexity(benchmark::oNLogN);

// build_grid + scan at the fixed large-sample configuration k1 = k2 = 7.
void BM_ScanFixedLevels(benchmark::State& state) {
    const Count n = state.range(0);
    Rng rng(3);
    const auto unit = rank_transform(null_data(n, 2), rng);
    FesConfig cfg;
    cfg.k1 = cfg.k2 = 7;
    cfg.max_resolution = std::min(static_cast<int>(std::floor(std::log2(n / 16.0))) - 1, 12);
    reserve_log_factorials(n);
    for (auto _ : state) benchmark::DoNotOptimize(scan(build_grid(unit, cfg.k1, cfg.k2), cfg).p_overall);
    state.SetComplexityN(n);
}
BENCHMARK(BM_ScanFixedLevels)
    ->Arg(100'000)
    ->Arg(200'000)
    ->Arg(400'000)
    ->Unit(benchmark::kMillisecond)
    ->Complexity(benchmark::oN);

// End-to-end test with default levels for n.
void BM_ScanDefaults(benchmark::State& state) {
    const Count n = state.range(0);
    const auto pts = null_data(n, 4);
    const auto cfg = FesConfig::defaults_for(n);
    reserve_log_factorials(n);
    for (auto _ : state) {
        Rng rng(cfg.seed);
        benchmark::DoNotOptimize(scan(build_grid(rank_transform(pts, rng), cfg.k1, cfg.k2), cfg).reject);
    }
}
BENCHMARK(BM_ScanDefaults)->RangeMultiplier(4)->Range(1000, 256'000)->Unit(benchmark::kMillisecond);

void BM_MhgSample(benchmark::State& state) {
    const int k = static_cast<int>(state.range(0));
    const std::vector<Count> margins(std::size_t{1} << k, 50);
    const MarginSpec m{margins, margins};
    reserve_log_factorials(m.total());
    Rng rng(5);
    for (auto _ : state) benchmark::DoNotOptimize(mhg_sample(m, rng));
}
BENCHMARK(BM_MhgSample)->DenseRange(1, 5);

}  // namespace

BENCHMARK_MAIN();
