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
#pragma once

/**
 * @file simlab.hpp
 *
 * Simulation scenarios for power and error-rate studies, a seeded Monte
 * Carlo harness around the full FES pipeline, and a permutation test on
 * Pearson's correlation as a baseline.
 *
 * Scenario generators (noise level l in 1..20, e, e', e'' iid N(0, (l/20)^2),
 * U ~ Uniform(0, 1), theta ~ Uniform(-pi, pi), W uniform on {1, 2, 3},
 * V1 uniform on {1, 3, 5}, V2 uniform on {2, 4}):
 *
 *   linear        X = U,               Y = X + 3e
 *   sine          X = U,               Y = sin(5 pi X) + 4e
 *   circular      X = cos(theta) + e,  Y = sin(theta) + e'
 *   parabolic     X = U,               Y = (X - 0.5)^2 + 0.75e
 *   checkerboard  X = W + e,           Y = V1 + e' if W odd, V2 + e' if W even
 *   local         X = e,               Y = X + 0.25e'' if 0 <= e, e' <= 0.7, else e'
 *   null          X, Y independent N(0, 1)
 */

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "fes/grid.hpp"
#include "fes/random.hpp"
#include "fes/scanner.hpp"

namespace fes {

enum class ScenarioKind { linear, sine, circular, parabolic, checkerboard, local, null };

std::string_view to_string(ScenarioKind k) noexcept;
/// Throws ConfigError for an unknown name.
ScenarioKind parse_scenario(std::string_view name);

/// Sample size used for a scenario in the reference power study.
Count default_sample_size(ScenarioKind k) noexcept;

struct Scenario {
    ScenarioKind kind = ScenarioKind::null;
    Count n = 1000;
    int noise_level = 1;  ///< l in 1..20; noise sd = l / 20

    double noise_sd() const noexcept { return noise_level / 20.0; }
    void validate() const;
};

PointSet generate(const Scenario& s, Rng& rng);

/// Permutation p-value for |Pearson r|: (1 + #{|r_perm| >= |r_obs|}) / (B + 1).
/// A constant margin gives p = 1. Requires at least 99 permutations.
double pearson_permutation_p(std::span<const Point> points, int permutations, Rng& rng);

struct MonteCarloResult {
    std::int64_t replicates = 0;
    std::int64_t rejections = 0;
    double power = 0.0;
    double std_error = 0.0;
    std::optional<double> mean_runtime_ms;  ///< only when timing was requested
    /// Replicates where the reject flag disagreed with the significant-window
    /// list being non-empty. Always expected to be zero.
    std::int64_t decision_mismatches = 0;
};

/// Observer invoked once per replicate (in replicate order) with its scan report.
using ReplicateObserver = std::function<void(std::int64_t replicate, const PointSet& data, const ScanReport&)>;

struct MonteCarloOptions {
    std::int64_t replicates = 1000;
    std::uint64_t seed = kDefaultSeed;
    int threads = 1;
    bool rank_transform = true;
    bool measure_time = false;
    ReplicateObserver observer;  ///< optional; receives reports in replicate order
};

/// generate -> rank_transform -> build_grid -> scan for each replicate; replicate r
/// uses substream(seed, r) so the result does not depend on `threads`.
MonteCarloResult estimate_power(const Scenario& s, const FesConfig& cfg, const MonteCarloOptions& opt);

/// Same harness with the Pearson permutation test at level `alpha` in place of FES.
MonteCarloResult estimate_pearson_power(const Scenario& s, double alpha, int permutations,
                                        const MonteCarloOptions& opt);

/// Default resolution for a scenario draw (k1 = k2 = M + 1 = floor(log2(n / 10))).
inline FesConfig default_config(const Scenario& s) { return FesConfig::defaults_for(s.n); }

}  // namespace fes
