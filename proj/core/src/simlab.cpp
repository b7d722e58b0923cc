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
#include "fes/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "fes/errors.hpp"

namespace fes {

std::string_view to_string(ScenarioKind k) noexcept {
    switch (k) {
        case ScenarioKind::linear: return "linear";
        case ScenarioKind::sine: return "sine";
        case ScenarioKind::circular: return "circular";
        case ScenarioKind::parabolic: return "parabolic";
        case ScenarioKind::checkerboard: return "checkerboard";
        case ScenarioKind::local: return "local";
        case ScenarioKind::null: return "null";
    }
    return "null";
}

ScenarioKind parse_scenario(std::string_view name) {
    for (auto k : {ScenarioKind::linear, ScenarioKind::sine, ScenarioKind::circular, ScenarioKind::parabolic,
                   ScenarioKind::checkerboard, ScenarioKind::local, ScenarioKind::null}) {
        if (to_string(k) == name) return k;
    }
    throw ConfigError("unknown scenario '" + std::string(name) +
                      "' (expected linear, sine, circular, parabolic, checkerboard, local or null)");
}

Count default_sample_size(ScenarioKind k) noexcept {
    switch (k) {
        case ScenarioKind::checkerboard: return 500;
        case ScenarioKind::local:
        case ScenarioKind::null: return 1000;
        default: return 300;
    }
}

void Scenario::validate() const {
    if (n < 1) throw ConfigError("scenario sample size must be positive");
    if (noise_level < 1 || noise_level > 20) throw ConfigError("noise level must lie in 1..20");
}

PointSet generate(const Scenario& s, Rng& rng) {
    s.validate();
    const double sd = s.noise_sd();
    std::normal_distribution<double> noise(0.0, sd);
    std::normal_distribution<double> standard(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::uniform_int_distribution<int> three(0, 2);
    std::uniform_int_distribution<int> two(0, 1);

    PointSet out(static_cast<std::size_t>(s.n));
    for (auto& p : out) {
        switch (s.kind) {
            case ScenarioKind::linear: {
                p.x = unit(rng);
                p.y = p.x + 3.0 * noise(rng);
                break;
            }
            case ScenarioKind::sine: {
                p.x = unit(rng);
                p.y = std::sin(5.0 * std::numbers::pi * p.x) + 4.0 * noise(rng);
                break;
            }
            case ScenarioKind::circular: {
                const double theta = angle(rng);
                const double e = noise(rng);
                const double e1 = noise(rng);
                p.x = std::cos(theta) + e;
                p.y = std::sin(theta) + e1;
                break;
            }
            case ScenarioKind::parabolic: {
                p.x = unit(rng);
                p.y = (p.x - 0.5) * (p.x - 0.5) + 0.75 * noise(rng);
                break;
            }
            case ScenarioKind::checkerboard: {
                const int w = 1 + three(rng);
                const int v1 = 1 + 2 * three(rng);
                const int v2 = 2 + 2 * two(rng);
                const double e = noise(rng);
                const double e1 = noise(rng);
                p.x = w + e;
                p.y = (w % 2 == 1 ? v1 : v2) + e1;
                break;
            }
            case ScenarioKind::local: {
                const double e = noise(rng);
                const double e1 = noise(rng);
                const double e2 = noise(rng);
                p.x = e;
                const bool inside = e >= 0.0 && e <= 0.7 && e1 >= 0.0 && e1 <= 0.7;
                p.y = inside ? p.x + 0.25 * e2 : e1;
                break;
            }
            case ScenarioKind::null: {
                p.x = standard(rng);
                p.y = standard(rng);
                break;
            }
        }
    }
    return out;
}

double pearson_permutation_p(std::span<const Point> points, int permutations, Rng& rng) {
    if (permutations < 99) throw ConfigError("at least 99 permutations are required");
    validate_points(points);
    const std::size_t n = points.size();
    double mx = 0.0;
    double my = 0.0;
    for (const auto& p : points) {
        mx += p.x;
        my += p.y;
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    std::vector<double> xc(n);
    std::vector<double> yc(n);
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        xc[i] = points[i].x - mx;
        yc[i] = points[i].y - my;
        sxx += xc[i] * xc[i];
        syy += yc[i] * yc[i];
    }
    if (sxx == 0.0 || syy == 0.0) return 1.0;

    auto cross = [&](const std::vector<double>& y) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += xc[i] * y[i];
        return std::abs(s);
    };
    // Sums of squares are permutation invariant, so |r| compares as |sum x y|.
    const double observed = cross(yc) * (1.0 - 1e-12);
    std::int64_t at_least = 0;
    for (int b = 0; b < permutations; ++b) {
        std::shuffle(yc.begin(), yc.end(), rng);
        if (cross(yc) >= observed) ++at_least;
    }
    return static_cast<double>(1 + at_least) / static_cast<double>(permutations + 1);
}

namespace {

struct ReplicateOutcome {
    bool reject = false;
    bool mismatch = false;
    double runtime_ms = 0.0;
    PointSet data;
    ScanReport report;
};

template <typename Fn>
void run_replicates(std::int64_t replicates, int threads, Fn&& fn) {
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(replicates)));
    if (workers == 1) {
        for (std::int64_t r = 0; r < replicates; ++r) fn(r);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (auto r = next.fetch_add(1); r < replicates; r = next.fetch_add(1)) fn(r);
        });
    }
}

MonteCarloResult summarize(const std::vector<ReplicateOutcome>& outcomes, bool timed) {
    MonteCarloResult res;
    res.replicates = static_cast<std::int64_t>(outcomes.size());
    double runtime = 0.0;
    for (const auto& o : outcomes) {
        res.rejections += o.reject ? 1 : 0;
        res.decision_mismatches += o.mismatch ? 1 : 0;
        runtime += o.runtime_ms;
    }
    const auto reps = static_cast<double>(res.replicates);
    res.power = static_cast<double>(res.rejections) / reps;
    res.std_error = std::sqrt(res.power * (1.0 - res.power) / reps);
    if (timed) res.mean_runtime_ms = runtime / reps;
    return res;
}

void check_options(const MonteCarloOptions& opt) {
    if (opt.replicates < 1) throw ConfigError("at least one replicate is required");
}

}  // namespace

MonteCarloResult estimate_power(const Scenario& s, const FesConfig& cfg, const MonteCarloOptions& opt) {
    s.validate();
    cfg.validate();
    check_options(opt);
    reserve_log_factorials(s.n);

    const bool keep = static_cast<bool>(opt.observer);
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(opt.replicates));
    run_replicates(opt.replicates, opt.threads, [&](std::int64_t r) {
        Rng rng = substream(opt.seed, static_cast<std::uint64_t>(r));
        PointSet data = generate(s, rng);
        const auto start = std::chrono::steady_clock::now();
        const PointSet unit = opt.rank_transform
                                  ? rank_transform(data, rng)
                                  : normalize_to_unit_square(data, BoundingBox::enclosing(data));
        ScanReport report = scan(build_grid(unit, cfg.k1, cfg.k2), cfg);
        const auto stop = std::chrono::steady_clock::now();

        auto& o = outcomes[static_cast<std::size_t>(r)];
        o.reject = report.reject;
        o.mismatch = report.reject == significant_windows(report).empty();
        if (opt.measure_time) o.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
        if (keep) {
            o.data = std::move(data);
            o.report = std::move(report);
        }
    });

    if (keep) {
        for (std::size_t r = 0; r < outcomes.size(); ++r) {
            opt.observer(static_cast<std::int64_t>(r), outcomes[r].data, outcomes[r].report);
        }
    }
    return summarize(outcomes, opt.measure_time);
}

MonteCarloResult estimate_pearson_power(const Scenario& s, double alpha, int permutations,
                                        const MonteCarloOptions& opt) {
    s.validate();
    check_options(opt);
    std::vector<ReplicateOutcome> outcomes(static_cast<std::size_t>(opt.replicates));
    run_replicates(opt.replicates, opt.threads, [&](std::int64_t r) {
        Rng rng = substream(opt.seed, static_cast<std::uint64_t>(r));
        const PointSet data = generate(s, rng);
        const auto start = std::chrono::steady_clock::now();
        const double p = pearson_permutation_p(data, permutations, rng);
        const auto stop = std::chrono::steady_clock::now();
        auto& o = outcomes[static_cast<std::size_t>(r)];
        o.reject = p < alpha;
        if (opt.measure_time) o.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    });
    return summarize(outcomes, opt.measure_time);
}

}  // namespace fes
