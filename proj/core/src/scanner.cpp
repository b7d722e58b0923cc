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
#include "fes/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fes/errors.hpp"

namespace fes {

std::string_view to_string(Correction c) noexcept {
    return c == Correction::sidak ? "sidak" : "bonferroni";
}

Correction parse_correction(std::string_view s) {
    if (s == "sidak") return Correction::sidak;
    if (s == "bonferroni") return Correction::bonferroni;
    throw ConfigError("unknown correction '" + std::string(s) + "' (expected sidak or bonferroni)");
}

FesConfig FesConfig::defaults_for(Count n, Count min_margin) {
    const Count unit = std::max<Count>(min_margin, 1);
    int k = 0;
    while (unit * (Count{1} << (k + 1)) <= n && k < 14) ++k;
    if (k < 1) {
        throw ConfigError("n = " + std::to_string(n) +
                          " is too small for the default resolution floor(log2(n / " +
                          std::to_string(unit) + ")) >= 1; pass --k1/--k2 explicitly");
    }
    FesConfig cfg;
    cfg.k1 = k;
    cfg.k2 = k;
    cfg.max_resolution = k - 1;
    cfg.min_margin = min_margin;
    return cfg;
}

void FesConfig::validate() const {
    if (k1 < 1 || k2 < 1) throw ConfigError("k1 and k2 must be at least 1");
    if (max_resolution < 0 || max_resolution > k1 + k2 - 2) {
        throw ConfigError("max resolution M = " + std::to_string(max_resolution) +
                          " must lie in [0, k1 + k2 - 2] = [0, " + std::to_string(k1 + k2 - 2) + "]");
    }
    if (min_count < 0 || min_margin < 0) throw ConfigError("screening thresholds must be non-negative");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

double sidak_combine(double p_min, std::int64_t m, Correction c) {
    if (m < 1) throw std::invalid_argument("sidak_combine needs at least one test");
    if (!(p_min >= 0.0 && p_min <= 1.0)) throw DomainError("p-value outside [0, 1]");
    if (c == Correction::bonferroni) {
        return std::min(1.0, static_cast<double>(m) * p_min);
    }
    if (m == 1 || p_min == 0.0) return p_min;
    const double q = -std::expm1(static_cast<double>(m) * std::log1p(-p_min));
    return std::clamp(q, 0.0, 1.0);
}

double window_threshold(double alpha, int resolutions, std::int64_t strata_in_resolution,
                        std::int64_t tests_in_stratum, Correction c) {
    const double m = static_cast<double>(resolutions) * static_cast<double>(strata_in_resolution) *
                     static_cast<double>(tests_in_stratum);
    if (c == Correction::bonferroni) return alpha / m;
    return -std::expm1(std::log1p(-alpha) / m);
}

const StratumResult* ScanReport::stratum(int i, int j) const noexcept {
    for (const auto& s : strata) {
        if (s.i == i && s.j == j) return &s;
    }
    return nullptr;
}

namespace {

// The three-stage combination applied to a single p-value. Every stage is
// non-decreasing in its input, so combining a stratum's minimum equals the
// minimum over the stratum of this composite.
double overall_adjusted(double p, std::int64_t tests, std::int64_t strata, int resolutions,
                        Correction c) {
    return sidak_combine(sidak_combine(sidak_combine(p, tests, c), strata, c), resolutions, c);
}

struct StratumSpan {
    std::size_t first_window;
    std::size_t window_count;
};

void flag_significant(ScanReport& report, const std::vector<StratumSpan>& spans, double alpha) {
    const auto& cfg = report.config;
    const int resolutions = cfg.max_resolution + 1;
    for (std::size_t s = 0; s < report.strata.size(); ++s) {
        const auto& st = report.strata[s];
        const auto& res = report.resolutions[static_cast<std::size_t>(st.i + st.j)];
        for (std::size_t w = spans[s].first_window; w < spans[s].first_window + spans[s].window_count; ++w) {
            auto& wr = report.windows[w];
            wr.adjusted_threshold.reset();
            wr.significant = false;
            if (st.tests == 0) continue;
            wr.adjusted_threshold =
                window_threshold(alpha, resolutions, res.active_strata, st.tests, cfg.correction);
            if (wr.p) {
                wr.significant = overall_adjusted(*wr.p, st.tests, res.active_strata, resolutions,
                                                  cfg.correction) < alpha;
            }
        }
    }
}

std::vector<StratumSpan> stratum_spans(const ScanReport& report) {
    std::vector<StratumSpan> spans;
    spans.reserve(report.strata.size());
    std::size_t offset = 0;
    for (const auto& st : report.strata) {
        const auto count = static_cast<std::size_t>(1) << (st.i + st.j);
        spans.push_back({offset, count});
        offset += count;
    }
    return spans;
}

}  // namespace

ScanReport scan(const CountGrid& g, const FesConfig& cfg) {
    cfg.validate();
    if (cfg.k1 > g.k1() || cfg.k2 > g.k2()) {
        throw ConfigError("grid resolution (" + std::to_string(g.k1()) + ", " + std::to_string(g.k2()) +
                          ") is coarser than the configured (k1, k2) = (" + std::to_string(cfg.k1) +
                          ", " + std::to_string(cfg.k2) + ")");
    }

    ScanReport report;
    report.config = cfg;
    report.n = g.total();
    const int M = cfg.max_resolution;
    const int resolutions = M + 1;

    std::vector<StratumSpan> spans;
    for (int r = 0; r <= M; ++r) {
        ResolutionResult res{r, 0, std::nullopt};
        std::optional<double> best_stratum_p;
        const int i_lo = std::max(0, r - (cfg.k2 - 1));
        const int i_hi = std::min(cfg.k1 - 1, r);
        for (int i = i_lo; i <= i_hi; ++i) {
            const int j = r - i;
            StratumResult st{i, j, 0, std::nullopt, std::nullopt};
            spans.push_back({report.windows.size(), std::size_t{1} << (i + j)});
            const std::int64_t rows = std::int64_t{1} << i;
            const std::int64_t cols = std::int64_t{1} << j;
            for (std::int64_t l1 = 1; l1 <= rows; ++l1) {
                for (std::int64_t l2 = 1; l2 <= cols; ++l2) {
                    WindowResult wr;
                    wr.window = window_table(g, i, j, l1, l2);
                    wr.screened_in = screen(wr.window.table, cfg.min_count, cfg.min_margin);
                    if (wr.screened_in) {
                        const double p = fisher_two_sided_p(wr.window.table, cfg.midp);
                        wr.p = p;
                        ++st.tests;
                        if (!st.min_p || p < *st.min_p) st.min_p = p;
                    }
                    report.windows.push_back(std::move(wr));
                }
            }
            if (st.tests > 0) {
                st.p = sidak_combine(*st.min_p, st.tests, cfg.correction);
                ++res.active_strata;
                if (!best_stratum_p || *st.p < *best_stratum_p) best_stratum_p = st.p;
            }
            report.strata.push_back(st);
        }
        if (res.active_strata > 0) {
            res.p = sidak_combine(*best_stratum_p, res.active_strata, cfg.correction);
        }
        report.resolutions.push_back(res);
    }

    std::optional<double> best_resolution_p;
    for (const auto& res : report.resolutions) {
        if (res.p && (!best_resolution_p || *res.p < *best_resolution_p)) best_resolution_p = res.p;
    }
    if (best_resolution_p) {
        report.p_overall = sidak_combine(*best_resolution_p, resolutions, cfg.correction);
    } else {
        report.p_overall = 1.0;
        report.nothing_tested = true;
    }
    report.reject = report.p_overall < cfg.alpha;

    flag_significant(report, spans, cfg.alpha);
    return report;
}

std::vector<WindowResult> significant_windows(const ScanReport& report, double alpha) {
    const auto& cfg = report.config;
    const int resolutions = cfg.max_resolution + 1;
    const auto spans = stratum_spans(report);
    std::vector<WindowResult> out;
    for (std::size_t s = 0; s < report.strata.size(); ++s) {
        const auto& st = report.strata[s];
        if (st.tests == 0) continue;
        const auto& res = report.resolutions[static_cast<std::size_t>(st.i + st.j)];
        for (std::size_t w = spans[s].first_window; w < spans[s].first_window + spans[s].window_count; ++w) {
            const auto& wr = report.windows[w];
            if (!wr.p || overall_adjusted(*wr.p, st.tests, res.active_strata, resolutions,
                                          cfg.correction) >= alpha) {
                continue;
            }
            WindowResult hit = wr;
            hit.significant = true;
            hit.adjusted_threshold =
                window_threshold(alpha, resolutions, res.active_strata, st.tests, cfg.correction);
            out.push_back(std::move(hit));
        }
    }
    return out;
}

}  // namespace fes
