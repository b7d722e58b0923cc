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
 * @file scanner.hpp
 *
 * Fisher exact scanning: every screened-in dyadic window up to a maximum
 * resolution gets a two-sided Fisher exact test; minimum p-values are
 * combined within each stratum, then across the strata of a resolution,
 * then across resolutions.
 */

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fes/grid.hpp"

namespace fes {

enum class Correction { sidak, bonferroni };

std::string_view to_string(Correction c) noexcept;
/// Accepts "sidak" or "bonferroni"; throws ConfigError otherwise.
Correction parse_correction(std::string_view s);

struct FesConfig {
    int k1 = 1;
    int k2 = 1;
    int max_resolution = 0;  ///< M; strata (i, j) with i + j <= M are scanned
    Count min_count = 25;    ///< s: windows with n(A) <= s are skipped
    Count min_margin = 10;   ///< s': windows with a row or column margin <= s' are skipped
    double alpha = 0.05;
    Correction correction = Correction::sidak;
    bool midp = true;
    std::uint64_t seed = kDefaultSeed;

    /// k1 = k2 = M + 1 = floor(log2(n / s')). Throws ConfigError when that is below 1.
    static FesConfig defaults_for(Count n, Count min_margin = 10);

    /// Throws ConfigError on M > k1 + k2 - 2, levels < 1, alpha outside (0, 1),
    /// or negative thresholds.
    void validate() const;
};

/// Screening rule: n(A) > s and every row/column margin > s'.
inline bool screen(const Table2x2& t, Count min_count, Count min_margin) noexcept {
    return t.total() > min_count && t.min_margin() > min_margin;
}

/// 1 - (1 - p)^m (Sidak) or min(1, m p) (Bonferroni). m must be >= 1.
double sidak_combine(double p_min, std::int64_t m, Correction c = Correction::sidak);

/// Per-window threshold 1 - (1 - alpha)^(1 / ((M + 1) T L)), or its Bonferroni analogue.
double window_threshold(double alpha, int resolutions, std::int64_t strata_in_resolution,
                        std::int64_t tests_in_stratum, Correction c = Correction::sidak);

struct WindowResult {
    Window window;
    bool screened_in = false;
    std::optional<double> p;                   ///< nominal p-value; absent if screened out
    std::optional<double> adjusted_threshold;  ///< alpha(i, j); absent if the stratum has no tests
    bool significant = false;
};

struct StratumResult {
    int i = 0;
    int j = 0;
    std::int64_t tests = 0;        ///< L(i, j)
    std::optional<double> min_p;   ///< smallest nominal p in the stratum
    std::optional<double> p;       ///< p(i, j); absent when L(i, j) = 0
};

struct ResolutionResult {
    int r = 0;
    std::int64_t active_strata = 0;  ///< T(r)
    std::optional<double> p;         ///< p_resol(r); absent when T(r) = 0
};

struct ScanReport {
    FesConfig config;
    Count n = 0;
    std::vector<StratumResult> strata;  ///< ordered by resolution, then i
    std::vector<ResolutionResult> resolutions;
    double p_overall = 1.0;
    bool reject = false;
    bool nothing_tested = false;  ///< no window passed screening anywhere
    std::vector<WindowResult> windows;  ///< every window, stratum-major then row-major

    const StratumResult* stratum(int i, int j) const noexcept;
};

/// Runs the scan on a grid carrying at least cfg.k1 x cfg.k2 levels.
/// Throws ConfigError for an invalid config or a grid that is too coarse.
ScanReport scan(const CountGrid& g, const FesConfig& cfg);

/// Windows whose nominal p-value clears the multiplicity-adjusted level at
/// `alpha`. Non-empty exactly when p_overall < alpha.
std::vector<WindowResult> significant_windows(const ScanReport& report, double alpha);

inline std::vector<WindowResult> significant_windows(const ScanReport& report) {
    return significant_windows(report, report.config.alpha);
}

}  // namespace fes
