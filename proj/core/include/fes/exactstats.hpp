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
 * @file exactstats.hpp
 *
 * Exact log-space combinatorics for 2x2 contingency tables: hypergeometric
 * pmf, the two-sided Fisher exact p-value (optionally mid-p corrected) and
 * hypergeometric sampling.
 *
 * HG(a, b, c) is the distribution of the top-left cell of a 2x2 table with
 * first-row total a, first-column total b and grand total c, conditional on
 * all margins. Its support is [max(0, a + b - c), min(a, b)].
 */

#include <cstdint>
#include <optional>

#include "fes/random.hpp"

namespace fes {

using Count = std::int64_t;

struct HgParams {
    Count a = 0;  ///< first-row total
    Count b = 0;  ///< first-column total
    Count c = 0;  ///< grand total

    /// Throws DomainError unless 0 <= a <= c and 0 <= b <= c.
    void validate() const;

    Count support_min() const noexcept { return a + b - c > 0 ? a + b - c : 0; }
    Count support_max() const noexcept { return a < b ? a : b; }
    bool contains(Count x) const noexcept { return x >= support_min() && x <= support_max(); }

    /// Smallest mode: floor((a + 1)(b + 1) / (c + 2)).
    Count mode() const noexcept;

    friend bool operator==(const HgParams&, const HgParams&) = default;
};

/// Cell counts of a 2x2 table. Row index is the first variable, column the second.
struct Table2x2 {
    Count n00 = 0;
    Count n01 = 0;
    Count n10 = 0;
    Count n11 = 0;

    Count total() const noexcept { return n00 + n01 + n10 + n11; }
    Count row0() const noexcept { return n00 + n01; }
    Count row1() const noexcept { return n10 + n11; }
    Count col0() const noexcept { return n00 + n10; }
    Count col1() const noexcept { return n01 + n11; }
    Count min_margin() const noexcept;

    /// Margins as HG parameters; the table's n00 is the HG outcome.
    HgParams hg_params() const noexcept { return {row0(), col0(), total()}; }

    /// Empirical log odds ratio log(n00 n11 / (n01 n10)); nullopt when any cell is zero.
    std::optional<double> empirical_lor() const;

    /// Throws DomainError if any cell is negative.
    void validate() const;

    friend bool operator==(const Table2x2&, const Table2x2&) = default;
};

/// ln(n!). Backed by a process-wide table grown on demand; see reserve_log_factorials().
double log_factorial(Count n);

/// Grows the log-factorial table to cover 0..n. Lookups below the reserved
/// size never lock, so call this once with the dataset size before fanning
/// out to worker threads.
void reserve_log_factorials(Count n);

/// ln C(n, k). Throws DomainError unless 0 <= k <= n.
double log_choose(Count n, Count k);

/// ln P(X = x) for X ~ HG(a, b, c). Throws DomainError when x lies outside the support.
double hg_logpmf(Count x, const HgParams& p);

/// Relative slack applied when testing pmf(x) <= pmf(observed), so that outcomes
/// tied with the observed one are counted regardless of rounding order.
inline constexpr double kFisherTieTolerance = 1e-7;

struct FisherResult {
    double p = 1.0;               ///< two-sided (or mid-p) value, clamped to [0, 1]
    double observed_prob = 1.0;   ///< pmf of the observed n00
    /// The set of outcomes no more probable than the observed one is
    /// [support_min, left_end] together with [right_begin, support_max];
    /// either part may be empty (left_end < support_min, right_begin > support_max).
    Count left_end = 0;
    Count right_begin = 0;
};

/// Two-sided Fisher exact test on a 2x2 table using the minimum-likelihood
/// criterion. With `midp`, half of pmf(observed) is subtracted. Tables with a
/// zero margin have a single-point support and yield p = 1 (0.5 with mid-p).
FisherResult fisher_exact(const Table2x2& t, bool midp);

inline double fisher_two_sided_p(const Table2x2& t, bool midp) { return fisher_exact(t, midp).p; }

/// Draws from HG(a, b, c) by inverting the cdf in order of decreasing
/// probability, starting at the mode and stepping outward.
Count hg_sample(const HgParams& p, Rng& rng);

}  // namespace fes
