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
#include "fes/exactstats.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fes/errors.hpp"

namespace fes {

namespace {

// Segmented table: segment 0 holds [0, 4096), segment s >= 1 holds
// [4096 * 2^(s-1), 4096 * 2^s). Segments never move once published, so a
// reader that observes size_ > n may index without taking the lock.
class LogFactorialTable {
public:
    double get(Count n) {
        if (n >= size_.load(std::memory_order_acquire)) {
            grow(n);
        }
        const auto [seg, off] = locate(n);
        return segments_[seg][off];
    }

    void grow(Count n) {
        std::lock_guard lock(mutex_);
        Count size = size_.load(std::memory_order_relaxed);
        while (size <= n) {
            const std::size_t seg = locate(size).first;
            const Count len = segment_length(seg);
            auto data = std::make_unique<double[]>(static_cast<std::size_t>(len));
            for (Count k = 0; k < len; ++k) {
                data[k] = static_cast<double>(std::lgamma(static_cast<long double>(size + k) + 1.0L));
            }
            segments_[seg] = std::move(data);
            size += len;
            size_.store(size, std::memory_order_release);
        }
    }

private:
    static constexpr int kBaseBits = 12;
    static constexpr Count kBase = Count{1} << kBaseBits;
    static constexpr std::size_t kMaxSegments = 52;

    static Count segment_length(std::size_t seg) { return seg == 0 ? kBase : kBase << (seg - 1); }

    static std::pair<std::size_t, Count> locate(Count n) {
        if (n < kBase) return {0, n};
        const auto seg = static_cast<std::size_t>(std::bit_width(static_cast<std::uint64_t>(n >> kBaseBits)));
        return {seg, n - (kBase << (seg - 1))};
    }

    std::array<std::unique_ptr<double[]>, kMaxSegments> segments_{};
    std::atomic<Count> size_{0};
    std::mutex mutex_;
};

LogFactorialTable& log_factorial_table() {
    static LogFactorialTable table;
    return table;
}

// pmf(x - 1) / pmf(x)
inline double ratio_down(Count x, const HgParams& p) {
    return (static_cast<double>(x) * static_cast<double>(p.c - p.a - p.b + x)) /
           (static_cast<double>(p.a - x + 1) * static_cast<double>(p.b - x + 1));
}

// pmf(x + 1) / pmf(x)
inline double ratio_up(Count x, const HgParams& p) {
    return (static_cast<double>(p.a - x) * static_cast<double>(p.b - x)) /
           (static_cast<double>(x + 1) * static_cast<double>(p.c - p.a - p.b + x + 1));
}

// Fills rel[x - lo] with pmf(x) / pmf(mode) via the ratio recurrences and
// returns their sum.
double relative_pmf(const HgParams& p, Count lo, Count hi, Count mode, std::vector<double>& rel) {
    rel.assign(static_cast<std::size_t>(hi - lo + 1), 0.0);
    rel[mode - lo] = 1.0;
    double total = 1.0;
    double v = 1.0;
    for (Count x = mode; x > lo; --x) {
        v *= ratio_down(x, p);
        rel[x - 1 - lo] = v;
        total += v;
    }
    v = 1.0;
    for (Count x = mode; x < hi; ++x) {
        v *= ratio_up(x, p);
        rel[x + 1 - lo] = v;
        total += v;
    }
    return total;
}

// Values below this relative to the mode are treated as possibly underflowed.
constexpr double kUnderflowGuard = 1e-280;

}  // namespace

void HgParams::validate() const {
    if (c < 0 || a < 0 || b < 0 || a > c || b > c) {
        throw DomainError("invalid hypergeometric parameters (a=" + std::to_string(a) + ", b=" +
                          std::to_string(b) + ", c=" + std::to_string(c) + ")");
    }
}

Count HgParams::mode() const noexcept {
    const Count m = ((a + 1) * (b + 1)) / (c + 2);
    return std::clamp(m, support_min(), support_max());
}

Count Table2x2::min_margin() const noexcept {
    return std::min({row0(), row1(), col0(), col1()});
}

std::optional<double> Table2x2::empirical_lor() const {
    if (n00 == 0 || n01 == 0 || n10 == 0 || n11 == 0) return std::nullopt;
    return std::log(static_cast<double>(n00)) + std::log(static_cast<double>(n11)) -
           std::log(static_cast<double>(n01)) - std::log(static_cast<double>(n10));
}

void Table2x2::validate() const {
    if (n00 < 0 || n01 < 0 || n10 < 0 || n11 < 0) {
        throw DomainError("2x2 table has a negative cell");
    }
}

double log_factorial(Count n) {
    if (n < 0) throw DomainError("log_factorial of negative argument");
    return log_factorial_table().get(n);
}

void reserve_log_factorials(Count n) {
    if (n >= 0) log_factorial_table().grow(n);
}

double log_choose(Count n, Count k) {
    if (k < 0 || k > n) {
        throw DomainError("log_choose requires 0 <= k <= n (n=" + std::to_string(n) +
                          ", k=" + std::to_string(k) + ")");
    }
    auto& table = log_factorial_table();
    return table.get(n) - table.get(k) - table.get(n - k);
}

double hg_logpmf(Count x, const HgParams& p) {
    p.validate();
    if (!p.contains(x)) {
        throw DomainError("outcome " + std::to_string(x) + " outside the hypergeometric support");
    }
    return log_choose(p.a, x) + log_choose(p.c - p.a, p.b - x) - log_choose(p.c, p.b);
}

namespace {

// Mass of the tail from `start` away from the mode up to `end`, walking the
// ratio recurrence. Terms shrink monotonically, so the walk stops once a
// geometric bound on the remainder is negligible.
double tail_mass(const HgParams& p, Count start, Count end, int step) {
    const double a = static_cast<double>(p.a);
    const double b = static_cast<double>(p.b);
    const double d = static_cast<double>(p.c - p.a - p.b);
    double term = std::exp(hg_logpmf(start, p));
    double sum = term;
    for (Count x = start; x != end && term > 0.0; x += step) {
        const double xd = static_cast<double>(x);
        const double ratio = step < 0 ? xd * (d + xd) / ((a - xd + 1) * (b - xd + 1))
                                      : (a - xd) * (b - xd) / ((xd + 1) * (d + xd + 1));
        term *= ratio;
        sum += term;
        if (ratio < 1.0 && term * ratio < sum * 1e-17 * (1.0 - ratio)) break;
    }
    return sum;
}

}  // namespace

FisherResult fisher_exact(const Table2x2& t, bool midp) {
    t.validate();
    const HgParams p = t.hg_params();
    const Count lo = p.support_min();
    const Count hi = p.support_max();
    const Count obs = t.n00;

    FisherResult res;
    if (lo == hi) {
        res.p = midp ? 0.5 : 1.0;
        res.observed_prob = 1.0;
        res.left_end = hi;
        res.right_begin = hi + 1;
        return res;
    }

    thread_local std::vector<double> rel;
    const Count mode = p.mode();
    const double total = relative_pmf(p, lo, hi, mode, rel);
    const double rel_obs = rel[obs - lo];

    if (rel_obs >= kUnderflowGuard) {
        const double threshold = rel_obs * (1.0 + kFisherTieTolerance);
        double included = 0.0;
        res.left_end = lo - 1;
        res.right_begin = hi + 1;
        for (Count x = lo; x <= mode && rel[x - lo] <= threshold; ++x) {
            included += rel[x - lo];
            res.left_end = x;
        }
        for (Count x = hi; x > res.left_end && rel[x - lo] <= threshold; --x) {
            included += rel[x - lo];
            res.right_begin = x;
        }
        res.p = included / total;
        res.observed_prob = rel_obs / total;
    } else {
        // The observed outcome is so far in a tail that the recurrence may have
        // underflowed; resolve the inclusion boundaries in log space instead.
        const double lp_obs = hg_logpmf(obs, p);
        const double threshold = lp_obs + std::log1p(kFisherTieTolerance);
        auto included = [&](Count x) { return hg_logpmf(x, p) <= threshold; };
        Count a = lo;
        Count b = mode;
        res.left_end = lo - 1;
        if (included(lo)) {
            while (a < b) {
                const Count mid = a + (b - a + 1) / 2;
                if (included(mid)) a = mid; else b = mid - 1;
            }
            res.left_end = a;
        }
        res.right_begin = hi + 1;
        if (included(hi) && hi > res.left_end) {
            a = std::max(mode, res.left_end + 1);
            b = hi;
            while (a < b) {
                const Count mid = a + (b - a) / 2;
                if (included(mid)) b = mid; else a = mid + 1;
            }
            res.right_begin = a;
        }
        double mass = 0.0;
        if (res.left_end >= lo) mass += tail_mass(p, res.left_end, lo, -1);
        if (res.right_begin <= hi) mass += tail_mass(p, res.right_begin, hi, +1);
        res.p = mass;
        res.observed_prob = std::exp(lp_obs);
    }

    if (midp) res.p -= 0.5 * res.observed_prob;
    res.p = std::clamp(res.p, 0.0, 1.0);
    return res;
}

Count hg_sample(const HgParams& p, Rng& rng) {
    p.validate();
    const Count lo = p.support_min();
    const Count hi = p.support_max();
    if (lo == hi) return lo;

    const Count mode = p.mode();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    double u = unif(rng);

    const double p_mode = std::exp(hg_logpmf(mode, p));
    u -= p_mode;
    if (u <= 0.0) return mode;

    Count xl = mode;
    Count xr = mode;
    double pl = p_mode;
    double pr = p_mode;
    for (;;) {
        const double next_l = xl > lo ? pl * ratio_down(xl, p) : -1.0;
        const double next_r = xr < hi ? pr * ratio_up(xr, p) : -1.0;
        if (next_l <= 0.0 && next_r <= 0.0) return mode;  // rounding leftover
        if (next_l >= next_r) {
            --xl;
            pl = next_l;
            u -= pl;
            if (u <= 0.0) return xl;
        } else {
            ++xr;
            pr = next_r;
            u -= pr;
            if (u <= 0.0) return xr;
        }
    }
}

}  // namespace fes
