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

// Test-only reference computations. Nothing here calls into the code under
// test's pmf or tail machinery.

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace fes::oracle {

/// Exact HG pmf over the whole support via lgammal, normalized.
struct HgSupport {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::vector<long double> pmf;
};

inline long double lfact(std::int64_t n) { return std::lgamma(static_cast<long double>(n) + 1.0L); }

inline HgSupport hg_support(std::int64_t a, std::int64_t b, std::int64_t c) {
    HgSupport s;
    s.lo = std::max<std::int64_t>(0, a + b - c);
    s.hi = std::min(a, b);
    long double total = 0.0L;
    for (auto x = s.lo; x <= s.hi; ++x) {
        const long double lp = lfact(a) + lfact(c - a) + lfact(b) + lfact(c - b) - lfact(c) - lfact(x) -
                               lfact(a - x) - lfact(b - x) - lfact(c - a - b + x);
        s.pmf.push_back(std::exp(lp));
        total += s.pmf.back();
    }
    for (auto& v : s.pmf) v /= total;
    return s;
}

struct BruteFisher {
    double p = 1.0;
    std::vector<bool> included;  ///< indexed by x - lo
};

/// Sum of pmf(x) over all x with pmf(x) <= pmf(obs) * (1 + tol), by full enumeration.
inline BruteFisher brute_fisher(std::int64_t n00, std::int64_t n01, std::int64_t n10, std::int64_t n11,
                                bool midp, double tol = 1e-7) {
    const auto s = hg_support(n00 + n01, n00 + n10, n00 + n01 + n10 + n11);
    const long double obs = s.pmf[static_cast<std::size_t>(n00 - s.lo)];
    BruteFisher out;
    out.included.resize(s.pmf.size());
    long double p = 0.0L;
    for (std::size_t k = 0; k < s.pmf.size(); ++k) {
        out.included[k] = s.pmf[k] <= obs * (1.0L + tol);
        if (out.included[k]) p += s.pmf[k];
    }
    if (midp) p -= 0.5L * obs;
    out.p = std::clamp(static_cast<double>(p), 0.0, 1.0);
    return out;
}

/// Pearson chi-square goodness of fit. Categories with expected count below
/// `min_expected` are pooled into one bin. Returns the upper-tail p-value.
inline double chi_square_gof(const std::vector<double>& observed, const std::vector<double>& probs,
                             double draws, double min_expected = 5.0) {
    double stat = 0.0;
    int bins = 0;
    double pooled_obs = 0.0;
    double pooled_exp = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        const double e = probs[k] * draws;
        if (e < min_expected) {
            pooled_obs += observed[k];
            pooled_exp += e;
            continue;
        }
        stat += (observed[k] - e) * (observed[k] - e) / e;
        ++bins;
    }
    if (pooled_exp > 0.0) {
        stat += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
        ++bins;
    }
    if (bins < 2) return 1.0;
    boost::math::chi_squared dist(bins - 1);
    return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace fes::oracle
