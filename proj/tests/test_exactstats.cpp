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
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "fes/errors.hpp"
#include "fes/exactstats.hpp"
#include "support/oracles.hpp"

namespace fes {
namespace {

TEST(LogChoose, Examples) {
    EXPECT_EQ(log_choose(0, 0), 0.0);
    EXPECT_NEAR(log_choose(4, 2), 1.791759469228055, 1e-12);
    EXPECT_EQ(log_choose(10, 10), 0.0);
}

TEST(LogChoose, RejectsOutOfRange) {
    EXPECT_THROW(log_choose(5, -1), DomainError);
    EXPECT_THROW(log_choose(5, 6), DomainError);
    EXPECT_THROW(log_factorial(-1), DomainError);
}

TEST(LogChoose, MatchesExactSumOfLogs) {
    // ln C(n, k) = sum_{i=1..k} ln((n - k + i) / i), accumulated in long double.
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 400; ++rep) {
        const Count n = std::uniform_int_distribution<Count>(0, 1000)(rng);
        const Count k = std::uniform_int_distribution<Count>(0, n)(rng);
        long double ref = 0.0L;
        for (Count i = 1; i <= k; ++i) {
            ref += std::log(static_cast<long double>(n - k + i)) - std::log(static_cast<long double>(i));
        }
        EXPECT_NEAR(log_choose(n, k), static_cast<double>(ref), 1e-12) << n << " choose " << k;
    }
}

TEST(LogChoose, LargeArgumentsHaveSmallRelativeError) {
    for (Count n : {Count{100'000}, Count{3'000'000}, Count{10'000'000}}) {
        const Count k = n / 3;
        const long double ref = std::lgamma(static_cast<long double>(n) + 1) -
                                std::lgamma(static_cast<long double>(k) + 1) -
                                std::lgamma(static_cast<long double>(n - k) + 1);
        EXPECT_NEAR(log_choose(n, k) / static_cast<double>(ref), 1.0, 1e-13);
    }
}

TEST(HgLogPmf, Examples) {
    EXPECT_EQ(hg_logpmf(0, {3, 0, 5}), 0.0);
    EXPECT_NEAR(hg_logpmf(1, {1, 1, 2}), std::log(0.5), 1e-14);
    EXPECT_NEAR(hg_logpmf(2, {2, 2, 4}), std::log(1.0 / 6.0), 1e-14);
}

TEST(HgLogPmf, RejectsOutsideSupport) {
    EXPECT_THROW(hg_logpmf(3, {2, 2, 4}), DomainError);
    EXPECT_THROW(hg_logpmf(0, {3, 3, 4}), DomainError);  // support starts at 2
    EXPECT_THROW(hg_logpmf(0, {5, 1, 4}), DomainError);
}

TEST(HgLogPmf, SumsToOneOverSupport) {
    // Exhaustive for c <= 40, random parameters up to c = 200.
    auto check = [](const HgParams& p) {
        double total = 0.0;
        for (Count x = p.support_min(); x <= p.support_max(); ++x) total += std::exp(hg_logpmf(x, p));
        EXPECT_NEAR(total, 1.0, 1e-10) << p.a << ' ' << p.b << ' ' << p.c;
    };
    for (Count c = 0; c <= 40; ++c) {
        for (Count a = 0; a <= c; ++a) {
            for (Count b = 0; b <= c; ++b) check({a, b, c});
        }
    }
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 3000; ++rep) {
        const Count c = std::uniform_int_distribution<Count>(41, 200)(rng);
        check({std::uniform_int_distribution<Count>(0, c)(rng), std::uniform_int_distribution<Count>(0, c)(rng), c});
    }
}

TEST(Fisher, Examples) {
    EXPECT_EQ(fisher_two_sided_p({0, 0, 3, 5}, false), 1.0);
    EXPECT_EQ(fisher_two_sided_p({0, 0, 3, 5}, true), 0.5);
    EXPECT_NEAR(fisher_two_sided_p({3, 1, 1, 3}, false), 34.0 / 70.0, 1e-12);
    EXPECT_NEAR(fisher_two_sided_p({2, 0, 0, 2}, false), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(fisher_two_sided_p({2, 0, 0, 2}, true), 1.0 / 4.0, 1e-12);
}

TEST(Fisher, NegativeCellIsDomainError) {
    EXPECT_THROW(fisher_two_sided_p({-1, 2, 3, 4}, false), DomainError);
}

TEST(Fisher, DegenerateMarginsGiveOne) {
    for (Table2x2 t : {Table2x2{0, 0, 4, 9}, Table2x2{5, 0, 7, 0}, Table2x2{0, 0, 0, 0}, Table2x2{6, 2, 0, 0}}) {
        EXPECT_EQ(fisher_two_sided_p(t, false), 1.0);
        EXPECT_EQ(fisher_two_sided_p(t, true), 0.5);
    }
}

TEST(Fisher, InclusionSetMatchesBruteForce) {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<Count> cell(0, 50);
    for (int rep = 0; rep < 2000; ++rep) {
        const Table2x2 t{cell(rng), cell(rng), cell(rng), cell(rng)};
        for (bool midp : {false, true}) {
            const auto got = fisher_exact(t, midp);
            const auto ref = oracle::brute_fisher(t.n00, t.n01, t.n10, t.n11, midp);
            EXPECT_NEAR(got.p, ref.p, 1e-12);
            const Count lo = t.hg_params().support_min();
            for (std::size_t k = 0; k < ref.included.size(); ++k) {
                const Count x = lo + static_cast<Count>(k);
                const bool in = x <= got.left_end || x >= got.right_begin;
                ASSERT_EQ(in, ref.included[k]) << "x=" << x;
            }
        }
    }
}

TEST(Fisher, FarTailUsesLogSpaceBoundaries) {
    // Observed outcome ~1e-600 relative to the mode: the ratio recurrence underflows.
    const Table2x2 t{2000, 0, 0, 2000};
    const auto r = fisher_exact(t, false);
    EXPECT_GE(r.p, 0.0);
    EXPECT_LT(r.p, 1e-300);
    EXPECT_EQ(r.left_end, 0);  // symmetric: the other extreme ties
    EXPECT_EQ(r.right_begin, 2000);

    const Table2x2 skew{1900, 100, 100, 1900};
    const auto s = fisher_exact(skew, true);
    EXPECT_LE(s.p, 1e-300);
    EXPECT_EQ(s.right_begin, 1900);
    EXPECT_EQ(s.left_end, 100);
}

TEST(Fisher, SymmetricUnderRowColumnSwapsAndTranspose) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<Count> cell(0, 40);
    for (int rep = 0; rep < 1000; ++rep) {
        const Table2x2 t{cell(rng), cell(rng), cell(rng), cell(rng)};
        for (bool midp : {false, true}) {
            const double p = fisher_two_sided_p(t, midp);
            EXPECT_NEAR(fisher_two_sided_p({t.n10, t.n11, t.n00, t.n01}, midp), p, 1e-12);
            EXPECT_NEAR(fisher_two_sided_p({t.n01, t.n00, t.n11, t.n10}, midp), p, 1e-12);
            EXPECT_NEAR(fisher_two_sided_p({t.n00, t.n10, t.n01, t.n11}, midp), p, 1e-12);
        }
    }
}

TEST(Fisher, MidpIsSmallerAndBothInUnitInterval) {
    std::mt19937_64 rng(9);
    std::uniform_int_distribution<Count> cell(0, 30);
    for (int rep = 0; rep < 1000; ++rep) {
        const Table2x2 t{cell(rng), cell(rng), cell(rng), cell(rng)};
        const double p = fisher_two_sided_p(t, false);
        const double mid = fisher_two_sided_p(t, true);
        EXPECT_LT(mid, p);
        EXPECT_GE(mid, 0.0);
        EXPECT_LE(p, 1.0);
    }
}

TEST(Fisher, ValidUnderNullExhaustively) {
    // For every margin triple with c <= 50: P(p <= level) <= level at every
    // attainable level, the worst case over all alpha.
    for (Count c = 1; c <= 50; ++c) {
        for (Count a = 0; a <= c; ++a) {
            for (Count b = 0; b <= a; ++b) {
                const HgParams hp{a, b, c};
                std::vector<std::pair<double, double>> by_p;  // (p-value, pmf)
                for (Count x = hp.support_min(); x <= hp.support_max(); ++x) {
                    const Table2x2 t{x, a - x, b - x, c - a - b + x};
                    by_p.emplace_back(fisher_two_sided_p(t, false), std::exp(hg_logpmf(x, hp)));
                }
                std::sort(by_p.begin(), by_p.end());
                double cumulative = 0.0;
                for (std::size_t k = 0; k < by_p.size(); ++k) {
                    cumulative += by_p[k].second;
                    if (k + 1 < by_p.size() && by_p[k + 1].first == by_p[k].first) continue;
                    ASSERT_LE(cumulative, by_p[k].first + 1e-9) << a << ' ' << b << ' ' << c;
                }
            }
        }
    }
}

TEST(HgSample, SinglePointSupport) {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(hg_sample({3, 0, 5}, rng), 0);
    EXPECT_EQ(hg_sample({4, 4, 4}, rng), 4);
}

TEST(HgSample, MeanMatchesExactExpectation) {
    Rng rng(1);
    const HgParams p{5, 5, 10};
    const int draws = 1'000'000;
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(hg_sample(p, rng));
    // Var = ab(c-a)(c-b) / (c^2 (c-1))
    const double var = 5.0 * 5.0 * 5.0 * 5.0 / (100.0 * 9.0);
    EXPECT_NEAR(sum / draws, 2.5, 3.0 * std::sqrt(var / draws));
}

TEST(HgSample, FairCoinCase) {
    Rng rng(99);
    const int draws = 100'000;
    int ones = 0;
    for (int i = 0; i < draws; ++i) ones += hg_sample({1, 1, 2}, rng) == 1 ? 1 : 0;
    EXPECT_NEAR(static_cast<double>(ones) / draws, 0.5, 3.0 * std::sqrt(0.25 / draws));
}

TEST(HgSample, GoodnessOfFitBattery) {
    const std::vector<HgParams> battery{{5, 5, 10}, {3, 7, 20}, {40, 25, 100}, {150, 300, 400},
                                        {1, 9, 10}, {500, 500, 1000}, {12, 88, 90}};
    Rng rng(31337);
    for (const auto& p : battery) {
        const auto ref = oracle::hg_support(p.a, p.b, p.c);
        std::vector<double> probs(ref.pmf.begin(), ref.pmf.end());
        std::vector<double> counts(probs.size(), 0.0);
        const int draws = 200'000;
        for (int i = 0; i < draws; ++i) {
            const Count x = hg_sample(p, rng);
            ASSERT_TRUE(p.contains(x));
            counts[static_cast<std::size_t>(x - ref.lo)] += 1.0;
        }
        EXPECT_GT(oracle::chi_square_gof(counts, probs, draws), 0.001) << p.a << ' ' << p.b << ' ' << p.c;
    }
}

TEST(HgParams, ValidationAndMode) {
    EXPECT_THROW(HgParams({6, 1, 5}).validate(), DomainError);
    EXPECT_THROW(HgParams({-1, 1, 5}).validate(), DomainError);
    EXPECT_EQ(HgParams({5, 5, 10}).mode(), 3);
    EXPECT_EQ(HgParams({9, 9, 10}).mode(), 8);
}

TEST(Table2x2, MarginsAndEmpiricalLor) {
    const Table2x2 t{4, 1, 2, 8};
    EXPECT_EQ(t.total(), 15);
    EXPECT_EQ(t.row0(), 5);
    EXPECT_EQ(t.col0(), 6);
    EXPECT_EQ(t.min_margin(), 5);
    EXPECT_NEAR(*t.empirical_lor(), std::log(32.0 / 2.0), 1e-14);
    EXPECT_FALSE(Table2x2({0, 1, 2, 3}).empirical_lor().has_value());
}

}  // namespace
}  // namespace fes
