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
#include <set>

#include "fes/errors.hpp"
#include "fes/simlab.hpp"

namespace fes {
namespace {

double correlation(const PointSet& pts) {
    const double n = static_cast<double>(pts.size());
    double mx = 0, my = 0;
    for (const auto& p : pts) {
        mx += p.x;
        my += p.y;
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (const auto& p : pts) {
        sxy += (p.x - mx) * (p.y - my);
        sxx += (p.x - mx) * (p.x - mx);
        syy += (p.y - my) * (p.y - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

TEST(Scenario, ParseAndDefaults) {
    EXPECT_EQ(parse_scenario("checkerboard"), ScenarioKind::checkerboard);
    EXPECT_EQ(to_string(ScenarioKind::local), "local");
    EXPECT_THROW(parse_scenario("spiral"), ConfigError);
    EXPECT_EQ(default_sample_size(ScenarioKind::linear), 300);
    EXPECT_EQ(default_sample_size(ScenarioKind::checkerboard), 500);
    EXPECT_EQ(default_sample_size(ScenarioKind::local), 1000);
    EXPECT_THROW((Scenario{ScenarioKind::sine, 100, 0}).validate(), ConfigError);
    EXPECT_THROW((Scenario{ScenarioKind::sine, 100, 21}).validate(), ConfigError);
    EXPECT_DOUBLE_EQ((Scenario{ScenarioKind::sine, 100, 7}).noise_sd(), 0.35);
}

TEST(Generate, LinearCorrelationMatchesClosedForm) {
    // Corr(U, U + 3e) with sd(e) = 1: 1 / sqrt(1 + 9 * 12).
    Rng rng(1);
    const auto pts = generate({ScenarioKind::linear, 100'000, 20}, rng);
    const double rho = 1.0 / std::sqrt(109.0);
    const double se = (1.0 - rho * rho) / std::sqrt(100'000.0);
    EXPECT_NEAR(correlation(pts), rho, 3.0 * se);
}

TEST(Generate, ScenarioSupports) {
    Rng rng(2);
    for (const auto& p : generate({ScenarioKind::checkerboard, 2000, 1}, rng)) {
        const double w = std::round(p.x);
        const double v = std::round(p.y);
        ASSERT_TRUE(w >= 1 && w <= 3);
        if (static_cast<int>(w) % 2 == 1) {
            ASSERT_TRUE(v == 1 || v == 3 || v == 5);
        } else {
            ASSERT_TRUE(v == 2 || v == 4);
        }
    }
    for (const auto& p : generate({ScenarioKind::circular, 2000, 1}, rng)) {
        ASSERT_NEAR(std::hypot(p.x, p.y), 1.0, 0.35);  // noise sd 0.05 per axis
    }
    // Local: points off the dependent region cannot land in [0,0.7]^2. Inside it,
    // Y - X ~ N(0, s/4), so the expected share is a one-dimensional integral.
    std::size_t close = 0;
    const auto local = generate({ScenarioKind::local, 20'000, 2}, rng);
    for (const auto& p : local) {
        const bool in_box = p.x >= 0 && p.x <= 0.7 && p.y >= 0 && p.y <= 0.7;
        close += (in_box && std::abs(p.y - p.x) < 0.1) ? 1 : 0;
    }
    const double sd = 0.1;
    const double sd_diff = 0.25 * sd;
    const auto cdf = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    const double p_other = cdf(0.7 / sd) - 0.5;
    const int steps = 4000;
    const double h = 0.7 / steps;
    double integral = 0;
    for (int k = 0; k < steps; ++k) {
        const double x = (k + 0.5) * h;
        const double dens = std::exp(-0.5 * (x / sd) * (x / sd)) / (sd * std::sqrt(2.0 * M_PI));
        const double hi = std::min(0.1, 0.7 - x);
        const double lo = std::max(-0.1, -x);
        integral += dens * (cdf(hi / sd_diff) - cdf(lo / sd_diff)) * h;
    }
    const double expected = p_other * integral;
    const double se = std::sqrt(expected * (1 - expected) / 20'000.0);
    EXPECT_NEAR(static_cast<double>(close) / 20'000.0, expected, 4.0 * se);
}

TEST(Generate, NullIsStandardNormal) {
    Rng rng(3);
    const auto pts = generate({ScenarioKind::null, 50'000, 5}, rng);
    double sx = 0, sxx = 0;
    for (const auto& p : pts) {
        sx += p.x;
        sxx += p.x * p.x;
    }
    EXPECT_NEAR(sx / 50'000, 0.0, 0.02);
    EXPECT_NEAR(sxx / 50'000, 1.0, 0.03);
    EXPECT_NEAR(correlation(pts), 0.0, 3.0 / std::sqrt(50'000.0));
}

TEST(Pearson, PerfectLineHitsTheFloor) {
    PointSet pts;
    for (int k = 0; k < 50; ++k) pts.push_back({double(k), 2.0 * k + 1.0});
    Rng rng(1);
    EXPECT_DOUBLE_EQ(pearson_permutation_p(pts, 999, rng), 1.0 / 1000.0);
}

TEST(Pearson, ConstantMarginAndArgumentChecks) {
    PointSet pts{{1.0, 2.0}, {1.0, 3.0}, {1.0, 5.0}};
    Rng rng(1);
    EXPECT_EQ(pearson_permutation_p(pts, 99, rng), 1.0);
    EXPECT_THROW(pearson_permutation_p(pts, 98, rng), ConfigError);
}

TEST(Pearson, NullRejectionRateNearLevel) {
    MonteCarloOptions opt;
    opt.replicates = 1000;
    opt.seed = 77;
    opt.threads = 4;
    const auto res = estimate_pearson_power({ScenarioKind::null, 500, 1}, 0.05, 199, opt);
    EXPECT_NEAR(res.power, 0.05, 0.02);
}

TEST(Pearson, LocalDependenceMostlyMissed) {
    int above = 0;
    for (std::uint64_t r = 0; r < 20; ++r) {
        Rng rng = substream(4, r);
        const auto pts = generate({ScenarioKind::local, 1000, 10}, rng);
        above += pearson_permutation_p(pts, 199, rng) > 0.05 ? 1 : 0;
    }
    EXPECT_GE(above, 14);
}

TEST(EstimatePower, SingleReplicateIsZeroOrOne) {
    MonteCarloOptions opt;
    opt.replicates = 1;
    const auto res = estimate_power({ScenarioKind::sine, 300, 2}, FesConfig::defaults_for(300), opt);
    EXPECT_TRUE(res.power == 0.0 || res.power == 1.0);
    EXPECT_FALSE(res.mean_runtime_ms.has_value());
}

TEST(EstimatePower, ReproducibleAndThreadIndependent) {
    const Scenario s{ScenarioKind::parabolic, 300, 9};
    MonteCarloOptions opt;
    opt.replicates = 200;
    opt.seed = 31;
    const auto a = estimate_power(s, FesConfig::defaults_for(300), opt);
    opt.threads = 5;
    const auto b = estimate_power(s, FesConfig::defaults_for(300), opt);
    EXPECT_EQ(a.rejections, b.rejections);
    EXPECT_EQ(a.power, b.power);
    EXPECT_EQ(a.std_error, b.std_error);
    opt.seed = 32;
    const auto c = estimate_power(s, FesConfig::defaults_for(300), opt);
    EXPECT_EQ(c.replicates, 200);
}

TEST(EstimatePower, NearNoiselessLinearIsAlwaysDetected) {
    MonteCarloOptions opt;
    opt.replicates = 200;
    opt.threads = 4;
    const auto res = estimate_power({ScenarioKind::linear, 300, 1}, FesConfig::defaults_for(300), opt);
    EXPECT_GE(res.power, 0.99);
}

TEST(EstimatePower, TimingIsOptIn) {
    MonteCarloOptions opt;
    opt.replicates = 5;
    opt.measure_time = true;
    const auto res = estimate_power({ScenarioKind::null, 200, 1}, FesConfig::defaults_for(200), opt);
    ASSERT_TRUE(res.mean_runtime_ms.has_value());
    EXPECT_GT(*res.mean_runtime_ms, 0.0);
}

TEST(EstimatePower, PowerDoesNotIncreaseWithNoise) {
    for (auto kind : {ScenarioKind::linear, ScenarioKind::sine, ScenarioKind::circular, ScenarioKind::parabolic,
                      ScenarioKind::checkerboard, ScenarioKind::local}) {
        const Scenario base{kind, default_sample_size(kind), 1};
        const auto cfg = FesConfig::defaults_for(base.n);
        std::vector<MonteCarloResult> curve;
        for (int l : {2, 8, 14, 20}) {
            MonteCarloOptions opt;
            opt.replicates = 200;
            opt.seed = 500 + static_cast<std::uint64_t>(l);
            opt.threads = 4;
            Scenario s = base;
            s.noise_level = l;
            curve.push_back(estimate_power(s, cfg, opt));
        }
        for (std::size_t k = 1; k < curve.size(); ++k) {
            const double se = std::hypot(curve[k].std_error, curve[k - 1].std_error);
            EXPECT_LE(curve[k].power, curve[k - 1].power + 3.0 * std::max(se, 0.01)) << to_string(kind);
        }
    }
}

TEST(EstimatePower, NullRateRobustToResolutionShift) {
    const Count n = 1000;
    const auto base = FesConfig::defaults_for(n);
    std::vector<double> rates;
    for (int shift : {-1, 0, 1}) {
        FesConfig cfg = base;
        cfg.k1 = cfg.k2 = base.k1 + shift;
        cfg.max_resolution = cfg.k1 - 1;
        MonteCarloOptions opt;
        opt.replicates = 1500;
        opt.seed = 808;
        opt.threads = 4;
        rates.push_back(estimate_power({ScenarioKind::null, n, 1}, cfg, opt).power);
    }
    EXPECT_LE(std::abs(rates[0] - rates[1]), 0.03);
    EXPECT_LE(std::abs(rates[2] - rates[1]), 0.03);
}

}  // namespace
}  // namespace fes
