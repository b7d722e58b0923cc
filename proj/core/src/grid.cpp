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
#include "fes/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fes/errors.hpp"

namespace fes {

namespace {

constexpr int kMaxTotalLevel = 28;

void check_levels(int k1, int k2) {
    if (k1 < 0 || k2 < 0 || k1 + k2 > kMaxTotalLevel) {
        throw ConfigError("grid levels must satisfy k1, k2 >= 0 and k1 + k2 <= " +
                          std::to_string(kMaxTotalLevel));
    }
}

// Ranks 0..n-1 of one margin, ordering ties by the supplied random keys.
std::vector<std::size_t> margin_ranks(std::span<const Point> points, double Point::*coord,
                                      std::span<const std::uint64_t> keys) {
    const std::size_t n = points.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double va = points[a].*coord;
        const double vb = points[b].*coord;
        if (va != vb) return va < vb;
        if (keys[a] != keys[b]) return keys[a] < keys[b];
        return a < b;
    });
    std::vector<std::size_t> rank(n);
    for (std::size_t r = 0; r < n; ++r) rank[order[r]] = r;
    return rank;
}

}  // namespace

void validate_points(std::span<const Point> points) {
    if (points.empty()) throw DomainError("point set is empty");
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i].x) || !std::isfinite(points[i].y)) {
            throw DomainError("non-finite coordinate at observation " + std::to_string(i + 1));
        }
    }
}

PointSet rank_transform(std::span<const Point> points, Rng& rng) {
    validate_points(points);
    const std::size_t n = points.size();
    std::vector<std::uint64_t> x_keys(n);
    std::vector<std::uint64_t> y_keys(n);
    for (auto& k : x_keys) k = rng();
    for (auto& k : y_keys) k = rng();

    const auto rx = margin_ranks(points, &Point::x, x_keys);
    const auto ry = margin_ranks(points, &Point::y, y_keys);
    const auto dn = static_cast<double>(n);
    PointSet out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = {static_cast<double>(rx[i]) / dn, static_cast<double>(ry[i]) / dn};
    }
    return out;
}

BoundingBox BoundingBox::enclosing(std::span<const Point> points) {
    validate_points(points);
    BoundingBox box{points[0].x, points[0].x, points[0].y, points[0].y};
    for (const auto& p : points) {
        box.x_min = std::min(box.x_min, p.x);
        box.x_max = std::max(box.x_max, p.x);
        box.y_min = std::min(box.y_min, p.y);
        box.y_max = std::max(box.y_max, p.y);
    }
    return box;
}

PointSet normalize_to_unit_square(std::span<const Point> points, const BoundingBox& box) {
    validate_points(points);
    if (!(box.x_max > box.x_min) || !(box.y_max > box.y_min)) {
        throw DomainError("bounding box must have positive width and height");
    }
    const double below_one = std::nextafter(1.0, 0.0);
    auto map = [&](double v, double lo, double hi) {
        if (v < lo || v > hi) throw DomainError("observation outside the bounding box");
        return std::min((v - lo) / (hi - lo), below_one);
    };
    PointSet out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        out[i] = {map(points[i].x, box.x_min, box.x_max), map(points[i].y, box.y_min, box.y_max)};
    }
    return out;
}

Count CountGrid::cell(std::int64_t row, std::int64_t col) const {
    if (row < 0 || row >= rows() || col < 0 || col >= cols()) {
        throw DomainError("grid cell index out of range");
    }
    return cells_[static_cast<std::size_t>(row * cols() + col)];
}

void CountGrid::build_sat() {
    const auto R = rows();
    const auto C = cols();
    const auto w = C + 1;
    sat_.assign(static_cast<std::size_t>((R + 1) * w), 0);
    for (std::int64_t r = 0; r < R; ++r) {
        Count row_sum = 0;
        for (std::int64_t c = 0; c < C; ++c) {
            row_sum += cells_[r * C + c];
            sat_[(r + 1) * w + c + 1] = sat_[r * w + c + 1] + row_sum;
        }
    }
    total_ = sat_[R * w + C];
}

CountGrid CountGrid::from_cells(int k1, int k2, std::vector<Count> cells) {
    check_levels(k1, k2);
    CountGrid g;
    g.k1_ = k1;
    g.k2_ = k2;
    if (static_cast<std::int64_t>(cells.size()) != g.rows() * g.cols()) {
        throw DomainError("cell vector size does not match 2^k1 x 2^k2");
    }
    if (std::any_of(cells.begin(), cells.end(), [](Count c) { return c < 0; })) {
        throw DomainError("negative cell count");
    }
    g.cells_ = std::move(cells);
    g.build_sat();
    return g;
}

CountGrid build_grid(std::span<const Point> points, int k1, int k2) {
    check_levels(k1, k2);
    const std::int64_t R = std::int64_t{1} << k1;
    const std::int64_t C = std::int64_t{1} << k2;
    const double sx = std::ldexp(1.0, k1);
    const double sy = std::ldexp(1.0, k2);
    std::vector<Count> cells(static_cast<std::size_t>(R * C), 0);
    for (const auto& p : points) {
        if (!(p.x >= 0.0 && p.x < 1.0 && p.y >= 0.0 && p.y < 1.0)) {
            throw DomainError("coordinate outside [0, 1)");
        }
        const auto r = static_cast<std::int64_t>(p.x * sx);
        const auto c = static_cast<std::int64_t>(p.y * sy);
        ++cells[static_cast<std::size_t>(r * C + c)];
    }
    return CountGrid::from_cells(k1, k2, std::move(cells));
}

Window::Rect Window::rect() const noexcept {
    const double wx = std::ldexp(1.0, -i);
    const double wy = std::ldexp(1.0, -j);
    return {static_cast<double>(l1 - 1) * wx, static_cast<double>(l1) * wx,
            static_cast<double>(l2 - 1) * wy, static_cast<double>(l2) * wy};
}

Window window_table(const CountGrid& g, int i, int j, std::int64_t l1, std::int64_t l2) {
    if (i < 0 || j < 0 || i > g.k1() - 1 || j > g.k2() - 1) {
        throw ResolutionError("window level (" + std::to_string(i) + ", " + std::to_string(j) +
                              ") needs a grid finer than (" + std::to_string(g.k1()) + ", " +
                              std::to_string(g.k2()) + ")");
    }
    if (l1 < 1 || l1 > (std::int64_t{1} << i) || l2 < 1 || l2 > (std::int64_t{1} << j)) {
        throw DomainError("window index out of range for its level");
    }
    const std::int64_t hx = std::int64_t{1} << (g.k1() - i - 1);  // half-height in cells
    const std::int64_t hy = std::int64_t{1} << (g.k2() - j - 1);
    const std::int64_t r0 = (l1 - 1) * 2 * hx;
    const std::int64_t c0 = (l2 - 1) * 2 * hy;

    Window w{i, j, l1, l2, {}};
    w.table.n00 = g.rect_sum(r0, r0 + hx, c0, c0 + hy);
    w.table.n01 = g.rect_sum(r0, r0 + hx, c0 + hy, c0 + 2 * hy);
    w.table.n10 = g.rect_sum(r0 + hx, r0 + 2 * hx, c0, c0 + hy);
    w.table.n11 = g.rect_sum(r0 + hx, r0 + 2 * hx, c0 + hy, c0 + 2 * hy);
    return w;
}

double ProbabilityGrid::rect_mass(std::int64_t r0, std::int64_t r1, std::int64_t c0,
                                  std::int64_t c1) const {
    const std::int64_t C = std::int64_t{1} << k2;
    double s = 0.0;
    for (auto r = r0; r < r1; ++r) {
        for (auto c = c0; c < c1; ++c) s += mass[static_cast<std::size_t>(r * C + c)];
    }
    return s;
}

std::optional<double> population_lor(const ProbabilityGrid& pmf, int i, int j, std::int64_t l1,
                                     std::int64_t l2) {
    if (i < 0 || j < 0 || i > pmf.k1 - 1 || j > pmf.k2 - 1) {
        throw ResolutionError("window level exceeds probability grid resolution");
    }
    const std::int64_t hx = std::int64_t{1} << (pmf.k1 - i - 1);
    const std::int64_t hy = std::int64_t{1} << (pmf.k2 - j - 1);
    const std::int64_t r0 = (l1 - 1) * 2 * hx;
    const std::int64_t c0 = (l2 - 1) * 2 * hy;
    const double f00 = pmf.rect_mass(r0, r0 + hx, c0, c0 + hy);
    const double f01 = pmf.rect_mass(r0, r0 + hx, c0 + hy, c0 + 2 * hy);
    const double f10 = pmf.rect_mass(r0 + hx, r0 + 2 * hx, c0, c0 + hy);
    const double f11 = pmf.rect_mass(r0 + hx, r0 + 2 * hx, c0 + hy, c0 + 2 * hy);
    if (f00 <= 0.0 || f01 <= 0.0 || f10 <= 0.0 || f11 <= 0.0) return std::nullopt;
    return std::log(f00) + std::log(f11) - std::log(f01) - std::log(f10);
}

}  // namespace fes
