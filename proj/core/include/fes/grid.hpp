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
 * @file grid.hpp
 *
 * Marginal rank preprocessing, dyadic binning into a 2^k1 x 2^k2 count grid
 * and constant-time retrieval of any dyadic window's 2x2 subtable.
 *
 * Axis convention: the first coordinate (x) indexes grid rows, the second (y)
 * indexes columns. A level-(i, j) window with 1-based indices (l1, l2) is
 * [(l1 - 1) / 2^i, l1 / 2^i) x [(l2 - 1) / 2^j, l2 / 2^j). Its 2x2 table
 * splits each side in half; cell n_ab holds the x-half a and y-half b.
 */

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fes/exactstats.hpp"
#include "fes/random.hpp"

namespace fes {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

using PointSet = std::vector<Point>;

/// Throws DomainError if the set is empty or holds a non-finite coordinate.
void validate_points(std::span<const Point> points);

/// Replaces each margin by (rank - 1) / n, ranks running 1..n. Ties are broken
/// uniformly at random from `rng`; the random keys are drawn before looking at
/// the data, so any strictly increasing transform of a margin gives the same
/// output for the same stream state.
PointSet rank_transform(std::span<const Point> points, Rng& rng);

/// Axis-aligned box used to map raw data into [0, 1)^2 without ranking.
struct BoundingBox {
    double x_min = 0.0;
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 1.0;

    /// The data's own extent.
    static BoundingBox enclosing(std::span<const Point> points);
};

/// Affine map of `box` onto [0, 1)^2. Points on the upper edges land in the
/// last bin; points outside the box raise DomainError.
PointSet normalize_to_unit_square(std::span<const Point> points, const BoundingBox& box);

/// Finest-level cell counts plus a summed-area table. Immutable once built.
class CountGrid {
public:
    CountGrid() = default;

    int k1() const noexcept { return k1_; }
    int k2() const noexcept { return k2_; }
    std::int64_t rows() const noexcept { return std::int64_t{1} << k1_; }
    std::int64_t cols() const noexcept { return std::int64_t{1} << k2_; }
    Count total() const noexcept { return total_; }

    /// 0-based finest-level cell.
    Count cell(std::int64_t row, std::int64_t col) const;

    /// Count over rows [r0, r1) and columns [c0, c1), finest-level indices.
    Count rect_sum(std::int64_t r0, std::int64_t r1, std::int64_t c0, std::int64_t c1) const noexcept {
        const auto w = cols() + 1;
        return sat_[r1 * w + c1] - sat_[r0 * w + c1] - sat_[r1 * w + c0] + sat_[r0 * w + c0];
    }

    std::span<const Count> cells() const noexcept { return cells_; }

    /// Builds a grid from precomputed finest-level counts (row-major).
    static CountGrid from_cells(int k1, int k2, std::vector<Count> cells);

private:
    void build_sat();

    int k1_ = 0;
    int k2_ = 0;
    Count total_ = 0;
    std::vector<Count> cells_;
    std::vector<Count> sat_;  // (rows + 1) x (cols + 1); sat[r][c] = sum of cells above-left
};

/// Bins points in [0, 1)^2 into half-open dyadic cells at levels (k1, k2).
/// Throws DomainError for coordinates outside [0, 1), ConfigError for
/// negative or oversized levels.
CountGrid build_grid(std::span<const Point> points, int k1, int k2);

struct Window {
    int i = 0;
    int j = 0;
    std::int64_t l1 = 1;  ///< 1-based, in 1..2^i
    std::int64_t l2 = 1;  ///< 1-based, in 1..2^j
    Table2x2 table;

    int resolution() const noexcept { return i + j; }

    /// Rectangle in the unit square: {x0, x1, y0, y1}.
    struct Rect {
        double x0, x1, y0, y1;
    };
    Rect rect() const noexcept;

    friend bool operator==(const Window&, const Window&) = default;
};

/// The level-(i, j) window (l1, l2) with its quadrant counts. Requires
/// i <= g.k1() - 1 and j <= g.k2() - 1 (ResolutionError otherwise) and valid
/// indices (DomainError otherwise).
Window window_table(const CountGrid& g, int i, int j, std::int64_t l1, std::int64_t l2);

/// Cell probabilities on a 2^k1 x 2^k2 grid, row-major.
struct ProbabilityGrid {
    int k1 = 0;
    int k2 = 0;
    std::vector<double> mass;

    double rect_mass(std::int64_t r0, std::int64_t r1, std::int64_t c0, std::int64_t c1) const;
};

/// Population log odds ratio log(F(A00) F(A11) / (F(A01) F(A10))) of a window.
/// nullopt when any quadrant has zero mass.
std::optional<double> population_lor(const ProbabilityGrid& pmf, int i, int j, std::int64_t l1,
                                     std::int64_t l2);

}  // namespace fes
