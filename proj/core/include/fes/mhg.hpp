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
 * @file mhg.hpp
 *
 * The multivariate hypergeometric (MHG) distribution of a 2^k1 x 2^k2 table
 * given its margins, evaluated either directly or as a product of univariate
 * hypergeometric terms over every dyadic 2x2 subtable, and sampled by
 * generating the strata coarse to fine.
 */

#include <cstdint>
#include <span>
#include <vector>

#include "fes/exactstats.hpp"
#include "fes/random.hpp"

namespace fes {

/// Row-major 2^k1 x 2^k2 table of counts.
struct CountTable {
    int k1 = 0;
    int k2 = 0;
    std::vector<Count> cells;

    CountTable() = default;
    CountTable(int k1_, int k2_);
    CountTable(int k1_, int k2_, std::vector<Count> cells_);

    std::int64_t rows() const noexcept { return std::int64_t{1} << k1; }
    std::int64_t cols() const noexcept { return std::int64_t{1} << k2; }
    Count& at(std::int64_t r, std::int64_t c) { return cells[static_cast<std::size_t>(r * cols() + c)]; }
    Count at(std::int64_t r, std::int64_t c) const { return cells[static_cast<std::size_t>(r * cols() + c)]; }

    std::vector<Count> row_totals() const;
    std::vector<Count> col_totals() const;
    Count total() const;

    friend bool operator==(const CountTable&, const CountTable&) = default;
};

struct MarginSpec {
    std::vector<Count> row_totals;  ///< length 2^k1
    std::vector<Count> col_totals;  ///< length 2^k2

    int k1() const;
    int k2() const;
    Count total() const;

    /// Throws DomainError unless both lengths are powers of two, counts are
    /// non-negative and the two sums agree.
    void validate() const;

    static MarginSpec of(const CountTable& t) { return {t.row_totals(), t.col_totals()}; }
};

/// All aggregated tables n_{i,j}, 0 <= i <= k1, 0 <= j <= k2, in one buffer.
/// n_{i,j} is 2^i x 2^j; n_{k1,k2} is the full table.
class StrataCascade {
public:
    StrataCascade() = default;
    StrataCascade(int k1, int k2);

    /// Aggregates a full table into every coarser stratum.
    static StrataCascade from_table(const CountTable& t);
    /// Same as from_table but reuses this object's storage when the shape matches.
    void assign_from(const CountTable& t);

    int k1() const noexcept { return k1_; }
    int k2() const noexcept { return k2_; }

    std::span<Count> level(int i, int j);
    std::span<const Count> level(int i, int j) const;
    Count& at(int i, int j, std::int64_t r, std::int64_t c) {
        return data_[offset(i, j) + static_cast<std::size_t>((r << j) + c)];
    }
    Count at(int i, int j, std::int64_t r, std::int64_t c) const {
        return data_[offset(i, j) + static_cast<std::size_t>((r << j) + c)];
    }

    CountTable table(int i, int j) const;
    CountTable finest() const { return table(k1_, k2_); }

    /// Throws DomainError unless every n_{i,j} is the pairwise aggregate of
    /// both n_{i+1,j} and n_{i,j+1} and all counts are non-negative.
    void validate() const;

private:
    std::size_t offset(int i, int j) const noexcept {
        return offsets_[static_cast<std::size_t>(i * (k2_ + 1) + j)];
    }
    void allocate(int k1, int k2);

    int k1_ = 0;
    int k2_ = 0;
    std::vector<Count> data_;
    std::vector<std::size_t> offsets_;
};

/// ln of prod(row!) prod(col!) / (N! prod(cell!)). Throws DomainError when the
/// table's margins differ from `m`.
double mhg_logpmf_direct(const CountTable& table, const MarginSpec& m);

/// Sum over every window A of the strata coarser than (k1 - 1, k2 - 1) of
/// ln HG(n(A00); n(A0.), n(A.0), n(A)). Validates the cascade first.
double mhg_logpmf_factorized(const StrataCascade& cascade);

/// Draws a table from the MHG given margins: coarsens the margins, then fills
/// strata in order of increasing i + j (increasing i within a resolution), each
/// 2x2 subtable's n00 drawn from HG given totals fixed by its parent strata.
StrataCascade mhg_sample(const MarginSpec& m, Rng& rng);

}  // namespace fes
