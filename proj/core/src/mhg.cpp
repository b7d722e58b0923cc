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
#include "fes/mhg.hpp"

#include <algorithm>
#include <bit>
#include <numeric>

#include "fes/errors.hpp"

namespace fes {

namespace {

int dyadic_level(std::size_t len, const char* what) {
    if (len == 0 || !std::has_single_bit(len)) {
        throw DomainError(std::string(what) + " length must be a power of two");
    }
    return std::countr_zero(len);
}

}  // namespace

CountTable::CountTable(int k1_, int k2_)
    : k1(k1_), k2(k2_), cells(static_cast<std::size_t>(std::int64_t{1} << (k1_ + k2_)), 0) {}

CountTable::CountTable(int k1_, int k2_, std::vector<Count> cells_)
    : k1(k1_), k2(k2_), cells(std::move(cells_)) {
    if (cells.size() != static_cast<std::size_t>(std::int64_t{1} << (k1 + k2))) {
        throw DomainError("table cell count does not match 2^k1 x 2^k2");
    }
}

std::vector<Count> CountTable::row_totals() const {
    std::vector<Count> out(static_cast<std::size_t>(rows()), 0);
    for (std::int64_t r = 0; r < rows(); ++r) {
        for (std::int64_t c = 0; c < cols(); ++c) out[r] += at(r, c);
    }
    return out;
}

std::vector<Count> CountTable::col_totals() const {
    std::vector<Count> out(static_cast<std::size_t>(cols()), 0);
    for (std::int64_t r = 0; r < rows(); ++r) {
        for (std::int64_t c = 0; c < cols(); ++c) out[c] += at(r, c);
    }
    return out;
}

Count CountTable::total() const { return std::accumulate(cells.begin(), cells.end(), Count{0}); }

int MarginSpec::k1() const { return dyadic_level(row_totals.size(), "row totals"); }
int MarginSpec::k2() const { return dyadic_level(col_totals.size(), "column totals"); }

Count MarginSpec::total() const {
    return std::accumulate(row_totals.begin(), row_totals.end(), Count{0});
}

void MarginSpec::validate() const {
    (void)k1();
    (void)k2();
    auto negative = [](Count v) { return v < 0; };
    if (std::any_of(row_totals.begin(), row_totals.end(), negative) ||
        std::any_of(col_totals.begin(), col_totals.end(), negative)) {
        throw DomainError("margin totals must be non-negative");
    }
    const Count cols = std::accumulate(col_totals.begin(), col_totals.end(), Count{0});
    if (total() != cols) {
        throw DomainError("row totals sum to " + std::to_string(total()) + " but column totals sum to " +
                          std::to_string(cols));
    }
}

StrataCascade::StrataCascade(int k1, int k2) { allocate(k1, k2); }

void StrataCascade::allocate(int k1, int k2) {
    if (k1 < 0 || k2 < 0 || k1 + k2 > 24) throw DomainError("unsupported cascade levels");
    k1_ = k1;
    k2_ = k2;
    offsets_.assign(static_cast<std::size_t>((k1 + 1) * (k2 + 1)), 0);
    std::size_t size = 0;
    for (int i = 0; i <= k1; ++i) {
        for (int j = 0; j <= k2; ++j) {
            offsets_[static_cast<std::size_t>(i * (k2 + 1) + j)] = size;
            size += std::size_t{1} << (i + j);
        }
    }
    data_.assign(size, 0);
}

std::span<Count> StrataCascade::level(int i, int j) {
    return {data_.data() + offset(i, j), std::size_t{1} << (i + j)};
}

std::span<const Count> StrataCascade::level(int i, int j) const {
    return {data_.data() + offset(i, j), std::size_t{1} << (i + j)};
}

CountTable StrataCascade::table(int i, int j) const {
    const auto lv = level(i, j);
    return CountTable(i, j, std::vector<Count>(lv.begin(), lv.end()));
}

StrataCascade StrataCascade::from_table(const CountTable& t) {
    StrataCascade s;
    s.assign_from(t);
    return s;
}

void StrataCascade::assign_from(const CountTable& t) {
    if (t.k1 != k1_ || t.k2 != k2_ || data_.empty()) allocate(t.k1, t.k2);
    std::copy(t.cells.begin(), t.cells.end(), level(k1_, k2_).begin());
    // Columns first along the finest row level, then rows for every column level.
    for (int j = k2_ - 1; j >= 0; --j) {
        for (std::int64_t r = 0; r < (std::int64_t{1} << k1_); ++r) {
            for (std::int64_t c = 0; c < (std::int64_t{1} << j); ++c) {
                at(k1_, j, r, c) = at(k1_, j + 1, r, 2 * c) + at(k1_, j + 1, r, 2 * c + 1);
            }
        }
    }
    for (int i = k1_ - 1; i >= 0; --i) {
        for (int j = 0; j <= k2_; ++j) {
            for (std::int64_t r = 0; r < (std::int64_t{1} << i); ++r) {
                for (std::int64_t c = 0; c < (std::int64_t{1} << j); ++c) {
                    at(i, j, r, c) = at(i + 1, j, 2 * r, c) + at(i + 1, j, 2 * r + 1, c);
                }
            }
        }
    }
}

void StrataCascade::validate() const {
    if (std::any_of(data_.begin(), data_.end(), [](Count v) { return v < 0; })) {
        throw DomainError("cascade holds a negative count");
    }
    for (int i = 0; i <= k1_; ++i) {
        for (int j = 0; j <= k2_; ++j) {
            for (std::int64_t r = 0; r < (std::int64_t{1} << i); ++r) {
                for (std::int64_t c = 0; c < (std::int64_t{1} << j); ++c) {
                    const Count v = at(i, j, r, c);
                    if (i < k1_ && v != at(i + 1, j, 2 * r, c) + at(i + 1, j, 2 * r + 1, c)) {
                        throw DomainError("cascade rows do not aggregate at stratum (" + std::to_string(i) +
                                          ", " + std::to_string(j) + ")");
                    }
                    if (j < k2_ && v != at(i, j + 1, r, 2 * c) + at(i, j + 1, r, 2 * c + 1)) {
                        throw DomainError("cascade columns do not aggregate at stratum (" +
                                          std::to_string(i) + ", " + std::to_string(j) + ")");
                    }
                }
            }
        }
    }
}

double mhg_logpmf_direct(const CountTable& table, const MarginSpec& m) {
    m.validate();
    if (table.k1 != m.k1() || table.k2 != m.k2() || table.row_totals() != m.row_totals ||
        table.col_totals() != m.col_totals) {
        throw DomainError("table margins do not match the margin specification");
    }
    double lp = -log_factorial(m.total());
    for (Count v : m.row_totals) lp += log_factorial(v);
    for (Count v : m.col_totals) lp += log_factorial(v);
    for (Count v : table.cells) {
        if (v < 0) throw DomainError("table holds a negative count");
        lp -= log_factorial(v);
    }
    return lp;
}

double mhg_logpmf_factorized(const StrataCascade& cascade) {
    cascade.validate();
    double lp = 0.0;
    for (int i = 0; i < cascade.k1(); ++i) {
        for (int j = 0; j < cascade.k2(); ++j) {
            for (std::int64_t r = 0; r < (std::int64_t{1} << i); ++r) {
                for (std::int64_t c = 0; c < (std::int64_t{1} << j); ++c) {
                    const HgParams p{cascade.at(i + 1, j, 2 * r, c), cascade.at(i, j + 1, r, 2 * c),
                                     cascade.at(i, j, r, c)};
                    if (p.support_min() == p.support_max()) continue;
                    lp += hg_logpmf(cascade.at(i + 1, j + 1, 2 * r, 2 * c), p);
                }
            }
        }
    }
    return lp;
}

StrataCascade mhg_sample(const MarginSpec& m, Rng& rng) {
    m.validate();
    const int k1 = m.k1();
    const int k2 = m.k2();
    StrataCascade s(k1, k2);

    std::copy(m.row_totals.begin(), m.row_totals.end(), s.level(k1, 0).begin());
    for (int i = k1 - 1; i >= 0; --i) {
        for (std::int64_t r = 0; r < (std::int64_t{1} << i); ++r) {
            s.at(i, 0, r, 0) = s.at(i + 1, 0, 2 * r, 0) + s.at(i + 1, 0, 2 * r + 1, 0);
        }
    }
    std::copy(m.col_totals.begin(), m.col_totals.end(), s.level(0, k2).begin());
    for (int j = k2 - 1; j >= 0; --j) {
        for (std::int64_t c = 0; c < (std::int64_t{1} << j); ++c) {
            s.at(0, j, 0, c) = s.at(0, j + 1, 0, 2 * c) + s.at(0, j + 1, 0, 2 * c + 1);
        }
    }

    for (int res = 2; res <= k1 + k2; ++res) {
        for (int i = std::max(1, res - k2); i <= std::min(k1, res - 1); ++i) {
            const int j = res - i;
            for (std::int64_t r = 0; r < (std::int64_t{1} << (i - 1)); ++r) {
                for (std::int64_t c = 0; c < (std::int64_t{1} << (j - 1)); ++c) {
                    const Count row0 = s.at(i, j - 1, 2 * r, c);
                    const Count col0 = s.at(i - 1, j, r, 2 * c);
                    const Count total = s.at(i - 1, j - 1, r, c);
                    const Count x = hg_sample(HgParams{row0, col0, total}, rng);
                    s.at(i, j, 2 * r, 2 * c) = x;
                    s.at(i, j, 2 * r, 2 * c + 1) = row0 - x;
                    s.at(i, j, 2 * r + 1, 2 * c) = col0 - x;
                    s.at(i, j, 2 * r + 1, 2 * c + 1) = total - row0 - col0 + x;
                }
            }
        }
    }
    return s;
}

}  // namespace fes
