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
#include "input.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <string>
#include <vector>

#include "fes/errors.hpp"

namespace fes::cli {
namespace {

std::string_view trim(std::string_view s) {
    constexpr std::string_view ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

template <typename T>
T parse_number(std::string_view field, std::size_t line, const char* what) {
    T value{};
    const char* first = field.data();
    const char* last = first + field.size();
    if (!field.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (field.empty() || ec != std::errc{} || ptr != last) {
        throw ParseError(std::string("invalid ") + what + " '" + std::string(field) + "'", line);
    }
    return value;
}

}  // namespace

PointSet read_points(std::istream& in, bool header) {
    PointSet points;
    std::string raw;
    std::size_t line = 0;
    bool header_pending = header;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = trim(raw);
        if (text.empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        const auto fields = split(text);
        if (fields.size() != 2) {
            throw ParseError("expected 2 columns, found " + std::to_string(fields.size()), line);
        }
        const double x = parse_number<double>(fields[0], line, "number");
        const double y = parse_number<double>(fields[1], line, "number");
        if (!std::isfinite(x) || !std::isfinite(y)) throw ParseError("non-finite value", line);
        points.push_back({x, y});
    }
    if (points.empty()) throw ParseError("no data rows", line == 0 ? 1 : line);
    return points;
}

MarginSpec read_margins(std::istream& in) {
    std::vector<std::vector<Count>> lines;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto text = trim(raw);
        if (text.empty()) continue;
        if (lines.size() == 2) throw ParseError("expected exactly two lines of margins", line);
        std::vector<Count> totals;
        for (auto f : split(text)) {
            const Count v = parse_number<Count>(f, line, "count");
            if (v < 0) throw ParseError("margin totals must be non-negative", line);
            totals.push_back(v);
        }
        lines.push_back(std::move(totals));
    }
    if (lines.size() != 2) throw ParseError("expected row totals and column totals", line == 0 ? 1 : line);
    MarginSpec m{std::move(lines[0]), std::move(lines[1])};
    m.validate();
    return m;
}

BoundingBox parse_bbox(std::string_view text) {
    const auto fields = split(trim(text));
    if (fields.size() != 4) throw ConfigError("--bbox expects x_min,x_max,y_min,y_max");
    double v[4];
    for (std::size_t k = 0; k < 4; ++k) {
        try {
            v[k] = parse_number<double>(fields[k], 0, "number");
        } catch (const ParseError&) {
            throw ConfigError("--bbox: invalid number '" + std::string(fields[k]) + "'");
        }
    }
    return {v[0], v[1], v[2], v[3]};
}

}  // namespace fes::cli
