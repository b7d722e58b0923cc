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

#include <iosfwd>

#include "fes/grid.hpp"
#include "fes/mhg.hpp"

namespace fes::cli {

/// Two comma-separated numeric columns per line. Blank lines are ignored; the
/// first non-blank line is skipped when `header` is set. Throws ParseError
/// carrying the 1-based line number, including for an input without data rows.
PointSet read_points(std::istream& in, bool header);

/// Row totals on the first line and column totals on the second, comma-separated.
/// Throws ParseError on malformed numbers; dyadic shape and equal sums are
/// checked by MarginSpec::validate.
MarginSpec read_margins(std::istream& in);

/// "x_min,x_max,y_min,y_max".
BoundingBox parse_bbox(std::string_view text);

}  // namespace fes::cli
