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

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "fes/scanner.hpp"
#include "fes/simlab.hpp"

namespace fes::cli {

/// Scan settings as given on the command line; unset values fall back to
/// FesConfig::defaults_for(n).
struct ConfigFlags {
    std::optional<int> k1;
    std::optional<int> k2;
    std::optional<int> max_resolution;
    Count min_count = 25;
    Count min_margin = 10;
    double alpha = 0.05;
    std::string correction = "sidak";
    bool midp = true;
    std::uint64_t seed = kDefaultSeed;
};

/// With neither level given, k1 = k2 = M + 1 = floor(log2(n / s')). A single
/// level is mirrored to the other axis; M defaults to min(k1, k2) - 1.
FesConfig resolve_config(const ConfigFlags& flags, Count n);

struct DataOptions {
    std::string input;
    bool header = false;
    bool rank_transform = true;
    std::optional<std::string> bbox;  ///< only with rank_transform off
};

struct RunManifest {
    std::string command;
    std::string input;
    std::optional<FesConfig> config;
    Count n = 0;
    std::uint64_t seed = kDefaultSeed;
    std::optional<bool> rank_transform;
    nlohmann::ordered_json parameters = nlohmann::ordered_json::object();
    std::optional<std::string> started_at;
    std::optional<std::string> finished_at;

    nlohmann::ordered_json to_json() const;
};

/// Scan result plus the manifest that produced it.
struct ScanRun {
    RunManifest manifest;
    ScanReport report;
};

/// Reads the input, maps it to the unit square (ranks or bounding box) and scans.
ScanRun run_scan(const DataOptions& data, const ConfigFlags& flags, std::string_view command, bool timing);

nlohmann::ordered_json test_report(const ScanRun& run);

struct ScanCsvOptions {
    bool include_skipped = false;
};

struct SampleOptions {
    std::string input;
    std::int64_t samples = 1;
    std::uint64_t seed = kDefaultSeed;
};

struct SimulateOptions {
    std::string scenario;
    std::optional<Count> n;
    int noise = 1;
    std::int64_t replicates = 1000;
    int threads = 1;
    bool rank_transform = true;
    ConfigFlags config;
};

/// Each command writes its full output to `out` and returns the exit status.
/// Errors propagate as exceptions.
int cmd_test(const DataOptions& data, const ConfigFlags& flags, bool timing, std::ostream& out);
int cmd_scan(const DataOptions& data, const ConfigFlags& flags, const ScanCsvOptions& csv, bool timing,
             std::ostream& out);
int cmd_sample_mhg(const SampleOptions& opt, bool timing, std::ostream& out);
int cmd_simulate(const SimulateOptions& opt, bool timing, std::ostream& out);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace fes::cli
