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
#include "commands.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <ostream>
#include <set>
#include <tuple>

#include "fes/errors.hpp"
#include "fes/mhg.hpp"
#include "fes/version.hpp"
#include "input.hpp"

namespace fes::cli {
namespace {

using json = nlohmann::ordered_json;

std::string utc_now() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json config_json(const FesConfig& c) {
    return {{"k1", c.k1},
            {"k2", c.k2},
            {"max_resolution", c.max_resolution},
            {"min_count", c.min_count},
            {"min_margin", c.min_margin},
            {"alpha", c.alpha},
            {"correction", std::string(to_string(c.correction))},
            {"midp", c.midp}};
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'", 0);
    return in;
}

void write_manifest_comment(const RunManifest& m, std::ostream& out) {
    out << "# " << m.to_json().dump() << '\n';
}

using WindowKey = std::tuple<int, int, std::int64_t, std::int64_t>;

WindowKey key_of(const Window& w) { return {w.i, w.j, w.l1, w.l2}; }

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc{} ? ptr : buf);
}

FesConfig resolve_config(const ConfigFlags& flags, Count n) {
    FesConfig cfg;
    if (!flags.k1 && !flags.k2) {
        try {
            cfg = FesConfig::defaults_for(n, flags.min_margin);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + "; pass --k1/--k2 explicitly");
        }
    } else {
        cfg.k1 = flags.k1.value_or(*flags.k2);
        cfg.k2 = flags.k2.value_or(*flags.k1);
        cfg.max_resolution = std::min(cfg.k1, cfg.k2) - 1;
    }
    if (flags.max_resolution) cfg.max_resolution = *flags.max_resolution;
    cfg.min_count = flags.min_count;
    cfg.min_margin = flags.min_margin;
    cfg.alpha = flags.alpha;
    cfg.correction = parse_correction(flags.correction);
    cfg.midp = flags.midp;
    cfg.seed = flags.seed;
    cfg.validate();
    return cfg;
}

json RunManifest::to_json() const {
    json j = {{"command", command}, {"version", std::string(kVersion)}, {"seed", seed}};
    if (!input.empty()) j["input"] = input;
    if (n > 0) j["n"] = n;
    if (config) j["config"] = config_json(*config);
    if (rank_transform) j["rank_transform"] = *rank_transform;
    if (!parameters.empty()) j["parameters"] = parameters;
    if (started_at) j["started_at"] = *started_at;
    if (finished_at) j["finished_at"] = *finished_at;
    return j;
}

ScanRun run_scan(const DataOptions& data, const ConfigFlags& flags, std::string_view command, bool timing) {
    ScanRun run;
    auto& m = run.manifest;
    m.command = command;
    m.input = data.input;
    m.seed = flags.seed;
    m.rank_transform = data.rank_transform;
    if (timing) m.started_at = utc_now();

    auto in = open_input(data.input);
    const PointSet points = read_points(in, data.header);
    m.n = static_cast<Count>(points.size());
    if (m.n < 2) throw ConfigError("at least two observations are required");
    const FesConfig cfg = resolve_config(flags, m.n);
    m.config = cfg;

    PointSet unit;
    if (data.rank_transform) {
        if (data.bbox) throw ConfigError("--bbox only applies with --no-rank-transform");
        Rng rng(cfg.seed);
        unit = rank_transform(points, rng);
    } else {
        const BoundingBox box = data.bbox ? parse_bbox(*data.bbox) : BoundingBox::enclosing(points);
        m.parameters["bbox"] = {box.x_min, box.x_max, box.y_min, box.y_max};
        unit = normalize_to_unit_square(points, box);
    }
    reserve_log_factorials(m.n);
    run.report = scan(build_grid(unit, cfg.k1, cfg.k2), cfg);
    if (timing) m.finished_at = utc_now();
    return run;
}

json test_report(const ScanRun& run) {
    const ScanReport& r = run.report;
    json resolutions = json::array();
    for (const auto& res : r.resolutions) {
        resolutions.push_back({{"r", res.r}, {"T", res.active_strata}, {"p", optional_number(res.p)}});
    }
    json strata = json::array();
    for (const auto& s : r.strata) {
        strata.push_back({{"i", s.i}, {"j", s.j}, {"L", s.tests}, {"p", optional_number(s.p)}});
    }
    json windows = json::array();
    for (const auto& w : significant_windows(r)) {
        const auto& t = w.window.table;
        windows.push_back({{"i", w.window.i},
                           {"j", w.window.j},
                           {"l1", w.window.l1},
                           {"l2", w.window.l2},
                           {"counts", {t.n00, t.n01, t.n10, t.n11}},
                           {"p", optional_number(w.p)},
                           {"threshold", optional_number(w.adjusted_threshold)}});
    }
    return {{"schema", "fes/1"},
            {"manifest", run.manifest.to_json()},
            {"p_overall", r.p_overall},
            {"reject", r.reject},
            {"nothing_tested", r.nothing_tested},
            {"resolutions", std::move(resolutions)},
            {"strata", std::move(strata)},
            {"significant_windows", std::move(windows)}};
}

int cmd_test(const DataOptions& data, const ConfigFlags& flags, bool timing, std::ostream& out) {
    out << test_report(run_scan(data, flags, "test", timing)).dump(2) << '\n';
    return 0;
}

int cmd_scan(const DataOptions& data, const ConfigFlags& flags, const ScanCsvOptions& csv, bool timing,
             std::ostream& out) {
    ScanRun run = run_scan(data, flags, "scan", timing);
    run.manifest.parameters["include_skipped"] = csv.include_skipped;
    std::set<WindowKey> significant;
    for (const auto& w : significant_windows(run.report)) significant.insert(key_of(w.window));

    write_manifest_comment(run.manifest, out);
    out << "i,j,l1,l2,n00,n01,n10,n11,p,significant\n";
    for (const auto& w : run.report.windows) {
        if (!w.screened_in && !csv.include_skipped) continue;
        const auto& win = w.window;
        const auto& t = win.table;
        out << win.i << ',' << win.j << ',' << win.l1 << ',' << win.l2 << ',' << t.n00 << ',' << t.n01 << ','
            << t.n10 << ',' << t.n11 << ',' << (w.p ? format_double(*w.p) : std::string()) << ','
            << (significant.count(key_of(win)) ? 1 : 0) << '\n';
    }
    return 0;
}

int cmd_sample_mhg(const SampleOptions& opt, bool timing, std::ostream& out) {
    if (opt.samples < 1) throw ConfigError("--samples must be at least 1");
    RunManifest m;
    m.command = "sample-mhg";
    m.input = opt.input;
    m.seed = opt.seed;
    if (timing) m.started_at = utc_now();
    auto in = open_input(opt.input);
    const MarginSpec margins = read_margins(in);
    m.n = margins.total();
    m.parameters["samples"] = opt.samples;
    m.parameters["row_totals"] = margins.row_totals;
    m.parameters["col_totals"] = margins.col_totals;

    std::vector<CountTable> tables;
    tables.reserve(static_cast<std::size_t>(opt.samples));
    Rng rng(opt.seed);
    for (std::int64_t s = 0; s < opt.samples; ++s) tables.push_back(mhg_sample(margins, rng).finest());
    if (timing) m.finished_at = utc_now();

    write_manifest_comment(m, out);
    out << "sample,row,col,count\n";
    for (std::size_t s = 0; s < tables.size(); ++s) {
        const auto& t = tables[s];
        for (std::int64_t r = 0; r < t.rows(); ++r) {
            for (std::int64_t c = 0; c < t.cols(); ++c) out << s + 1 << ',' << r << ',' << c << ',' << t.at(r, c) << '\n';
        }
    }
    return 0;
}

int cmd_simulate(const SimulateOptions& opt, bool timing, std::ostream& out) {
    Scenario s;
    s.kind = parse_scenario(opt.scenario);
    s.n = opt.n.value_or(default_sample_size(s.kind));
    s.noise_level = opt.noise;
    s.validate();
    if (opt.replicates < 1) throw ConfigError("--replicates must be at least 1");
    const FesConfig cfg = resolve_config(opt.config, s.n);

    RunManifest m;
    m.command = "simulate";
    m.n = s.n;
    m.seed = cfg.seed;
    m.config = cfg;
    m.rank_transform = opt.rank_transform;
    m.parameters = {{"scenario", std::string(to_string(s.kind))},
                    {"noise_level", s.noise_level},
                    {"replicates", opt.replicates}};
    if (timing) m.started_at = utc_now();

    MonteCarloOptions mc;
    mc.replicates = opt.replicates;
    mc.seed = cfg.seed;
    mc.threads = opt.threads;
    mc.rank_transform = opt.rank_transform;
    mc.measure_time = timing;
    const MonteCarloResult res = estimate_power(s, cfg, mc);
    if (timing) m.finished_at = utc_now();

    write_manifest_comment(m, out);
    out << "scenario,n,noise_level,replicates,power,stderr,mean_runtime_ms\n";
    out << to_string(s.kind) << ',' << s.n << ',' << s.noise_level << ',' << res.replicates << ','
        << format_double(res.power) << ',' << format_double(res.std_error) << ','
        << (res.mean_runtime_ms ? format_double(*res.mean_runtime_ms) : std::string()) << '\n';
    return 0;
}

}  // namespace fes::cli
