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
#include "app.hpp"

#include <CLI/CLI.hpp>

#include <fstream>
#include <functional>
#include <sstream>

#include "commands.hpp"
#include "fes/errors.hpp"
#include "fes/version.hpp"

namespace fes::cli {
namespace {

void add_config_flags(CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--k1", f.k1, "Levels along x (default floor(log2(n/s')))");
    cmd->add_option("--k2", f.k2, "Levels along y (default: same as --k1)");
    cmd->add_option("--max-resolution", f.max_resolution, "Largest resolution M (default min(k1,k2)-1)");
    cmd->add_option("--alpha", f.alpha, "Family-wise level")->capture_default_str();
    cmd->add_option("--min-count", f.min_count, "Skip windows with at most this many points")->capture_default_str();
    cmd->add_option("--min-margin", f.min_margin, "Skip windows with a margin at most this large")
        ->capture_default_str();
    cmd->add_option("--correction", f.correction, "sidak or bonferroni")
        ->check(CLI::IsMember({"sidak", "bonferroni"}))
        ->capture_default_str();
    cmd->add_flag("--midp,!--no-midp", f.midp, "Mid-p correction of the Fisher test (default on)");
    cmd->add_option("--seed", f.seed, "Master seed")->capture_default_str();
}

void add_data_flags(CLI::App* cmd, DataOptions& d) {
    cmd->add_option("input", d.input, "Two-column CSV")->required();
    cmd->add_flag("--header", d.header, "Skip the first line");
    cmd->add_flag("!--no-rank-transform", d.rank_transform, "Bin raw values inside a bounding box");
    cmd->add_option("--bbox", d.bbox, "x_min,x_max,y_min,y_max (with --no-rank-transform)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fisher exact scanning: multi-scale exact test of independence", "fes"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);
    app.fallthrough();

    std::string output;
    bool timing = false;
    app.add_option("-o,--output", output, "Write output to this file instead of stdout");
    app.add_flag("--timing", timing, "Record wall-clock timestamps and runtimes (output no longer reproducible)");

    DataOptions data;
    ConfigFlags flags;
    ScanCsvOptions csv;
    SampleOptions sample;
    SimulateOptions sim;
    std::function<int(std::ostream&)> action;

    auto* test = app.add_subcommand("test", "Test independence; JSON report");
    add_data_flags(test, data);
    add_config_flags(test, flags);
    test->callback([&] { action = [&](std::ostream& o) { return cmd_test(data, flags, timing, o); }; });

    auto* scan_cmd = app.add_subcommand("scan", "Per-window p-values; CSV");
    add_data_flags(scan_cmd, data);
    add_config_flags(scan_cmd, flags);
    scan_cmd->add_flag("--include-skipped", csv.include_skipped, "Also list screened-out windows");
    scan_cmd->callback([&] { action = [&](std::ostream& o) { return cmd_scan(data, flags, csv, timing, o); }; });

    auto* mhg = app.add_subcommand("sample-mhg", "Sample tables with fixed dyadic margins; CSV");
    mhg->add_option("margins", sample.input, "Row totals on line 1, column totals on line 2")->required();
    mhg->add_option("--samples", sample.samples, "Number of tables")->capture_default_str();
    mhg->add_option("--seed", sample.seed, "Master seed")->capture_default_str();
    mhg->callback([&] { action = [&](std::ostream& o) { return cmd_sample_mhg(sample, timing, o); }; });

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo power of the scan; CSV");
    simulate->add_option("--scenario", sim.scenario,
                         "linear, sine, circular, parabolic, checkerboard, local or null")
        ->required();
    simulate->add_option("--n", sim.n, "Sample size (default depends on the scenario)");
    simulate->add_option("--noise", sim.noise, "Noise level 1..20")->capture_default_str();
    simulate->add_option("--replicates", sim.replicates)->capture_default_str();
    simulate->add_option("--threads", sim.threads, "Worker threads; results do not depend on it")
        ->capture_default_str();
    simulate->add_flag("!--no-rank-transform", sim.rank_transform, "Bin raw values in their bounding box");
    add_config_flags(simulate, sim.config);
    simulate->callback([&] { action = [&](std::ostream& o) { return cmd_simulate(sim, timing, o); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        std::ostringstream buffer;
        const int status = action(buffer);
        if (output.empty()) {
            out << buffer.str();
        } else {
            std::ofstream file(output, std::ios::binary);
            if (!file || !(file << buffer.str()) || !file.flush()) {
                err << "fes: error: cannot write '" << output << "'\n";
                return 2;
            }
        }
        return status;
    } catch (const ParseError& e) {
        err << "fes: parse error: " << e.what() << '\n';
    } catch (const ConfigError& e) {
        err << "fes: configuration error: " << e.what() << '\n';
    } catch (const std::logic_error& e) {
        err << "fes: error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "fes: error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace fes::cli
