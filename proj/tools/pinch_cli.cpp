// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: Monte Carlo campaigns, channel dumps and subproblem export.

#include "pinch/activation.hpp"
#include "pinch/config.hpp"
#include "pinch/harness.hpp"
#include "pinch/sca.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace pinch;

namespace
{

constexpr int exit_config_error = 2;
constexpr int exit_all_infeasible = 3;

std::optional<std::string> env(const char *name)
{
    const char *v = std::getenv(name);
    if (!v || !*v)
        return std::nullopt;
    return std::string(v);
}

std::uint64_t parse_seed(const std::string &s, const std::string &source)
{
    try
    {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != s.size() || s.front() == '-')
            throw std::invalid_argument(s);
        return v;
    }
    catch (const std::exception &)
    {
        throw ConfigError(source, "expected a non-negative integer seed, got '" + s + "'");
    }
}

void print_table(const std::vector<AggregateResult> &rows)
{
    std::cout << std::left << std::setw(8) << "scheme" << std::setw(22) << "sweep" << std::right << std::setw(12)
              << "mean" << std::setw(10) << "std" << std::setw(10) << "feasible" << "\n";
    for (const auto &r : rows)
    {
        std::ostringstream sweep;
        sweep << r.sweep_param;
        if (r.sweep_param != "none")
            sweep << "=" << r.sweep_value;
        std::cout << std::left << std::setw(8) << r.scheme << std::setw(22) << sweep.str() << std::right << std::fixed
                  << std::setprecision(4) << std::setw(12) << r.mean_sum_rate << std::setw(10) << r.std_sum_rate
                  << std::setw(6) << r.num_feasible << "/" << std::setw(3) << std::left
                  << (r.num_feasible + r.num_skipped) << std::right << "\n";
    }
    std::cout.unsetf(std::ios::floatfield);
}

/// Gain over the TDD row at the same sweep value, when both are present.
void print_gains(const std::vector<AggregateResult> &rows)
{
    for (const auto &r : rows)
    {
        if (r.scheme == "tdd" || !r.mean_defined())
            continue;
        for (const auto &t : rows)
            if (t.scheme == "tdd" && t.sweep_value == r.sweep_value && t.mean_defined())
            {
                std::cout << "gain " << r.scheme << " over tdd";
                if (r.sweep_param != "none")
                    std::cout << " at " << r.sweep_param << "=" << r.sweep_value;
                std::cout << ": " << std::setprecision(4) << gain_percent(r, t) << " %\n";
            }
    }
}

struct RunArgs
{
    std::string config;
    std::string sweep;
    std::vector<double> values;
    std::vector<std::string> schemes{"s1", "s1-all", "s2", "tdd"};
    std::string out;
    std::string format = "csv";
    std::optional<std::uint64_t> seed;
    std::optional<int> realizations;
    unsigned threads = 0;
    bool dump_traces = false;
};

int run(const RunArgs &a)
{
    ScenarioConfig base = load_config(a.config);
    if (a.seed)
        base.rng_seed = *a.seed;
    else if (const auto s = env("PINCH_SEED"))
        base.rng_seed = parse_seed(*s, "PINCH_SEED");
    if (a.realizations)
        base.num_realizations = *a.realizations;
    validate(base);

    SweepSpec spec;
    spec.base = base;
    for (const auto &s : a.schemes)
        spec.schemes.push_back(Scheme::parse(s));
    if (spec.schemes.empty())
        throw ConfigError("--schemes", "at least one scheme required");

    std::vector<AggregateResult> rows;
    const RunOptions options{a.threads, "custom"};
    if (a.sweep.empty())
    {
        if (!a.values.empty())
            throw ConfigError("--values", "given without --sweep");
        for (const auto &s : spec.schemes)
        {
            RunOptions o = options;
            o.scheme_name = s.name;
            rows.push_back(run_point(s.apply(base), o));
        }
    }
    else
    {
        spec.parameter = parse_sweep_parameter(a.sweep);
        spec.values = a.values.empty() ? default_sweep_values(spec.parameter) : a.values;
        spec.check();
        rows = run_sweep(spec, options);
    }

    std::string out_dir = a.out;
    if (out_dir.empty())
        out_dir = env("PINCH_OUT_DIR").value_or("results");
    fs::create_directories(out_dir);
    const bool json = a.format == "json";
    const fs::path results = fs::path(out_dir) / (json ? "results.json" : "results.csv");
    emit_results(rows, results, json ? OutputFormat::json : OutputFormat::csv);
    {
        std::ofstream per(fs::path(out_dir) / "realizations.csv", std::ios::binary);
        write_realizations_csv(per, rows);
    }
    if (a.dump_traces)
    {
        std::ofstream tr(fs::path(out_dir) / "traces.json", std::ios::binary);
        tr << traces_json(rows).dump(2) << "\n";
    }

    print_table(rows);
    print_gains(rows);
    std::cout << "wrote " << results.string() << "\n";

    const bool any = std::any_of(rows.begin(), rows.end(), [](const auto &r) { return r.num_feasible > 0; });
    if (!any)
    {
        std::cerr << "every realization was infeasible\n";
        return exit_all_infeasible;
    }
    return 0;
}

ScenarioConfig load_with_seed(const std::string &path, std::optional<std::uint64_t> seed)
{
    ScenarioConfig c = load_config(path);
    if (seed)
        c.rng_seed = *seed;
    else if (const auto s = env("PINCH_SEED"))
        c.rng_seed = parse_seed(*s, "PINCH_SEED");
    return c;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Pinching-antenna full-duplex simulator"};
    app.require_subcommand(1);

    RunArgs ra;
    auto *run_cmd = app.add_subcommand("run", "Monte Carlo campaign over one or more schemes");
    run_cmd->add_option("--config", ra.config, "scenario file")->required();
    run_cmd->add_option("--sweep", ra.sweep, "bs_power_dbm | ul_threshold_bps_hz | ue_power_dbm");
    run_cmd->add_option("--values", ra.values, "sweep grid, strictly increasing")->delimiter(',');
    run_cmd->add_option("--schemes", ra.schemes, "s1, s1-all, s2, tdd")->delimiter(',');
    run_cmd->add_option("--out", ra.out, "output directory (default $PINCH_OUT_DIR or ./results)");
    run_cmd->add_option("--format", ra.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run_cmd->add_option("--seed", ra.seed, "overrides the config and $PINCH_SEED");
    run_cmd->add_option("--realizations", ra.realizations, "overrides scenario.num_realizations");
    run_cmd->add_option("--threads", ra.threads, "worker threads, 0 = all cores");
    run_cmd->add_flag("--dump-traces", ra.dump_traces, "write activation and SCA traces to traces.json");

    std::string ch_config;
    std::uint64_t ch_index = 0;
    std::optional<std::uint64_t> ch_seed;
    auto *channel_cmd = app.add_subcommand("channel", "print one channel realization as JSON");
    channel_cmd->add_option("--config", ch_config, "scenario file")->required();
    channel_cmd->add_option("--index", ch_index, "realization index");
    channel_cmd->add_option("--seed", ch_seed, "overrides the config and $PINCH_SEED");

    std::string sp_config;
    std::uint64_t sp_index = 0;
    std::optional<std::uint64_t> sp_seed;
    auto *cbf_cmd = app.add_subcommand("cbf", "write the first SCA subproblem of one realization in CBF");
    cbf_cmd->add_option("--config", sp_config, "scenario file")->required();
    cbf_cmd->add_option("--index", sp_index, "realization index");
    cbf_cmd->add_option("--seed", sp_seed, "overrides the config and $PINCH_SEED");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*run_cmd)
            return run(ra);
        if (*channel_cmd)
        {
            const ScenarioConfig c = load_with_seed(ch_config, ch_seed);
            const ChannelRealization ch = draw_realization(c, ch_index);
            nlohmann::json j = to_json(ch);
            j["activation"] = {{"tx", to_json(select_activation(c, ch, c.activation_policy).tx_trace)},
                               {"rx", to_json(select_activation(c, ch, c.activation_policy).rx_trace)}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }
        if (*cbf_cmd)
        {
            const ScenarioConfig c = load_with_seed(sp_config, sp_seed);
            const ChannelRealization ch = draw_realization(c, sp_index);
            const ActivationMask m = select_activation(c, ch, c.activation_policy).masks;
            auto rng = RngStream::substream(c.rng_seed, sp_index, StreamTag::sca_init);
            const ScaState s = initialize(ch, m, c, rng);
            build_subproblem(s, ch, m, c).program.write_cbf(std::cout);
            return 0;
        }
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
