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

#pragma once

#include "pinch/activation.hpp"
#include "pinch/core.hpp"
#include "pinch/sca.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinch
{

/// A (scenario, activation policy) pair under a short CLI name.
struct Scheme
{
    std::string name;
    Scenario scenario = Scenario::S1_interference;
    ActivationPolicy policy = ActivationPolicy::algorithmic;

    /// s1, s1-all, s2, tdd
    static Scheme parse(const std::string &name);
    ScenarioConfig apply(ScenarioConfig config) const;
};

std::vector<Scheme> default_schemes();

struct RealizationRecord
{
    int index = 0;
    ScaStatus status = ScaStatus::solver_failure;
    bool feasible = false;
    double sum_rate = 0.0;
    std::vector<double> r_dl;
    std::vector<double> r_ul;
    int iterations = 0;
    std::size_t active_tx = 0;
    std::size_t active_rx = 0;
    bool restored = false;
    ActivationTrace tx_trace;
    ActivationTrace rx_trace;
    std::vector<double> objective_trace;
};

struct AggregateResult
{
    std::string scheme;
    std::string sweep_param = "none";
    double sweep_value = 0.0;
    double mean_sum_rate = 0.0; ///< NaN when no realization was feasible
    double std_sum_rate = 0.0;
    int num_feasible = 0;
    int num_skipped = 0;
    std::vector<double> mean_r_dl;
    std::vector<double> mean_r_ul;
    std::vector<RealizationRecord> realizations;

    bool mean_defined() const { return num_feasible > 0; }
};

struct RunOptions
{
    unsigned threads = 0; ///< 0 = hardware concurrency
    std::string scheme_name = "custom";
};

/// Monte Carlo campaign at one operating point: per realization draw the
/// channels, select PAs per policy, run SCA and keep the verified sum rate.
AggregateResult run_point(const ScenarioConfig &config, const RunOptions &options = {});

enum class SweepParameter
{
    bs_power_dbm,
    ul_threshold_bps_hz,
    ue_power_dbm
};

const char *to_string(SweepParameter p);
SweepParameter parse_sweep_parameter(const std::string &s);
/// Config with the swept quantity set to `value`.
ScenarioConfig with_sweep_value(ScenarioConfig config, SweepParameter p, double value);
std::vector<double> default_sweep_values(SweepParameter p);

struct SweepSpec
{
    SweepParameter parameter = SweepParameter::bs_power_dbm;
    std::vector<double> values;
    ScenarioConfig base;
    std::vector<Scheme> schemes;

    void check() const;
};

/// One run_point per (scheme, value); every cell reuses the base seed so
/// realization r sees the same channels under every scheme.
std::vector<AggregateResult> run_sweep(const SweepSpec &spec, const RunOptions &options = {});

enum class OutputFormat
{
    csv,
    json
};

/// scheme, sweep_param, sweep_value, mean_sum_rate, std, n_feasible,
/// n_skipped, r_dl_1..K, r_ul_1..U
void write_results_csv(std::ostream &out, const std::vector<AggregateResult> &results);
std::vector<AggregateResult> read_results_csv(std::istream &in);
nlohmann::json results_json(const std::vector<AggregateResult> &results);
void write_realizations_csv(std::ostream &out, const std::vector<AggregateResult> &results);
nlohmann::json traces_json(const std::vector<AggregateResult> &results);
void emit_results(const std::vector<AggregateResult> &results, const std::filesystem::path &path,
                  OutputFormat format);

struct GainReport
{
    AggregateResult scheme;
    AggregateResult tdd;
    double gain_percent = 0.0;
};

/// Matched-seed campaigns for `scheme` and the TDD baseline.
GainReport compare_to_tdd(const ScenarioConfig &config, const Scheme &scheme, const RunOptions &options = {});
/// Percentage gain of `a` over `b` in mean sum rate.
double gain_percent(const AggregateResult &a, const AggregateResult &b);

} // namespace pinch
