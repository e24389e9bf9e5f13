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

#include "pinch/harness.hpp"

#include <boost/algorithm/string.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <thread>

namespace pinch
{

Scheme Scheme::parse(const std::string &name)
{
    if (name == "s1")
        return {name, Scenario::S1_interference, ActivationPolicy::algorithmic};
    if (name == "s1-all")
        return {name, Scenario::S1_interference, ActivationPolicy::all_active};
    if (name == "s2")
        return {name, Scenario::S2_no_interference, ActivationPolicy::algorithmic};
    if (name == "tdd")
        return {name, Scenario::TDD, ActivationPolicy::algorithmic};
    throw ConfigError("schemes", "unknown scheme '" + name + "' (expected s1, s1-all, s2, tdd)");
}

ScenarioConfig Scheme::apply(ScenarioConfig config) const
{
    config.scenario = scenario;
    config.activation_policy = policy;
    return config;
}

std::vector<Scheme> default_schemes()
{
    return {Scheme::parse("s1"), Scheme::parse("s1-all"), Scheme::parse("s2"), Scheme::parse("tdd")};
}

namespace
{

RealizationRecord run_realization(const ScenarioConfig &config, int index)
{
    RealizationRecord rec;
    rec.index = index;
    const auto idx = static_cast<std::uint64_t>(index);
    const ChannelRealization ch = draw_realization(config, idx);
    ActivationResult act = select_activation(config, ch, config.activation_policy);
    rec.active_tx = active_count(act.masks.delta);
    rec.active_rx = active_count(act.masks.beta);
    rec.tx_trace = std::move(act.tx_trace);
    rec.rx_trace = std::move(act.rx_trace);

    auto rng = RngStream::substream(config.rng_seed, idx, StreamTag::sca_init);
    const ScaResult sca = run_sca(ch, act.masks, config, rng);
    rec.status = sca.status;
    rec.iterations = sca.state.iteration;
    rec.restored = sca.state.restored;
    rec.objective_trace = sca.state.objective_trace;
    if (sca.has_solution())
    {
        const auto check = verify_solution(sca.pw, ch, act.masks, config);
        rec.feasible = check.all_ok();
        rec.sum_rate = check.rates.sum;
        rec.r_dl = check.rates.r_dl;
        rec.r_ul = check.rates.r_ul;
    }
    return rec;
}

} // namespace

AggregateResult run_point(const ScenarioConfig &config, const RunOptions &options)
{
    validate(config);
    const int n = config.num_realizations;
    std::vector<RealizationRecord> records(static_cast<std::size_t>(n));

    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
    std::atomic<int> next{0};
    const auto work = [&] {
        for (int i = next++; i < n; i = next++)
            records[static_cast<std::size_t>(i)] = run_realization(config, i);
    };
    if (threads <= 1)
    {
        work();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(work);
    }

    AggregateResult agg;
    agg.scheme = options.scheme_name;
    agg.mean_r_dl.assign(config.num_dl(), 0.0);
    agg.mean_r_ul.assign(config.num_ul(), 0.0);
    double sum = 0.0;
    for (const auto &r : records)
    {
        if (!r.feasible)
        {
            ++agg.num_skipped;
            continue;
        }
        ++agg.num_feasible;
        sum += r.sum_rate;
        for (std::size_t k = 0; k < r.r_dl.size(); ++k)
            agg.mean_r_dl[k] += r.r_dl[k];
        for (std::size_t u = 0; u < r.r_ul.size(); ++u)
            agg.mean_r_ul[u] += r.r_ul[u];
    }
    if (agg.num_feasible > 0)
    {
        const double nf = agg.num_feasible;
        agg.mean_sum_rate = sum / nf;
        for (auto &v : agg.mean_r_dl)
            v /= nf;
        for (auto &v : agg.mean_r_ul)
            v /= nf;
        double ss = 0.0;
        for (const auto &r : records)
            if (r.feasible)
                ss += (r.sum_rate - agg.mean_sum_rate) * (r.sum_rate - agg.mean_sum_rate);
        agg.std_sum_rate = agg.num_feasible > 1 ? std::sqrt(ss / (nf - 1.0)) : 0.0;
    }
    else
    {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        agg.mean_sum_rate = nan;
        agg.std_sum_rate = nan;
        std::fill(agg.mean_r_dl.begin(), agg.mean_r_dl.end(), nan);
        std::fill(agg.mean_r_ul.begin(), agg.mean_r_ul.end(), nan);
    }
    agg.realizations = std::move(records);
    return agg;
}

const char *to_string(SweepParameter p)
{
    switch (p)
    {
    case SweepParameter::bs_power_dbm: return "bs_power_dbm";
    case SweepParameter::ul_threshold_bps_hz: return "ul_threshold_bps_hz";
    case SweepParameter::ue_power_dbm: return "ue_power_dbm";
    }
    return "?";
}

SweepParameter parse_sweep_parameter(const std::string &s)
{
    if (s == "bs_power_dbm")
        return SweepParameter::bs_power_dbm;
    if (s == "ul_threshold_bps_hz")
        return SweepParameter::ul_threshold_bps_hz;
    if (s == "ue_power_dbm")
        return SweepParameter::ue_power_dbm;
    throw ConfigError("sweep", "unknown sweep parameter '" + s + "'");
}

ScenarioConfig with_sweep_value(ScenarioConfig config, SweepParameter p, double value)
{
    switch (p)
    {
    case SweepParameter::bs_power_dbm: config.budget.bs_total_w = dbm_to_watt(value); break;
    case SweepParameter::ul_threshold_bps_hz:
        std::fill(config.thresholds.ul_bps_hz.begin(), config.thresholds.ul_bps_hz.end(), value);
        break;
    case SweepParameter::ue_power_dbm: config.budget.ue_max_w = dbm_to_watt(value); break;
    }
    return config;
}

std::vector<double> default_sweep_values(SweepParameter p)
{
    switch (p)
    {
    case SweepParameter::bs_power_dbm: return {30, 32, 34, 36, 38, 40, 42, 44};
    case SweepParameter::ul_threshold_bps_hz: return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    case SweepParameter::ue_power_dbm: return {5, 10, 15, 20, 25};
    }
    return {};
}

void SweepSpec::check() const
{
    if (values.empty())
        throw ConfigError("sweep.values", "at least one value required");
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] > values[i - 1]))
            throw ConfigError("sweep.values", "values must be strictly increasing");
    if (schemes.empty())
        throw ConfigError("schemes", "at least one scheme required");
    validate(base);
}

std::vector<AggregateResult> run_sweep(const SweepSpec &spec, const RunOptions &options)
{
    spec.check();
    std::vector<AggregateResult> out;
    for (const auto &scheme : spec.schemes)
    {
        for (double v : spec.values)
        {
            RunOptions opts = options;
            opts.scheme_name = scheme.name;
            AggregateResult r = run_point(with_sweep_value(scheme.apply(spec.base), spec.parameter, v), opts);
            r.sweep_param = to_string(spec.parameter);
            r.sweep_value = v;
            out.push_back(std::move(r));
        }
    }
    return out;
}

namespace
{

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

double parse_num(const std::string &s)
{
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    return std::stod(s);
}

std::size_t max_users(const std::vector<AggregateResult> &results, bool dl)
{
    std::size_t n = 0;
    for (const auto &r : results)
        n = std::max(n, dl ? r.mean_r_dl.size() : r.mean_r_ul.size());
    return n;
}

} // namespace

void write_results_csv(std::ostream &out, const std::vector<AggregateResult> &results)
{
    const std::size_t K = max_users(results, true);
    const std::size_t U = max_users(results, false);
    out << "scheme,sweep_param,sweep_value,mean_sum_rate,std,n_feasible,n_skipped";
    for (std::size_t k = 0; k < K; ++k)
        out << ",r_dl_" << k + 1;
    for (std::size_t u = 0; u < U; ++u)
        out << ",r_ul_" << u + 1;
    out << "\n";
    for (const auto &r : results)
    {
        out << r.scheme << "," << r.sweep_param << "," << fmt(r.sweep_value) << "," << fmt(r.mean_sum_rate) << ","
            << fmt(r.std_sum_rate) << "," << r.num_feasible << "," << r.num_skipped;
        for (std::size_t k = 0; k < K; ++k)
            out << "," << (k < r.mean_r_dl.size() ? fmt(r.mean_r_dl[k]) : "");
        for (std::size_t u = 0; u < U; ++u)
            out << "," << (u < r.mean_r_ul.size() ? fmt(r.mean_r_ul[u]) : "");
        out << "\n";
    }
}

std::vector<AggregateResult> read_results_csv(std::istream &in)
{
    std::string line;
    if (!std::getline(in, line))
        return {};
    std::vector<std::string> header;
    boost::split(header, line, boost::is_any_of(","));
    std::vector<AggregateResult> out;
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        std::vector<std::string> f;
        boost::split(f, line, boost::is_any_of(","));
        if (f.size() != header.size())
            throw std::runtime_error("read_results_csv: ragged row");
        AggregateResult r;
        r.scheme = f[0];
        r.sweep_param = f[1];
        r.sweep_value = parse_num(f[2]);
        r.mean_sum_rate = parse_num(f[3]);
        r.std_sum_rate = parse_num(f[4]);
        r.num_feasible = std::stoi(f[5]);
        r.num_skipped = std::stoi(f[6]);
        for (std::size_t i = 7; i < f.size(); ++i)
        {
            if (f[i].empty())
                continue;
            (boost::starts_with(header[i], "r_dl_") ? r.mean_r_dl : r.mean_r_ul).push_back(parse_num(f[i]));
        }
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json results_json(const std::vector<AggregateResult> &results)
{
    // JSON has no NaN; undefined means are written as null.
    const auto num = [](double v) -> nlohmann::json {
        if (std::isnan(v))
            return nullptr;
        return v;
    };
    const auto nums = [&](const std::vector<double> &v) {
        auto a = nlohmann::json::array();
        for (double x : v)
            a.push_back(num(x));
        return a;
    };
    auto arr = nlohmann::json::array();
    for (const auto &r : results)
        arr.push_back({{"scheme", r.scheme},
                       {"sweep_param", r.sweep_param},
                       {"sweep_value", r.sweep_value},
                       {"mean_sum_rate", num(r.mean_sum_rate)},
                       {"std", num(r.std_sum_rate)},
                       {"n_feasible", r.num_feasible},
                       {"n_skipped", r.num_skipped},
                       {"r_dl", nums(r.mean_r_dl)},
                       {"r_ul", nums(r.mean_r_ul)}});
    return arr;
}

void write_realizations_csv(std::ostream &out, const std::vector<AggregateResult> &results)
{
    const std::size_t K = max_users(results, true);
    const std::size_t U = max_users(results, false);
    out << "scheme,sweep_param,sweep_value,realization,status,feasible,sum_rate,iterations,active_tx,active_rx,"
           "restored";
    for (std::size_t k = 0; k < K; ++k)
        out << ",r_dl_" << k + 1;
    for (std::size_t u = 0; u < U; ++u)
        out << ",r_ul_" << u + 1;
    out << "\n";
    for (const auto &a : results)
    {
        for (const auto &r : a.realizations)
        {
            out << a.scheme << "," << a.sweep_param << "," << fmt(a.sweep_value) << "," << r.index << ","
                << to_string(r.status) << "," << (r.feasible ? 1 : 0) << "," << fmt(r.sum_rate) << ","
                << r.iterations << "," << r.active_tx << "," << r.active_rx << "," << (r.restored ? 1 : 0);
            for (std::size_t k = 0; k < K; ++k)
                out << "," << (k < r.r_dl.size() ? fmt(r.r_dl[k]) : "");
            for (std::size_t u = 0; u < U; ++u)
                out << "," << (u < r.r_ul.size() ? fmt(r.r_ul[u]) : "");
            out << "\n";
        }
    }
}

nlohmann::json traces_json(const std::vector<AggregateResult> &results)
{
    auto arr = nlohmann::json::array();
    for (const auto &a : results)
        for (const auto &r : a.realizations)
            arr.push_back({{"scheme", a.scheme},
                           {"sweep_param", a.sweep_param},
                           {"sweep_value", a.sweep_value},
                           {"realization", r.index},
                           {"status", to_string(r.status)},
                           {"tx_activation", to_json(r.tx_trace)},
                           {"rx_activation", to_json(r.rx_trace)},
                           {"objective_trace", r.objective_trace}});
    return arr;
}

void emit_results(const std::vector<AggregateResult> &results, const std::filesystem::path &path,
                  OutputFormat format)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit_results: cannot open '" + path.string() + "'");
    if (format == OutputFormat::csv)
        write_results_csv(out, results);
    else
        out << results_json(results).dump(2) << "\n";
    if (!out)
        throw std::runtime_error("emit_results: write failed for '" + path.string() + "'");
}

double gain_percent(const AggregateResult &a, const AggregateResult &b)
{
    return 100.0 * (a.mean_sum_rate - b.mean_sum_rate) / b.mean_sum_rate;
}

GainReport compare_to_tdd(const ScenarioConfig &config, const Scheme &scheme, const RunOptions &options)
{
    GainReport g;
    RunOptions o = options;
    o.scheme_name = scheme.name;
    g.scheme = run_point(scheme.apply(config), o);
    const Scheme tdd = Scheme::parse("tdd");
    o.scheme_name = tdd.name;
    g.tdd = run_point(tdd.apply(config), o);
    g.gain_percent = gain_percent(g.scheme, g.tdd);
    return g;
}

} // namespace pinch
