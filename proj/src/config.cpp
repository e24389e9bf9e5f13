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

#include "pinch/config.hpp"

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace pinch
{

namespace pt = boost::property_tree;

namespace
{

std::string key_path(const std::string &section, const std::string &key)
{
    return section + "." + key;
}

double get_double(const pt::ptree &tree, const std::string &path, double fallback)
{
    const auto node = tree.get_optional<std::string>(path);
    if (!node)
        return fallback;
    try
    {
        std::size_t used = 0;
        const std::string s = boost::trim_copy(*node);
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument("trailing characters");
        return v;
    }
    catch (const std::exception &)
    {
        throw ConfigError(path, "expected a number, got '" + *node + "'");
    }
}

long long get_int(const pt::ptree &tree, const std::string &path, long long fallback)
{
    const auto node = tree.get_optional<std::string>(path);
    if (!node)
        return fallback;
    try
    {
        std::size_t used = 0;
        const std::string s = boost::trim_copy(*node);
        const long long v = std::stoll(s, &used);
        if (used != s.size())
            throw std::invalid_argument("trailing characters");
        return v;
    }
    catch (const std::exception &)
    {
        throw ConfigError(path, "expected an integer, got '" + *node + "'");
    }
}

bool get_bool(const pt::ptree &tree, const std::string &path, bool fallback)
{
    const auto node = tree.get_optional<std::string>(path);
    if (!node)
        return fallback;
    const std::string s = boost::to_lower_copy(boost::trim_copy(*node));
    if (s == "true" || s == "1" || s == "yes" || s == "on")
        return true;
    if (s == "false" || s == "0" || s == "no" || s == "off")
        return false;
    throw ConfigError(path, "expected a boolean, got '" + *node + "'");
}

std::vector<double> get_list(const pt::ptree &tree, const std::string &path, std::vector<double> fallback)
{
    const auto node = tree.get_optional<std::string>(path);
    if (!node)
        return fallback;
    std::vector<std::string> parts;
    const std::string body = boost::trim_copy(*node);
    if (body.empty())
        return {};
    boost::split(parts, body, boost::is_any_of(","));
    std::vector<double> out;
    out.reserve(parts.size());
    for (const auto &p : parts)
    {
        try
        {
            std::size_t used = 0;
            const std::string s = boost::trim_copy(p);
            out.push_back(std::stod(s, &used));
            if (used != s.size())
                throw std::invalid_argument("trailing characters");
        }
        catch (const std::exception &)
        {
            throw ConfigError(path, "malformed list entry '" + p + "'");
        }
    }
    return out;
}

/// Power keys accept either `<name>_w` or `<name>_dbm`; giving both is an error.
double get_power(const pt::ptree &tree, const std::string &section, const std::string &name, double fallback_w)
{
    const auto w = tree.get_optional<std::string>(key_path(section, name + "_w"));
    const auto dbm = tree.get_optional<std::string>(key_path(section, name + "_dbm"));
    if (w && dbm)
        throw ConfigError(key_path(section, name), "give either _w or _dbm, not both");
    if (dbm)
        return dbm_to_watt(get_double(tree, key_path(section, name + "_dbm"), 0.0));
    return get_double(tree, key_path(section, name + "_w"), fallback_w);
}

std::vector<double> broadcast(std::vector<double> v, std::size_t n, const std::string &field)
{
    if (v.size() == 1 && n > 1)
        v.assign(n, v.front());
    if (v.size() != n)
        throw ConfigError(field, "expected " + std::to_string(n) + " entries");
    return v;
}

std::vector<Position3> users(const pt::ptree &tree, const std::string &prefix, const std::vector<Position3> &fallback)
{
    std::vector<double> fx, fy;
    for (const auto &u : fallback)
    {
        fx.push_back(u.x);
        fy.push_back(u.y);
    }
    const auto xs = get_list(tree, "users." + prefix + "_x", fx);
    const auto ys = get_list(tree, "users." + prefix + "_y", fy);
    if (xs.size() != ys.size())
        throw ConfigError("users." + prefix + "_y", "length must match " + prefix + "_x");
    std::vector<Position3> out;
    for (std::size_t i = 0; i < xs.size(); ++i)
        out.push_back({xs[i], ys[i], 0.0});
    return out;
}

WaveguideLayout layout(const pt::ptree &tree, const std::string &section, const WaveguideLayout &fallback)
{
    WaveguideLayout w;
    w.pa_x_positions = get_list(tree, key_path(section, "pa_x"), fallback.pa_x_positions);
    w.y_coord = get_double(tree, key_path(section, "y"), fallback.y_coord);
    w.height = get_double(tree, key_path(section, "height"), fallback.height);
    w.length = get_double(tree, key_path(section, "length"), fallback.length);
    w.feed_point = {get_double(tree, key_path(section, "feed_x"), fallback.feed_point.x), w.y_coord, w.height};
    return w;
}

std::string join(const std::vector<double> &v)
{
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? ", " : "") << v[i];
    return os.str();
}

} // namespace

ScenarioConfig parse_config(std::istream &in)
{
    pt::ptree tree;
    try
    {
        pt::read_ini(in, tree);
    }
    catch (const pt::ini_parser_error &e)
    {
        throw ConfigError("<file>", std::string("parse error: ") + e.message() + " at line " +
                                        std::to_string(e.line()));
    }

    const ScenarioConfig d = default_config();
    ScenarioConfig c;

    c.scenario = parse_scenario(tree.get<std::string>("scenario.mode", to_string(d.scenario)));
    c.activation_policy =
        parse_activation_policy(tree.get<std::string>("scenario.activation", to_string(d.activation_policy)));
    c.interference_formula = parse_interference_formula(
        tree.get<std::string>("scenario.interference_formula", to_string(d.interference_formula)));
    const long long reals = get_int(tree, "scenario.num_realizations", d.num_realizations);
    if (reals < 1 || reals > 100000000)
        throw ConfigError("scenario.num_realizations", "must be >= 1");
    c.num_realizations = static_cast<int>(reals);
    const long long seed = get_int(tree, "scenario.rng_seed", 0);
    if (seed < 0)
        throw ConfigError("scenario.rng_seed", "must be non-negative");
    c.rng_seed = static_cast<std::uint64_t>(seed);
    c.tdd_drop_all_interference = get_bool(tree, "scenario.tdd_drop_all_interference", d.tdd_drop_all_interference);
    c.redraw_users = get_bool(tree, "scenario.redraw_users", d.redraw_users);
    c.room_x_m = get_double(tree, "scenario.room_x_m", d.room_x_m);
    c.room_y_m = get_double(tree, "scenario.room_y_m", d.room_y_m);

    std::optional<double> wl_override;
    if (tree.get_optional<std::string>("radio.wavelength_override_m"))
        wl_override = get_double(tree, "radio.wavelength_override_m", 0.0);
    c.radio = derive_radio_params(get_double(tree, "radio.carrier_freq_hz", d.radio.carrier_freq_hz),
                                  get_double(tree, "radio.eta_eff", d.radio.eta_eff),
                                  get_double(tree, "radio.rician_factor", d.radio.rician_factor),
                                  get_double(tree, "radio.waveguide_separation_m", d.radio.waveguide_separation_m),
                                  wl_override);
    c.radio.pl_at_fixed_separation = get_bool(tree, "radio.pl_at_fixed_separation", d.radio.pl_at_fixed_separation);

    WaveguideLayout tx_default = d.tx;
    WaveguideLayout rx_default = d.rx;
    rx_default.y_coord = c.radio.waveguide_separation_m;
    rx_default.feed_point.y = rx_default.y_coord;
    c.tx = layout(tree, "tx", tx_default);
    c.rx = layout(tree, "rx", rx_default);

    c.dl_users = users(tree, "dl", d.dl_users);
    c.ul_users = users(tree, "ul", d.ul_users);

    c.budget.bs_total_w = get_power(tree, "power", "bs_total", d.budget.bs_total_w);
    c.budget.ue_max_w = get_power(tree, "power", "ue_max", d.budget.ue_max_w);
    c.budget.noise_dl_w = get_power(tree, "power", "noise_dl", d.budget.noise_dl_w);
    c.budget.noise_ul_w = get_power(tree, "power", "noise_ul", d.budget.noise_ul_w);

    c.thresholds.dl_bps_hz = broadcast(get_list(tree, "thresholds.dl_bps_hz", {d.thresholds.dl_bps_hz.front()}),
                                       c.dl_users.size(), "thresholds.dl_bps_hz");
    c.thresholds.ul_bps_hz = broadcast(get_list(tree, "thresholds.ul_bps_hz", {d.thresholds.ul_bps_hz.front()}),
                                       c.ul_users.size(), "thresholds.ul_bps_hz");

    c.sca.epsilon = get_double(tree, "sca.epsilon", d.sca.epsilon);
    const long long iters = get_int(tree, "sca.max_iters", d.sca.max_iters);
    if (iters < 1 || iters > 1000000)
        throw ConfigError("sca.max_iters", "must be >= 1");
    c.sca.max_iters = static_cast<int>(iters);
    c.sca.init_dl_fraction = get_double(tree, "sca.init_dl_fraction", d.sca.init_dl_fraction);
    c.sca.starts = static_cast<int>(get_int(tree, "sca.starts", d.sca.starts));

    validate(c);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open '" + path.string() + "'");
    return parse_config(in);
}

void write_config(std::ostream &out, const ScenarioConfig &c)
{
    out << std::setprecision(17);
    out << "[scenario]\n"
        << "mode = " << to_string(c.scenario) << "\n"
        << "activation = " << to_string(c.activation_policy) << "\n"
        << "interference_formula = " << to_string(c.interference_formula) << "\n"
        << "num_realizations = " << c.num_realizations << "\n"
        << "rng_seed = " << c.rng_seed << "\n"
        << "tdd_drop_all_interference = " << (c.tdd_drop_all_interference ? "true" : "false") << "\n"
        << "redraw_users = " << (c.redraw_users ? "true" : "false") << "\n"
        << "room_x_m = " << c.room_x_m << "\n"
        << "room_y_m = " << c.room_y_m << "\n\n";
    out << "[radio]\n"
        << "carrier_freq_hz = " << c.radio.carrier_freq_hz << "\n"
        << "eta_eff = " << c.radio.eta_eff << "\n"
        << "rician_factor = " << c.radio.rician_factor << "\n"
        << "waveguide_separation_m = " << c.radio.waveguide_separation_m << "\n"
        << "wavelength_override_m = " << c.radio.wavelength_m << "\n"
        << "pl_at_fixed_separation = " << (c.radio.pl_at_fixed_separation ? "true" : "false") << "\n\n";
    for (const auto &[name, w] : {std::pair<const char *, const WaveguideLayout &>{"tx", c.tx}, {"rx", c.rx}})
    {
        out << "[" << name << "]\n"
            << "pa_x = " << join(w.pa_x_positions) << "\n"
            << "y = " << w.y_coord << "\n"
            << "height = " << w.height << "\n"
            << "length = " << w.length << "\n"
            << "feed_x = " << w.feed_point.x << "\n\n";
    }
    std::vector<double> dx, dy, ux, uy;
    for (const auto &u : c.dl_users)
    {
        dx.push_back(u.x);
        dy.push_back(u.y);
    }
    for (const auto &u : c.ul_users)
    {
        ux.push_back(u.x);
        uy.push_back(u.y);
    }
    out << "[users]\n"
        << "dl_x = " << join(dx) << "\n"
        << "dl_y = " << join(dy) << "\n"
        << "ul_x = " << join(ux) << "\n"
        << "ul_y = " << join(uy) << "\n\n";
    out << "[power]\n"
        << "bs_total_w = " << c.budget.bs_total_w << "\n"
        << "ue_max_w = " << c.budget.ue_max_w << "\n"
        << "noise_dl_w = " << c.budget.noise_dl_w << "\n"
        << "noise_ul_w = " << c.budget.noise_ul_w << "\n\n";
    out << "[thresholds]\n"
        << "dl_bps_hz = " << join(c.thresholds.dl_bps_hz) << "\n"
        << "ul_bps_hz = " << join(c.thresholds.ul_bps_hz) << "\n\n";
    out << "[sca]\n"
        << "epsilon = " << c.sca.epsilon << "\n"
        << "max_iters = " << c.sca.max_iters << "\n"
        << "init_dl_fraction = " << c.sca.init_dl_fraction << "\n"
        << "starts = " << c.sca.starts << "\n";
}

} // namespace pinch
