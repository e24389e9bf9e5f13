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

#include "pinch/core.hpp"

#include <algorithm>
#include <cmath>

namespace pinch
{

double distance(const Position3 &a, const Position3 &b)
{
    return std::hypot(a.x - b.x, a.y - b.y, a.z - b.z);
}

RadioParams derive_radio_params(double carrier_freq_hz, double eta_eff, double rician_factor,
                                double separation_m, std::optional<double> wavelength_override_m)
{
    RadioParams r;
    r.carrier_freq_hz = carrier_freq_hz;
    r.eta_eff = eta_eff;
    r.rician_factor = rician_factor;
    r.waveguide_separation_m = separation_m;
    r.wavelength_m = wavelength_override_m.value_or(speed_of_light / carrier_freq_hz);
    r.eta = r.wavelength_m / (4.0 * pi);
    r.guide_wavelength_m = r.wavelength_m / eta_eff;
    return r;
}

double dbm_to_watt(double p_dbm)
{
    return std::pow(10.0, (p_dbm - 30.0) / 10.0);
}

double watt_to_dbm(double p_w)
{
    return 10.0 * std::log10(p_w) + 30.0;
}

namespace
{

void require(bool ok, const char *field, const char *what)
{
    if (!ok)
        throw ConfigError(field, what);
}

bool finite(const Position3 &p)
{
    return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

void validate_layout(const WaveguideLayout &w, const std::string &prefix)
{
    const auto f = [&](const char *name) { return prefix + "." + name; };
    if (w.pa_x_positions.empty())
        throw ConfigError(f("pa_x"), "at least one PA required");
    if (!(w.length > 0.0) || !std::isfinite(w.length))
        throw ConfigError(f("length"), "must be positive");
    if (!(w.height >= 0.0) || !std::isfinite(w.height))
        throw ConfigError(f("height"), "must be non-negative");
    if (!std::isfinite(w.y_coord))
        throw ConfigError(f("y"), "must be finite");
    if (!finite(w.feed_point) || w.feed_point.z < 0.0)
        throw ConfigError(f("feed_x"), "feed point must be finite with z >= 0");
    for (std::size_t i = 0; i < w.pa_x_positions.size(); ++i)
    {
        const double x = w.pa_x_positions[i];
        if (!std::isfinite(x) || x < 0.0 || x > w.length)
            throw ConfigError(f("pa_x"), "PA position outside [0, length]");
        if (i > 0 && !(x > w.pa_x_positions[i - 1]))
            throw ConfigError(f("pa_x"), "PA positions must be strictly increasing");
    }
}

} // namespace

void validate(const ScenarioConfig &c)
{
    validate_layout(c.tx, "tx");
    validate_layout(c.rx, "rx");

    require(!c.dl_users.empty(), "users.dl", "at least one downlink user required");
    require(!c.ul_users.empty(), "users.ul", "at least one uplink user required");
    for (const auto &u : c.dl_users)
        require(finite(u) && u.z >= 0.0, "users.dl", "positions must be finite with z >= 0");
    for (const auto &u : c.ul_users)
        require(finite(u) && u.z >= 0.0, "users.ul", "positions must be finite with z >= 0");

    const auto &r = c.radio;
    require(r.carrier_freq_hz > 0.0 && std::isfinite(r.carrier_freq_hz), "radio.carrier_freq_hz",
            "must be positive");
    require(r.eta_eff >= 1.0 && std::isfinite(r.eta_eff), "radio.eta_eff", "must be >= 1");
    require(r.wavelength_m > 0.0 && std::isfinite(r.wavelength_m), "radio.wavelength", "must be positive");
    require(r.eta > 0.0 && std::abs(r.eta - r.wavelength_m / (4.0 * pi)) <= 1e-9 * r.eta, "radio.eta",
            "must equal wavelength / (4 pi)");
    require(r.guide_wavelength_m > 0.0 &&
                std::abs(r.guide_wavelength_m - r.wavelength_m / r.eta_eff) <= 1e-9 * r.guide_wavelength_m,
            "radio.guide_wavelength", "must equal wavelength / eta_eff");
    require(r.rician_factor > 0.0 && std::isfinite(r.rician_factor), "radio.rician_factor", "must be positive");
    require(r.waveguide_separation_m > 0.0 && std::isfinite(r.waveguide_separation_m),
            "radio.waveguide_separation_m", "must be positive");

    const auto &b = c.budget;
    require(b.bs_total_w > 0.0 && std::isfinite(b.bs_total_w), "power.bs_total", "must be positive");
    require(b.ue_max_w > 0.0 && std::isfinite(b.ue_max_w), "power.ue_max", "must be positive");
    require(b.noise_dl_w > 0.0 && std::isfinite(b.noise_dl_w), "power.noise_dl", "must be positive");
    require(b.noise_ul_w > 0.0 && std::isfinite(b.noise_ul_w), "power.noise_ul", "must be positive");

    require(c.thresholds.dl_bps_hz.size() == c.dl_users.size(), "thresholds.dl_bps_hz",
            "one entry per downlink user required");
    require(c.thresholds.ul_bps_hz.size() == c.ul_users.size(), "thresholds.ul_bps_hz",
            "one entry per uplink user required");
    for (double t : c.thresholds.dl_bps_hz)
        require(t >= 0.0 && std::isfinite(t), "thresholds.dl_bps_hz", "must be non-negative");
    for (double t : c.thresholds.ul_bps_hz)
        require(t >= 0.0 && std::isfinite(t), "thresholds.ul_bps_hz", "must be non-negative");

    require(c.num_realizations >= 1, "scenario.num_realizations", "must be >= 1");
    require(c.sca.epsilon > 0.0, "sca.epsilon", "must be positive");
    require(c.sca.max_iters >= 1, "sca.max_iters", "must be >= 1");
    require(c.sca.init_dl_fraction > 0.0 && c.sca.init_dl_fraction <= 1.0, "sca.init_dl_fraction",
            "must lie in (0, 1]");
    require(c.sca.starts >= 1 && c.sca.starts <= 3, "sca.starts", "must be 1, 2 or 3");
    require(c.room_x_m > 0.0 && c.room_y_m >= 0.0, "scenario.room", "room extents must be positive");
}

ScenarioConfig default_config()
{
    ScenarioConfig c;
    c.radio = derive_radio_params(28e9, 1.4, 3.0, 5.0);

    c.tx.pa_x_positions = {1, 3, 5, 7, 9, 12, 15, 17, 19, 20};
    c.tx.y_coord = 0.0;
    c.tx.height = 3.0;
    c.tx.length = 20.0;
    c.tx.feed_point = {0.0, c.tx.y_coord, c.tx.height};

    c.rx.pa_x_positions = {0, 2, 4, 6, 8, 10, 11, 13, 14, 18};
    c.rx.y_coord = c.radio.waveguide_separation_m;
    c.rx.height = 3.0;
    c.rx.length = 20.0;
    c.rx.feed_point = {0.0, c.rx.y_coord, c.rx.height};

    c.dl_users = {{2.0, 0.5, 0.0}, {18.0, 0.5, 0.0}};
    c.ul_users = {{6.0, 0.5, 0.0}, {14.0, 0.5, 0.0}};

    c.budget.bs_total_w = dbm_to_watt(40.0);
    c.budget.ue_max_w = dbm_to_watt(15.0);
    c.budget.noise_dl_w = dbm_to_watt(-90.0);
    c.budget.noise_ul_w = dbm_to_watt(-90.0);

    c.thresholds.dl_bps_hz = {0.1, 0.1};
    c.thresholds.ul_bps_hz = {0.1, 0.1};
    return c;
}

const char *to_string(Scenario s)
{
    switch (s)
    {
    case Scenario::S1_interference: return "s1_interference";
    case Scenario::S2_no_interference: return "s2_no_interference";
    case Scenario::TDD: return "tdd";
    }
    return "?";
}

const char *to_string(ActivationPolicy p)
{
    return p == ActivationPolicy::algorithmic ? "algorithmic" : "all_active";
}

const char *to_string(InterferenceFormula f)
{
    return f == InterferenceFormula::signal_model ? "signal_model" : "literal_equation";
}

Scenario parse_scenario(const std::string &s)
{
    if (s == "s1_interference" || s == "s1")
        return Scenario::S1_interference;
    if (s == "s2_no_interference" || s == "s2")
        return Scenario::S2_no_interference;
    if (s == "tdd")
        return Scenario::TDD;
    throw ConfigError("scenario.mode", "unknown scenario '" + s + "'");
}

ActivationPolicy parse_activation_policy(const std::string &s)
{
    if (s == "algorithmic")
        return ActivationPolicy::algorithmic;
    if (s == "all_active")
        return ActivationPolicy::all_active;
    throw ConfigError("scenario.activation", "unknown activation policy '" + s + "'");
}

InterferenceFormula parse_interference_formula(const std::string &s)
{
    if (s == "signal_model")
        return InterferenceFormula::signal_model;
    if (s == "literal_equation")
        return InterferenceFormula::literal_equation;
    throw ConfigError("scenario.interference_formula", "unknown formula '" + s + "'");
}

} // namespace pinch
