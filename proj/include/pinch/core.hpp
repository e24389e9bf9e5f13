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

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pinch
{

inline constexpr double speed_of_light = 299792458.0;
inline constexpr double pi = 3.14159265358979323846;

/// Raised for any invalid configuration; the message names the offending field.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(std::string field, const std::string &what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}

    const std::string &field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when two points that must be distinct coincide (zero link distance).
class DegenerateGeometry : public std::domain_error
{
public:
    using std::domain_error::domain_error;
};

struct Position3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

double distance(const Position3 &a, const Position3 &b);

/// One waveguide running parallel to the x axis at (y_coord, height), fed at
/// feed_point, with N pinching antennas at preconfigured x positions.
struct WaveguideLayout
{
    Position3 feed_point;
    std::vector<double> pa_x_positions;
    double y_coord = 0.0;
    double height = 3.0;
    double length = 20.0;

    std::size_t size() const noexcept { return pa_x_positions.size(); }
    Position3 pa_position(std::size_t n) const { return {pa_x_positions.at(n), y_coord, height}; }
};

struct RadioParams
{
    double carrier_freq_hz = 28e9;
    double wavelength_m = 0.0;
    double eta = 0.0; // free-space gain constant c/(4 pi f_c), meters
    double eta_eff = 1.4;
    double guide_wavelength_m = 0.0;
    double rician_factor = 3.0;
    double waveguide_separation_m = 5.0;
    /// H[TR] path loss uses the constant separation when true, the per-PA-pair distance otherwise.
    bool pl_at_fixed_separation = true;
};

/// Builds radio constants from the carrier. A wavelength override replaces
/// c/f_c (and everything derived from it) when given.
RadioParams derive_radio_params(double carrier_freq_hz, double eta_eff, double rician_factor,
                                double separation_m,
                                std::optional<double> wavelength_override_m = std::nullopt);

struct PowerBudget
{
    double bs_total_w = 10.0;
    double ue_max_w = 0.031622776601683794;
    double noise_dl_w = 1e-12;
    double noise_ul_w = 1e-12;
};

struct RateThresholds
{
    std::vector<double> dl_bps_hz;
    std::vector<double> ul_bps_hz;
};

enum class Scenario
{
    S1_interference,
    S2_no_interference,
    TDD
};

enum class ActivationPolicy
{
    algorithmic,
    all_active
};

enum class InterferenceFormula
{
    signal_model,
    literal_equation
};

struct ScaSettings
{
    double epsilon = 1e-3;
    int max_iters = 50;
    /// Fraction of P_t spread over downlink users at initialization.
    double init_dl_fraction = 0.5;
    /// 1 runs only the random start; 2 adds a start with quiet uplink users,
    /// 3 also one with quiet downlink. The best verified outcome is kept.
    int starts = 3;
};

struct ScenarioConfig
{
    WaveguideLayout tx;
    WaveguideLayout rx;
    std::vector<Position3> dl_users;
    std::vector<Position3> ul_users;
    RadioParams radio;
    PowerBudget budget;
    RateThresholds thresholds;
    Scenario scenario = Scenario::S1_interference;
    ActivationPolicy activation_policy = ActivationPolicy::algorithmic;
    int num_realizations = 100;
    std::uint64_t rng_seed = 0;
    ScaSettings sca;
    InterferenceFormula interference_formula = InterferenceFormula::signal_model;
    bool tdd_drop_all_interference = false;
    bool redraw_users = true;
    double room_x_m = 20.0;
    double room_y_m = 1.0;

    std::size_t num_pas_tx() const noexcept { return tx.size(); }
    std::size_t num_pas_rx() const noexcept { return rx.size(); }
    std::size_t num_dl() const noexcept { return dl_users.size(); }
    std::size_t num_ul() const noexcept { return ul_users.size(); }
};

double dbm_to_watt(double p_dbm);
double watt_to_dbm(double p_w);

/// Throws ConfigError naming the first violated field.
void validate(const ScenarioConfig &config);

/// Parameters from the reference experiment: N=10 PAs per waveguide,
/// K=U=2, 28 GHz, P_t=40 dBm, P_u^max=15 dBm, noise -90 dBm, thresholds 0.1.
ScenarioConfig default_config();

const char *to_string(Scenario s);
const char *to_string(ActivationPolicy p);
const char *to_string(InterferenceFormula f);
Scenario parse_scenario(const std::string &s);
ActivationPolicy parse_activation_policy(const std::string &s);
InterferenceFormula parse_interference_formula(const std::string &s);

} // namespace pinch
