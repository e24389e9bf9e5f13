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

#include "pinch/channel.hpp"
#include "pinch/core.hpp"

#include <nlohmann/json_fwd.hpp>

#include <vector>

namespace pinch
{

/// Transmit powers in watts: BS per-downlink-user powers and uplink UE powers.
struct PowerAllocation
{
    std::vector<double> p_dl;
    std::vector<double> p_ul;
};

/// Which interference terms are present and how the inter-waveguide term is read.
struct RateModel
{
    Scenario scenario = Scenario::S1_interference;
    InterferenceFormula formula = InterferenceFormula::signal_model;
    bool tdd_drop_all_interference = false;

    static RateModel from(const ScenarioConfig &c)
    {
        return {c.scenario, c.interference_formula, c.tdd_drop_all_interference};
    }

    bool has_cross_user_interference() const { return scenario != Scenario::TDD; }
    bool has_interwaveguide_interference() const { return scenario == Scenario::S1_interference; }
    bool has_intra_interference() const { return !(scenario == Scenario::TDD && tdd_drop_all_interference); }
    /// TDD splits the frame into two half-length slots.
    double rate_scale() const { return scenario == Scenario::TDD ? 0.5 : 1.0; }
};

/// Per-user SINR breakdown. Terms are in the units of the rate expression
/// they come from (uplink terms carry the 1/sum(beta) prefactor).
struct SinrTerms
{
    double signal = 0.0;
    double intra_interference = 0.0;
    double cross_interference = 0.0; ///< UE-to-UE (downlink) or inter-waveguide (uplink)
    double noise = 0.0;

    double sinr() const { return signal / (intra_interference + cross_interference + noise); }
};

struct RateReport
{
    std::vector<double> r_dl;
    std::vector<double> r_ul;
    double sum = 0.0;
    std::vector<SinrTerms> dl_terms;
    std::vector<SinrTerms> ul_terms;
};

/// Thrown when a rate is requested with no active PA on the relevant waveguide.
class InactiveMask : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Masked effective scalar channels, shared by the rate expressions and the optimizer.
struct EffectiveChannels
{
    std::vector<cplx> dl;  ///< h_k
    std::vector<cplx> ul;  ///< h_u
    cplx coupling;         ///< g_r_hat H[TR] g_t_hat^H
    double n_active_tx = 0;
    double n_active_rx = 0;
};

EffectiveChannels effective_channels(const ChannelRealization &ch, const ActivationMask &masks);

SinrTerms downlink_terms(std::size_t k, const ChannelRealization &ch, const ActivationMask &masks,
                         const PowerAllocation &pw, const PowerBudget &budget, const RateModel &model);
SinrTerms uplink_terms(std::size_t u, const ChannelRealization &ch, const ActivationMask &masks,
                       const PowerAllocation &pw, const PowerBudget &budget, const RateModel &model);

double downlink_sinr(std::size_t k, const ChannelRealization &ch, const ActivationMask &masks,
                     const PowerAllocation &pw, const PowerBudget &budget, const RateModel &model);
double uplink_sinr(std::size_t u, const ChannelRealization &ch, const ActivationMask &masks,
                   const PowerAllocation &pw, const PowerBudget &budget, const RateModel &model);

/// Leakage power from the transmit into the receive waveguide, before the
/// receive-side 1/sum(beta) prefactor.
///   signal_model:     (sum_k p_k / sum(delta)) * |g_r_hat H g_t_hat^H|^2
///   literal_equation: |g_r_hat H (sum_k p_k) g_t_hat^H|^2
double interwaveguide_power(const ChannelRealization &ch, const ActivationMask &masks, const PowerAllocation &pw,
                            InterferenceFormula mode);

RateReport rate_report(const ChannelRealization &ch, const ActivationMask &masks, const PowerAllocation &pw,
                       const ScenarioConfig &config);
RateReport rate_report(const ChannelRealization &ch, const ActivationMask &masks, const PowerAllocation &pw,
                       const PowerBudget &budget, const RateModel &model);

nlohmann::json to_json(const RateReport &report);

} // namespace pinch
