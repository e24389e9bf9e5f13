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

#include "pinch/rates.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <numeric>

namespace pinch
{

EffectiveChannels effective_channels(const ChannelRealization &ch, const ActivationMask &masks)
{
    EffectiveChannels e;
    e.n_active_tx = static_cast<double>(active_count(masks.delta));
    e.n_active_rx = static_cast<double>(active_count(masks.beta));
    for (Eigen::Index k = 0; k < ch.h_dl.cols(); ++k)
        e.dl.push_back(effective_channel(ch.h_dl.col(k), ch.g_t, masks.delta));
    for (Eigen::Index u = 0; u < ch.h_ul.cols(); ++u)
        e.ul.push_back(effective_channel(ch.h_ul.col(u), ch.g_r, masks.beta));

    cplx c{0.0, 0.0};
    for (Eigen::Index m = 0; m < ch.H_tr.rows(); ++m)
    {
        if (!masks.beta[static_cast<std::size_t>(m)])
            continue;
        for (Eigen::Index n = 0; n < ch.H_tr.cols(); ++n)
            if (masks.delta[static_cast<std::size_t>(n)])
                c += ch.g_r[m] * ch.H_tr(m, n) * std::conj(ch.g_t[n]);
    }
    e.coupling = c;
    return e;
}

double interwaveguide_power(const ChannelRealization &ch, const ActivationMask &masks, const PowerAllocation &pw,
                            InterferenceFormula mode)
{
    const double p_tot = std::accumulate(pw.p_dl.begin(), pw.p_dl.end(), 0.0);
    if (p_tot == 0.0)
        return 0.0;
    const auto e = effective_channels(ch, masks);
    const double g2 = std::norm(e.coupling);
    if (mode == InterferenceFormula::signal_model)
    {
        if (e.n_active_tx == 0)
            throw InactiveMask("interwaveguide_power: no active transmit PA");
        return p_tot / e.n_active_tx * g2;
    }
    return p_tot * p_tot * g2;
}

SinrTerms downlink_terms(std::size_t k, const ChannelRealization &ch, const ActivationMask &masks,
                         const PowerAllocation &pw, const PowerBudget &budget, const RateModel &model)
{
    const auto e = effective_channels(ch, masks);
    if (e.n_active_tx == 0)
        throw InactiveMask("downlink_sinr: no active transmit PA");
    const double gain = std::norm(e.dl.at(k)) / e.n_active_tx;

    SinrTerms t;
    t.signal = gain * pw.p_dl.at(k);
    if (model.has_intra_interference())
        for (std::size_t j = 0; j < pw.p_dl.size(); ++j)
            if (j != k)
                t.intra_interference += gain * pw.p_dl[j];
    if (model.has_cross_user_interference())
        for (std::size_t u = 0; u < pw.p_ul.size(); ++u)
            t.cross_interference += std::norm(ch.h_cross(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k))) *
                                    pw.p_ul[u];
    t.noise = budget.noise_dl_w;
    return t;
}

SinrTerms uplink_terms(std::size_t u, const ChannelRealization &ch, const ActivationMask &masks,
                       const PowerAllocation &pw, const PowerBudget &budget, const RateModel &model)
{
    const auto e = effective_channels(ch, masks);
    if (e.n_active_rx == 0)
        throw InactiveMask("uplink_sinr: no active receive PA");
    const double inv_rx = 1.0 / e.n_active_rx;

    SinrTerms t;
    t.signal = inv_rx * pw.p_ul.at(u) * std::norm(e.ul.at(u));
    if (model.has_intra_interference())
        for (std::size_t j = 0; j < pw.p_ul.size(); ++j)
            if (j != u)
                t.intra_interference += inv_rx * pw.p_ul[j] * std::norm(e.ul[j]);
    if (model.has_interwaveguide_interference())
        t.cross_interference = inv_rx * interwaveguide_power(ch, masks, pw, model.formula);
    t.noise = budget.noise_ul_w * inv_rx;
    return t;
}

double downlink_sinr(std::size_t k, const ChannelRealization &ch, const ActivationMask &masks,
                     const PowerAllocation &pw, const PowerBudget &budget, const RateModel &model)
{
    return downlink_terms(k, ch, masks, pw, budget, model).sinr();
}

double uplink_sinr(std::size_t u, const ChannelRealization &ch, const ActivationMask &masks,
                   const PowerAllocation &pw, const PowerBudget &budget, const RateModel &model)
{
    return uplink_terms(u, ch, masks, pw, budget, model).sinr();
}

RateReport rate_report(const ChannelRealization &ch, const ActivationMask &masks, const PowerAllocation &pw,
                       const PowerBudget &budget, const RateModel &model)
{
    RateReport r;
    const double scale = model.rate_scale();
    for (std::size_t k = 0; k < pw.p_dl.size(); ++k)
    {
        r.dl_terms.push_back(downlink_terms(k, ch, masks, pw, budget, model));
        r.r_dl.push_back(scale * std::log2(1.0 + r.dl_terms.back().sinr()));
    }
    for (std::size_t u = 0; u < pw.p_ul.size(); ++u)
    {
        r.ul_terms.push_back(uplink_terms(u, ch, masks, pw, budget, model));
        r.r_ul.push_back(scale * std::log2(1.0 + r.ul_terms.back().sinr()));
    }
    r.sum = std::accumulate(r.r_dl.begin(), r.r_dl.end(), 0.0) + std::accumulate(r.r_ul.begin(), r.r_ul.end(), 0.0);
    return r;
}

RateReport rate_report(const ChannelRealization &ch, const ActivationMask &masks, const PowerAllocation &pw,
                       const ScenarioConfig &config)
{
    return rate_report(ch, masks, pw, config.budget, RateModel::from(config));
}

nlohmann::json to_json(const RateReport &report)
{
    const auto terms = [](const std::vector<SinrTerms> &ts) {
        auto a = nlohmann::json::array();
        for (const auto &t : ts)
            a.push_back({{"signal", t.signal},
                         {"intra_interference", t.intra_interference},
                         {"cross_interference", t.cross_interference},
                         {"noise", t.noise},
                         {"sinr", t.sinr()}});
        return a;
    };
    return {{"r_dl", report.r_dl},
            {"r_ul", report.r_ul},
            {"sum", report.sum},
            {"dl_terms", terms(report.dl_terms)},
            {"ul_terms", terms(report.ul_terms)}};
}

} // namespace pinch
