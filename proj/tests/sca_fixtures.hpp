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
#include "pinch/rates.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace fixtures
{

/// Reference geometry reduced to one downlink and one uplink user.
inline pinch::ScenarioConfig single_pair(pinch::Scenario s = pinch::Scenario::S2_no_interference)
{
    pinch::ScenarioConfig c = pinch::default_config();
    c.dl_users.resize(1);
    c.ul_users.resize(1);
    c.thresholds.dl_bps_hz = {0.0};
    c.thresholds.ul_bps_hz = {0.0};
    c.scenario = s;
    pinch::validate(c);
    return c;
}

/// Brute-force sum rate for K = U = 1 without inter-waveguide leakage, written
/// straight from the channel arrays on a uniform grid that includes both ends.
inline double grid_optimum(const pinch::ChannelRealization &ch, const pinch::ActivationMask &m,
                           const pinch::ScenarioConfig &c, int points = 200)
{
    std::complex<double> hk = 0.0, hu = 0.0;
    double nd = 0.0, nr = 0.0;
    for (int n = 0; n < ch.h_dl.rows(); ++n)
    {
        hk += double(m.delta[n]) * ch.h_dl(n, 0) * ch.g_t[n];
        nd += m.delta[n];
    }
    for (int n = 0; n < ch.h_ul.rows(); ++n)
    {
        hu += double(m.beta[n]) * ch.h_ul(n, 0) * ch.g_r[n];
        nr += m.beta[n];
    }
    const double gk = std::norm(hk) / nd;
    const double gu = std::norm(hu) / nr;
    const double x2 = std::norm(ch.h_cross(0, 0));
    double best = 0.0;
    for (int i = 0; i < points; ++i)
        for (int j = 0; j < points; ++j)
        {
            const double p = c.budget.bs_total_w * i / (points - 1);
            const double q = c.budget.ue_max_w * j / (points - 1);
            const double dl = gk * p / (x2 * q + c.budget.noise_dl_w);
            const double ul = q * gu / (c.budget.noise_ul_w / nr);
            best = std::max(best, std::log2(1.0 + dl) + std::log2(1.0 + ul));
        }
    return best;
}

} // namespace fixtures
