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

#include "doctest.h"

#include "pinch/rates.hpp"
#include "rate_oracle.hpp"

#include <cmath>
#include <complex>
#include <numeric>

using namespace pinch;
using doctest::Approx;

namespace
{

using C = std::complex<double>;
using oracle::Oracle;

PowerAllocation some_powers() { return {{3.0, 6.5}, {0.02, 0.011}}; }

ActivationMask some_masks() { return {{1, 0, 1, 1, 0, 0, 1, 0, 0, 1}, {0, 1, 1, 0, 0, 1, 0, 0, 1, 0}}; }

RateModel model(Scenario s, InterferenceFormula f = InterferenceFormula::signal_model)
{
    return {s, f, false};
}

} // namespace

TEST_CASE("SINR matches the scalar transcription on the reference instance")
{
    const ScenarioConfig c = default_config();
    const ChannelRealization ch = draw_realization(c, 0);
    const ActivationMask m = some_masks();
    const PowerAllocation p = some_powers();
    const Oracle o{ch, m, p, c.budget.noise_dl_w, c.budget.noise_ul_w};

    for (int k = 0; k < 2; ++k)
    {
        CHECK(downlink_sinr(k, ch, m, p, c.budget, model(Scenario::S1_interference)) ==
              Approx(o.dl(k, true)).epsilon(1e-12));
        CHECK(downlink_sinr(k, ch, m, p, c.budget, model(Scenario::TDD)) == Approx(o.dl(k, false)).epsilon(1e-12));
    }
    for (int u = 0; u < 2; ++u)
    {
        CHECK(uplink_sinr(u, ch, m, p, c.budget, model(Scenario::S1_interference)) ==
              Approx(o.ul(u, true)).epsilon(1e-12));
        CHECK(uplink_sinr(u, ch, m, p, c.budget,
                          model(Scenario::S1_interference, InterferenceFormula::literal_equation)) ==
              Approx(o.ul(u, true, true)).epsilon(1e-12));
        CHECK(uplink_sinr(u, ch, m, p, c.budget, model(Scenario::S2_no_interference)) ==
              Approx(o.ul(u, false)).epsilon(1e-12));
    }

    const RateReport r = rate_report(ch, m, p, c);
    double sum = 0.0;
    for (int k = 0; k < 2; ++k)
        sum += std::log2(1.0 + o.dl(k, true));
    for (int u = 0; u < 2; ++u)
        sum += std::log2(1.0 + o.ul(u, true));
    CHECK(std::abs(r.sum - sum) < 1e-9);
    CHECK(r.sum == Approx(std::accumulate(r.r_dl.begin(), r.r_dl.end(), 0.0) +
                          std::accumulate(r.r_ul.begin(), r.r_ul.end(), 0.0))
                       .epsilon(1e-12));
    CHECK(r.r_dl[1] == Approx(std::log2(1.0 + r.dl_terms[1].sinr())).epsilon(1e-15));
}

TEST_CASE("degenerate and unit cases")
{
    const ScenarioConfig c = default_config();
    const ChannelRealization ch = draw_realization(c, 1);
    const ActivationMask m = ActivationMask::all_active(10, 10);

    PowerAllocation z{{0.0, 0.0}, {0.0, 0.0}};
    const RateReport r = rate_report(ch, m, z, c);
    CHECK(r.sum == 0.0);
    for (double x : r.r_dl)
        CHECK(x == 0.0);

    PowerAllocation p = some_powers();
    p.p_dl[0] = 0.0;
    p.p_ul[1] = 0.0;
    CHECK(downlink_sinr(0, ch, m, p, c.budget, model(Scenario::S1_interference)) == 0.0);
    CHECK(uplink_sinr(1, ch, m, p, c.budget, model(Scenario::S1_interference)) == 0.0);

    ActivationMask none{Mask(10, 0), Mask(10, 1)};
    CHECK_THROWS_AS(downlink_sinr(0, ch, none, p, c.budget, model(Scenario::S2_no_interference)), InactiveMask);
    ActivationMask no_rx{Mask(10, 1), Mask(10, 0)};
    CHECK_THROWS_AS(uplink_sinr(0, ch, no_rx, p, c.budget, model(Scenario::S2_no_interference)), InactiveMask);

    SUBCASE("single user single PA gives one bit")
    {
        ChannelRealization one;
        one.h_dl = Eigen::MatrixXcd::Constant(1, 1, C(0.0, 2e-6));
        one.h_ul = Eigen::MatrixXcd::Constant(1, 1, C(1e-6, 0.0));
        one.g_t = Eigen::VectorXcd::Constant(1, C(0.0, 1.0));
        one.g_r = Eigen::VectorXcd::Constant(1, C(1.0, 0.0));
        one.H_tr = Eigen::MatrixXcd::Zero(1, 1);
        one.h_cross = Eigen::MatrixXcd::Zero(0, 1);
        PowerBudget b;
        b.noise_dl_w = 4e-12 * 0.5;
        const PowerAllocation q{{0.5}, {}};
        const ActivationMask mm = ActivationMask::all_active(1, 1);
        CHECK(downlink_sinr(0, one, mm, q, b, model(Scenario::S2_no_interference)) == Approx(1.0).epsilon(1e-12));
        CHECK(rate_report(one, mm, q, b, model(Scenario::S2_no_interference)).sum == Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("uplink alone reduces to received SNR")
    {
        ChannelRealization one;
        one.h_dl = Eigen::MatrixXcd::Zero(3, 0);
        one.h_ul = Eigen::MatrixXcd::Constant(3, 1, C(1e-6, 1e-6));
        one.g_t = Eigen::VectorXcd::Ones(3);
        one.g_r = Eigen::VectorXcd::Ones(3);
        one.H_tr = Eigen::MatrixXcd::Zero(3, 3);
        one.h_cross = Eigen::MatrixXcd::Zero(1, 0);
        PowerBudget b;
        const PowerAllocation q{{}, {0.01}};
        const ActivationMask mm{{1, 1, 1}, {1, 0, 1}};
        const double h2 = std::norm(C(2e-6, 2e-6));
        CHECK(uplink_sinr(0, one, mm, q, b, model(Scenario::S2_no_interference)) ==
              Approx(0.01 * h2 / b.noise_ul_w).epsilon(1e-12));
    }
}

TEST_CASE("inter-waveguide power")
{
    const ScenarioConfig c = default_config();
    const ChannelRealization ch = draw_realization(c, 2);

    const PowerAllocation zero{{0.0, 0.0}, {0.01, 0.01}};
    const ActivationMask all = ActivationMask::all_active(10, 10);
    CHECK(interwaveguide_power(ch, all, zero, InterferenceFormula::signal_model) == 0.0);
    CHECK(interwaveguide_power(ch, all, zero, InterferenceFormula::literal_equation) == 0.0);

    SUBCASE("single active pair")
    {
        ActivationMask m{Mask(10, 0), Mask(10, 0)};
        m.delta[4] = 1;
        m.beta[7] = 1;
        const PowerAllocation p{{1.5, 2.0}, {0.0, 0.0}};
        const double expect = 3.5 * std::norm(ch.g_r[7] * ch.H_tr(7, 4) * std::conj(ch.g_t[4]));
        CHECK(interwaveguide_power(ch, m, p, InterferenceFormula::signal_model) == Approx(expect).epsilon(1e-12));
    }
    SUBCASE("modes differ by total power times active count")
    {
        const ActivationMask m = some_masks();
        const PowerAllocation p = some_powers();
        const double sig = interwaveguide_power(ch, m, p, InterferenceFormula::signal_model);
        const double lit = interwaveguide_power(ch, m, p, InterferenceFormula::literal_equation);
        CHECK(lit / sig == Approx((3.0 + 6.5) * 5.0).epsilon(1e-12));
    }
}

TEST_CASE("scenario relationships")
{
    const ScenarioConfig c = default_config();
    RngStream rng(77);
    for (std::uint64_t idx = 0; idx < 20; ++idx)
    {
        const ChannelRealization ch = draw_realization(c, idx);
        ActivationMask m{Mask(10, 0), Mask(10, 0)};
        for (int n = 0; n < 10; ++n)
        {
            m.delta[n] = rng.uniform() < 0.5;
            m.beta[n] = rng.uniform() < 0.5;
        }
        m.delta[rng.uniform() < 0.5 ? 0 : 9] = 1;
        m.beta[3] = 1;
        const PowerAllocation p{{rng.uniform(0, 5), rng.uniform(0, 5)},
                                {rng.uniform(0, c.budget.ue_max_w), rng.uniform(0, c.budget.ue_max_w)}};

        const RateReport s1 = rate_report(ch, m, p, c.budget, model(Scenario::S1_interference));
        const RateReport s2 = rate_report(ch, m, p, c.budget, model(Scenario::S2_no_interference));
        const RateReport td = rate_report(ch, m, p, c.budget, model(Scenario::TDD));
        CHECK(s2.sum >= s1.sum - 1e-12);
        for (int u = 0; u < 2; ++u)
            CHECK(td.r_ul[u] == Approx(0.5 * s2.r_ul[u]).epsilon(1e-12));
        for (double x : s1.r_dl)
            CHECK(x >= 0.0);

        // Own power never hurts.
        PowerAllocation more = p;
        more.p_dl[0] *= 1.7;
        CHECK(downlink_sinr(0, ch, m, more, c.budget, model(Scenario::S1_interference)) >=
              downlink_sinr(0, ch, m, p, c.budget, model(Scenario::S1_interference)));

        // Common scaling of powers and noise leaves interference-limited downlink SINR intact.
        PowerBudget b2 = c.budget;
        b2.noise_dl_w *= 37.0;
        const PowerAllocation p2{{p.p_dl[0] * 37.0, p.p_dl[1] * 37.0}, {}};
        const PowerAllocation p1{p.p_dl, {}};
        CHECK(downlink_sinr(1, ch, m, p2, b2, model(Scenario::TDD)) ==
              Approx(downlink_sinr(1, ch, m, p1, c.budget, model(Scenario::TDD))).epsilon(1e-12));
    }

    SUBCASE("literal TDD drops intra-direction interference")
    {
        const ChannelRealization ch = draw_realization(c, 3);
        const ActivationMask m = some_masks();
        const PowerAllocation p = some_powers();
        RateModel lit{Scenario::TDD, InterferenceFormula::signal_model, true};
        const SinrTerms t = downlink_terms(0, ch, m, p, c.budget, lit);
        CHECK(t.intra_interference == 0.0);
        CHECK(t.cross_interference == 0.0);
        const SinrTerms d = downlink_terms(0, ch, m, p, c.budget, model(Scenario::TDD));
        CHECK(d.intra_interference > 0.0);
    }
}
