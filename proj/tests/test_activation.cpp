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

#include "pinch/activation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

using namespace pinch;
using doctest::Approx;

namespace
{

using C = std::complex<double>;

WaveguideLayout line(std::vector<double> xs)
{
    WaveguideLayout w;
    w.pa_x_positions = std::move(xs);
    w.height = 3.0;
    w.length = w.pa_x_positions.back() + 1.0;
    w.feed_point = {0.0, 0.0, 3.0};
    return w;
}

} // namespace

TEST_CASE("total distance")
{
    const WaveguideLayout w = line({1, 3, 5});
    CHECK(total_distance(1, w, {{3, 0, 0}}) == Approx(3.0));
    CHECK(total_distance(1, w, {{2, 0, 0}, {4, 0, 0}}) == Approx(2.0 * std::sqrt(10.0)));

    const ScenarioConfig c = default_config();
    const std::vector<Position3> ues{{2, 0.5, 0}, {18, 0.5, 0}};
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t n = 0; n < c.tx.size(); ++n)
    {
        const double x = c.tx.pa_x_positions[n];
        double d = 0.0;
        for (const auto &u : ues)
            d += std::sqrt((x - u.x) * (x - u.x) + 0.25 + 9.0);
        CHECK(total_distance(n, c.tx, ues) == Approx(d).epsilon(1e-12));
        if (d < best_d)
        {
            best_d = d;
            best = n;
        }
    }
    const ChannelRealization ch = draw_realization(c, 0);
    const auto [mask, trace] = select_active_pas(c.tx, ues, ch.h_dl, ch.g_t);
    CHECK(trace.accepted.front() == best);
}

TEST_CASE("spatial correlation")
{
    Eigen::VectorXcd a(3), b(3);
    a << C(1, 0), C(0, 1), C(0, 0);
    b << C(0, 0), C(0, 0), C(2, -1);
    CHECK(spatial_correlation({a}) == Approx(1.0));
    CHECK(spatial_correlation({a, b}) == Approx(2.0));
    CHECK(spatial_correlation({a, a}) == Approx(3.0));
    CHECK(spatial_correlation({a, C(0, 3) * a}) == Approx(3.0));
    CHECK_THROWS(spatial_correlation({a, Eigen::VectorXcd::Zero(3)}));
}

TEST_CASE("greedy selection against a hand trace")
{
    // UEs near x = 1.3 put the visit order at PA 1, 2, 0, 3.
    const WaveguideLayout w = line({0, 1, 2, 3});
    const std::vector<Position3> ues{{1.2, 0, 0}, {1.4, 0, 0}};
    Eigen::MatrixXcd h(4, 2);
    h.col(0) << 1, 1, 1, 1;
    h.col(1) << C(1, 0), C(1, 0), C(-1, 0), C(0, 1);
    const Eigen::VectorXcd g = Eigen::VectorXcd::Ones(4);

    // init {1}: identical single entries, rho = 3
    // +2: v0 = (0,1,1,0), v1 = (0,1,-1,0), orthogonal, rho = 2, accept
    // +0: inner product 1 over norms 3, rho = 7/3, reject
    // +3: inner product i over norms 3, rho = 7/3, reject
    const auto [mask, t] = select_active_pas(w, ues, h, g);
    CHECK(mask == Mask{0, 1, 1, 0});
    CHECK(t.accepted == std::vector<std::size_t>{1, 2});
    REQUIRE(t.rejected.size() == 2);
    CHECK(t.rejected[0].index == 0);
    CHECK(t.rejected[0].rho_candidate == Approx(7.0 / 3.0));
    CHECK(t.rejected[0].rho_incumbent == Approx(2.0));
    CHECK(t.rejected[1].index == 3);
    CHECK(t.rejected[1].rho_candidate == Approx(7.0 / 3.0));
    CHECK(t.rho_history.size() == 2);
    CHECK(t.rho_history[0] == Approx(3.0));
    CHECK(t.final_rho == Approx(2.0));
    CHECK(t.iterations == 4);

    SUBCASE("identical directions never accept")
    {
        Eigen::MatrixXcd same(4, 2);
        same.col(0) << C(1, 1), C(0.5, 0), C(0, -2), C(3, 0);
        same.col(1) = C(0, 2) * same.col(0);
        const auto [m2, t2] = select_active_pas(w, ues, same, g);
        CHECK(t2.accepted == std::vector<std::size_t>{1});
        CHECK(std::count(m2.begin(), m2.end(), 1) == 1);
        CHECK(t2.final_rho == Approx(3.0));
    }
    SUBCASE("a far appended PA leaves the accepted prefix alone")
    {
        const WaveguideLayout far = line({0, 1, 2, 3, 1e6});
        Eigen::MatrixXcd hf(5, 2);
        hf.topRows(4) = h;
        hf.row(4) << C(1e-12, 0), C(0, 1e-12);
        Eigen::VectorXcd gf = Eigen::VectorXcd::Ones(5);
        const auto [mf, tf] = select_active_pas(far, ues, hf, gf);
        REQUIRE(tf.accepted.size() >= t.accepted.size());
        CHECK(std::equal(t.accepted.begin(), t.accepted.end(), tf.accepted.begin()));
        CHECK(tf.iterations == 5);
    }
    SUBCASE("one PA")
    {
        const auto [m1, t1] = select_active_pas(line({4}), ues, h.topRows(1), g.head(1));
        CHECK(m1 == Mask{1});
        CHECK(t1.accepted == std::vector<std::size_t>{0});
        CHECK(t1.iterations == 1);
    }
    SUBCASE("a single user never gains a second PA")
    {
        const auto [m1, t1] = select_active_pas(w, {ues[0]}, h.leftCols(1), g);
        CHECK(t1.accepted.size() == 1);
        CHECK(t1.final_rho == Approx(1.0));
    }
}

TEST_CASE("trace invariants over reference realizations")
{
    const ScenarioConfig c = default_config();
    for (std::uint64_t idx = 0; idx < 25; ++idx)
    {
        const ChannelRealization ch = draw_realization(c, idx);
        const ActivationResult r = select_activation(c, ch, ActivationPolicy::algorithmic);
        for (const auto *t : {&r.tx_trace, &r.rx_trace})
        {
            CHECK(!t->accepted.empty());
            CHECK(t->iterations == 10);
            std::set<std::size_t> seen(t->accepted.begin(), t->accepted.end());
            for (const auto &rej : t->rejected)
            {
                CHECK(seen.insert(rej.index).second);
                CHECK(rej.rho_candidate >= rej.rho_incumbent * (1.0 - 1e-12));
            }
            CHECK(seen.size() == 10);
            for (std::size_t i = 1; i < t->rho_history.size(); ++i)
                CHECK(t->rho_history[i] < t->rho_history[i - 1]);
            CHECK(t->final_rho == t->rho_history.back());
        }
        CHECK(active_count(r.masks.delta) == r.tx_trace.accepted.size());
        CHECK(active_count(r.masks.beta) == r.rx_trace.accepted.size());

        const ActivationResult again = select_activation(c, ch, ActivationPolicy::algorithmic);
        CHECK(again.masks.delta == r.masks.delta);
        CHECK(again.masks.beta == r.masks.beta);
    }
    const ChannelRealization ch = draw_realization(c, 0);
    const ActivationResult all = select_activation(c, ch, ActivationPolicy::all_active);
    CHECK(active_count(all.masks.delta) == 10);
    CHECK(active_count(all.masks.beta) == 10);

    const nlohmann::json j = to_json(select_activation(c, ch, ActivationPolicy::algorithmic).tx_trace);
    CHECK(j.contains("accepted"));
    CHECK(j.contains("rejected"));
}
