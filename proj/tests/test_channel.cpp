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

#include "pinch/channel.hpp"

#include <cmath>
#include <complex>

using namespace pinch;
using doctest::Approx;

namespace
{

using C = std::complex<double>;
constexpr double two_pi = 2.0 * 3.14159265358979323846;

// Scalar transcriptions kept free of library helpers.
C oracle_freespace(double px, double py, double pz, double ux, double uy, double uz, double lambda)
{
    const double d = std::sqrt((px - ux) * (px - ux) + (py - uy) * (py - uy) + (pz - uz) * (pz - uz));
    const double eta = lambda / (4.0 * 3.14159265358979323846);
    return eta / d * std::exp(C(0.0, -two_pi * d / lambda));
}

RadioParams radio_28ghz() { return derive_radio_params(28e9, 1.4, 3.0, 5.0); }

} // namespace

TEST_CASE("free-space channel")
{
    SUBCASE("integer wavelengths give a real value")
    {
        const RadioParams r = derive_radio_params(28e9, 1.4, 3.0, 5.0, 0.01); // 3 / 0.01 = 300
        const cplx h = freespace_channel({0, 0, 3}, {0, 0, 0}, r);
        CHECK(h.real() == Approx(r.eta / 3.0).epsilon(1e-9));
        CHECK(std::abs(h.imag()) < 1e-9 * r.eta);
    }
    SUBCASE("reference geometry")
    {
        const RadioParams r = radio_28ghz();
        const cplx h = freespace_channel({1, 0, 3}, {2, 1, 0}, r);
        CHECK(std::abs(h) == Approx(r.eta / std::sqrt(11.0)).epsilon(1e-12));
        const C o = oracle_freespace(1, 0, 3, 2, 1, 0, r.wavelength_m);
        CHECK(std::abs(h - o) < 1e-12 * std::abs(o));
    }
    SUBCASE("magnitude law on a sweep")
    {
        const RadioParams r = radio_28ghz();
        for (double x = 0.05; x < 20.0; x += 0.731)
        {
            const Position3 pa{x, 0.0, 3.0}, ue{7.3, 0.4, 0.0};
            CHECK(std::abs(freespace_channel(pa, ue, r)) * distance(pa, ue) == Approx(r.eta).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(freespace_channel({1, 2, 3}, {1, 2, 3}, radio_28ghz()), DegenerateGeometry);
}

TEST_CASE("in-waveguide phase")
{
    const RadioParams r = radio_28ghz();
    const Position3 feed{0, 0, 3};
    const cplx at_feed = inwaveguide_phase(feed, feed, r);
    CHECK(at_feed.real() == Approx(1.0));
    CHECK(std::abs(at_feed.imag()) < 1e-15);

    const cplx half = inwaveguide_phase({r.guide_wavelength_m / 2.0, 0, 3}, feed, r);
    CHECK(half.real() == Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(half.imag()) < 1e-12);

    const cplx one = inwaveguide_phase({1.0, 0, 3}, feed, r);
    const C expected = std::exp(C(0.0, -two_pi * 1.0 / r.guide_wavelength_m));
    CHECK(std::abs(one - expected) < 1e-10);
    CHECK(1.0 / r.guide_wavelength_m == Approx(130.75).epsilon(1e-3));
    CHECK(std::abs(one) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("effective channel and channel vector")
{
    Eigen::VectorXcd per(3), guide(3);
    per << C(1, 2), C(-0.5, 0.25), C(0.1, -3);
    guide << std::polar(1.0, 0.3), std::polar(1.0, -1.1), std::polar(1.0, 2.0);

    CHECK(std::abs(effective_channel(per, guide, {0, 0, 0})) == 0.0);
    const cplx single = effective_channel(per, guide, {0, 1, 0});
    CHECK(std::abs(single - per[1] * guide[1]) < 1e-15);
    CHECK(std::abs(single) == Approx(std::abs(per[1])));

    const cplx all = effective_channel(per, guide, {1, 1, 1});
    CHECK(std::abs(all - (per[0] * guide[0] + per[1] * guide[1] + per[2] * guide[2])) < 1e-14);

    const Eigen::VectorXcd v = channel_vector(per, guide, {1, 0, 1});
    CHECK(std::abs(v[0] - per[0] * guide[0]) < 1e-15);
    CHECK(v[1] == C(0, 0));
    CHECK(std::abs(v[2] - per[2] * guide[2]) < 1e-15);
    CHECK(v.norm() <= per.norm() + 1e-15);

    SUBCASE("aligned phases add constructively")
    {
        // Pick distances that are whole wavelengths in free space and whole guide wavelengths inside.
        const RadioParams r = derive_radio_params(28e9, 1.0, 3.0, 5.0, 0.01);
        const Position3 feed{0, 0, 3}, ue{0, 0, 0};
        const Position3 a{0.0, 0, 3}, b{4.0, 0, 3}; // |b-ue| = 5, guide offset 4
        Eigen::VectorXcd h(2), g(2);
        h << freespace_channel(a, ue, r), freespace_channel(b, ue, r);
        g << inwaveguide_phase(a, feed, r), inwaveguide_phase(b, feed, r);
        const double sum_mag = std::abs(h[0]) + std::abs(h[1]);
        CHECK(std::abs(effective_channel(h, g, {1, 1})) == Approx(sum_mag).epsilon(1e-9));
    }
    CHECK(active_count({1, 0, 1, 1}) == 3);
}

TEST_CASE("inter-waveguide channel")
{
    ScenarioConfig c = default_config();
    const auto &r0 = c.radio;
    const double pl = std::pow(r0.wavelength_m / (4.0 * 3.14159265358979323846 * r0.waveguide_separation_m), 2);
    CHECK(freespace_path_loss(r0.waveguide_separation_m, r0) == Approx(pl).epsilon(1e-12));

    SUBCASE("Rician limit approaches the LoS matrix")
    {
        RadioParams r = derive_radio_params(28e9, 1.4, 1e9, 5.0);
        RngStream rng(11);
        const Eigen::MatrixXcd H = interwaveguide_channel(c.tx, c.rx, r, rng);
        REQUIRE(H.rows() == static_cast<Eigen::Index>(c.num_pas_rx()));
        REQUIRE(H.cols() == static_cast<Eigen::Index>(c.num_pas_tx()));
        const double spl = std::sqrt(pl);
        for (Eigen::Index i = 0; i < H.rows(); ++i)
            for (Eigen::Index j = 0; j < H.cols(); ++j)
            {
                const Position3 lr = c.rx.pa_position(static_cast<std::size_t>(i));
                const Position3 lt = c.tx.pa_position(static_cast<std::size_t>(j));
                const double d = distance(lr, lt);
                const C los = std::exp(C(0.0, -two_pi * d / r.wavelength_m));
                CHECK(std::abs(H(i, j) / spl - los) < 1e-3);
            }
    }
    SUBCASE("mean power equals path loss")
    {
        RngStream rng(5);
        double acc = 0.0;
        long count = 0;
        while (count < 100000)
        {
            const Eigen::MatrixXcd H = interwaveguide_channel(c.tx, c.rx, r0, rng);
            acc += H.cwiseAbs2().sum();
            count += H.size();
        }
        const double ratio = acc / static_cast<double>(count) / pl;
        CHECK(ratio >= 0.97);
        CHECK(ratio <= 1.03);
    }
    SUBCASE("per-pair path loss")
    {
        RadioParams r = derive_radio_params(28e9, 1.4, 1e9, 5.0);
        r.pl_at_fixed_separation = false;
        RngStream rng(2);
        const Eigen::MatrixXcd H = interwaveguide_channel(c.tx, c.rx, r, rng);
        const double d = distance(c.rx.pa_position(0), c.tx.pa_position(9));
        CHECK(std::abs(H(0, 9)) == Approx(r.eta / d).epsilon(1e-3));
    }
}

TEST_CASE("UE to UE channel")
{
    const RadioParams r = radio_28ghz();
    SUBCASE("unit path loss distance")
    {
        const double d = r.wavelength_m / (4.0 * 3.14159265358979323846);
        RngStream a(3), b(3);
        const cplx h = ue_to_ue_channel({0, 0, 0}, {d, 0, 0}, r, a);
        CHECK(std::abs(h) == Approx(std::abs(b.complex_normal())).epsilon(1e-9));
    }
    SUBCASE("mean power and inverse-square law")
    {
        RngStream rng(9);
        const int n = 100000;
        double near = 0.0, far = 0.0;
        for (int i = 0; i < n; ++i)
        {
            near += std::norm(ue_to_ue_channel({0, 0, 0}, {2, 0, 0}, r, rng));
            far += std::norm(ue_to_ue_channel({0, 0, 0}, {4, 0, 0}, r, rng));
        }
        const double pl2 = std::pow(r.wavelength_m / (4.0 * 3.14159265358979323846 * 2.0), 2);
        CHECK(near / n / pl2 == Approx(1.0).epsilon(0.03));
        CHECK(far / near == Approx(0.25).epsilon(0.03));
    }
    RngStream rng(1);
    CHECK_THROWS_AS(ue_to_ue_channel({1, 1, 0}, {1, 1, 0}, r, rng), DegenerateGeometry);
}

TEST_CASE("realization draws")
{
    ScenarioConfig c = default_config();
    const ChannelRealization a = draw_realization(c, 4);
    const ChannelRealization b = draw_realization(c, 4);
    CHECK(a.h_dl == b.h_dl);
    CHECK(a.h_ul == b.h_ul);
    CHECK(a.H_tr == b.H_tr);
    CHECK(a.h_cross == b.h_cross);

    const ChannelRealization other = draw_realization(c, 5);
    CHECK(other.H_tr != a.H_tr);

    CHECK(a.h_dl.rows() == 10);
    CHECK(a.h_dl.cols() == 2);
    CHECK(a.h_ul.rows() == 10);
    CHECK(a.h_cross.rows() == 2);
    CHECK(a.h_cross.cols() == 2);
    CHECK(a.H_tr.allFinite());
    for (Eigen::Index n = 0; n < 10; ++n)
    {
        CHECK(std::abs(a.g_t[n]) == Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(a.g_r[n]) == Approx(1.0).epsilon(1e-12));
        for (std::size_t k = 0; k < a.dl_users.size(); ++k)
        {
            const double d = distance(c.tx.pa_position(static_cast<std::size_t>(n)), a.dl_users[k]);
            CHECK(std::abs(a.h_dl(n, static_cast<Eigen::Index>(k))) * d == Approx(c.radio.eta).epsilon(1e-12));
        }
    }
    for (const auto &u : a.dl_users)
    {
        CHECK(u.x >= 0.0);
        CHECK(u.x <= c.room_x_m);
        CHECK(u.y >= 0.0);
        CHECK(u.y <= c.room_y_m);
    }

    SUBCASE("fixed users keep geometry-only fields across indices")
    {
        c.redraw_users = false;
        const ChannelRealization x = draw_realization(c, 0);
        const ChannelRealization y = draw_realization(c, 17);
        CHECK(x.h_dl == y.h_dl);
        CHECK(x.g_t == y.g_t);
        CHECK(x.H_tr != y.H_tr);
        const C o = oracle_freespace(1, 0, 3, 2, 0.5, 0, c.radio.wavelength_m);
        CHECK(std::abs(x.h_dl(0, 0) - o) < 1e-12 * std::abs(o));
    }
}
