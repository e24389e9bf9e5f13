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

#include "pinch/channel.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <algorithm>

namespace pinch
{

std::size_t active_count(const Mask &mask)
{
    return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

namespace
{

cplx unit_phase(double distance_m, double wavelength_m)
{
    // exp(-j 2 pi d / lambda); the phase is reduced modulo one wavelength first
    // so large distances keep full precision.
    const double cycles = distance_m / wavelength_m;
    const double frac = cycles - std::floor(cycles);
    return std::polar(1.0, -2.0 * pi * frac);
}

} // namespace

cplx freespace_channel(const Position3 &pa, const Position3 &ue, const RadioParams &radio)
{
    const double d = distance(pa, ue);
    if (!(d > 0.0))
        throw DegenerateGeometry("freespace_channel: PA and user coincide");
    return radio.eta / d * unit_phase(d, radio.wavelength_m);
}

cplx inwaveguide_phase(const Position3 &pa, const Position3 &feed, const RadioParams &radio)
{
    return unit_phase(distance(pa, feed), radio.guide_wavelength_m);
}

cplx effective_channel(const Eigen::Ref<const Eigen::VectorXcd> &per_pa,
                       const Eigen::Ref<const Eigen::VectorXcd> &guide, const Mask &mask)
{
    cplx sum{0.0, 0.0};
    for (Eigen::Index n = 0; n < per_pa.size(); ++n)
        if (mask[static_cast<std::size_t>(n)])
            sum += per_pa[n] * guide[n];
    return sum;
}

Eigen::VectorXcd channel_vector(const Eigen::Ref<const Eigen::VectorXcd> &per_pa,
                                const Eigen::Ref<const Eigen::VectorXcd> &guide, const Mask &mask)
{
    Eigen::VectorXcd v(per_pa.size());
    for (Eigen::Index n = 0; n < per_pa.size(); ++n)
        v[n] = mask[static_cast<std::size_t>(n)] ? per_pa[n] * guide[n] : cplx{0.0, 0.0};
    return v;
}

double freespace_path_loss(double distance_m, const RadioParams &radio)
{
    if (!(distance_m > 0.0))
        throw DegenerateGeometry("freespace_path_loss: zero distance");
    const double a = radio.wavelength_m / (4.0 * pi * distance_m);
    return a * a;
}

Eigen::MatrixXcd interwaveguide_channel(const WaveguideLayout &tx, const WaveguideLayout &rx,
                                        const RadioParams &radio, RngStream &rng)
{
    const auto n_tx = static_cast<Eigen::Index>(tx.size());
    const auto n_rx = static_cast<Eigen::Index>(rx.size());
    const double kf = radio.rician_factor;
    const double los_w = std::sqrt(kf / (1.0 + kf));
    const double nlos_w = std::sqrt(1.0 / (1.0 + kf));
    const double fixed_pl = freespace_path_loss(radio.waveguide_separation_m, radio);

    Eigen::MatrixXcd H(n_rx, n_tx);
    // Column-major fill so the RNG consumption order is fixed.
    for (Eigen::Index j = 0; j < n_tx; ++j)
    {
        const Position3 pt = tx.pa_position(static_cast<std::size_t>(j));
        for (Eigen::Index i = 0; i < n_rx; ++i)
        {
            const Position3 pr = rx.pa_position(static_cast<std::size_t>(i));
            const double d = distance(pt, pr);
            const double pl = radio.pl_at_fixed_separation ? fixed_pl : freespace_path_loss(d, radio);
            const cplx los = unit_phase(d, radio.wavelength_m);
            const cplx nlos = rng.complex_normal();
            H(i, j) = std::sqrt(pl) * (los_w * los + nlos_w * nlos);
        }
    }
    return H;
}

cplx ue_to_ue_channel(const Position3 &ul_ue, const Position3 &dl_ue, const RadioParams &radio, RngStream &rng)
{
    const double d = distance(ul_ue, dl_ue);
    if (!(d > 0.0))
        throw DegenerateGeometry("ue_to_ue_channel: users coincide");
    return std::sqrt(freespace_path_loss(d, radio)) * rng.complex_normal();
}

ChannelRealization draw_realization(const ScenarioConfig &config, std::uint64_t realization_index)
{
    ChannelRealization ch;
    ch.dl_users = config.dl_users;
    ch.ul_users = config.ul_users;
    if (config.redraw_users)
    {
        auto urng = RngStream::substream(config.rng_seed, realization_index, StreamTag::users);
        for (auto &u : ch.dl_users)
            u = {urng.uniform(0.0, config.room_x_m), urng.uniform(0.0, config.room_y_m), 0.0};
        for (auto &u : ch.ul_users)
            u = {urng.uniform(0.0, config.room_x_m), urng.uniform(0.0, config.room_y_m), 0.0};
    }

    const auto n_tx = static_cast<Eigen::Index>(config.tx.size());
    const auto n_rx = static_cast<Eigen::Index>(config.rx.size());
    const auto K = static_cast<Eigen::Index>(ch.dl_users.size());
    const auto U = static_cast<Eigen::Index>(ch.ul_users.size());
    const auto &radio = config.radio;

    ch.g_t.resize(n_tx);
    ch.h_dl.resize(n_tx, K);
    for (Eigen::Index n = 0; n < n_tx; ++n)
    {
        const Position3 pa = config.tx.pa_position(static_cast<std::size_t>(n));
        ch.g_t[n] = inwaveguide_phase(pa, config.tx.feed_point, radio);
        for (Eigen::Index k = 0; k < K; ++k)
            ch.h_dl(n, k) = freespace_channel(pa, ch.dl_users[static_cast<std::size_t>(k)], radio);
    }
    ch.g_r.resize(n_rx);
    ch.h_ul.resize(n_rx, U);
    for (Eigen::Index n = 0; n < n_rx; ++n)
    {
        const Position3 pa = config.rx.pa_position(static_cast<std::size_t>(n));
        ch.g_r[n] = inwaveguide_phase(pa, config.rx.feed_point, radio);
        for (Eigen::Index u = 0; u < U; ++u)
            ch.h_ul(n, u) = freespace_channel(pa, ch.ul_users[static_cast<std::size_t>(u)], radio);
    }

    auto rng = RngStream::substream(config.rng_seed, realization_index, StreamTag::channel);
    ch.H_tr = interwaveguide_channel(config.tx, config.rx, radio, rng);
    ch.h_cross.resize(U, K);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index u = 0; u < U; ++u)
            ch.h_cross(u, k) = ue_to_ue_channel(ch.ul_users[static_cast<std::size_t>(u)],
                                                ch.dl_users[static_cast<std::size_t>(k)], radio, rng);
    return ch;
}

namespace
{

nlohmann::json matrix_json(const Eigen::MatrixXcd &m)
{
    auto rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
    {
        auto row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json positions_json(const std::vector<Position3> &ps)
{
    auto out = nlohmann::json::array();
    for (const auto &p : ps)
        out.push_back({p.x, p.y, p.z});
    return out;
}

} // namespace

nlohmann::json to_json(const ChannelRealization &ch)
{
    nlohmann::json j;
    j["h_dl"] = matrix_json(ch.h_dl);
    j["h_ul"] = matrix_json(ch.h_ul);
    j["g_t"] = matrix_json(ch.g_t);
    j["g_r"] = matrix_json(ch.g_r);
    j["H_tr"] = matrix_json(ch.H_tr);
    j["h_cross"] = matrix_json(ch.h_cross);
    j["dl_users"] = positions_json(ch.dl_users);
    j["ul_users"] = positions_json(ch.ul_users);
    return j;
}

} // namespace pinch
