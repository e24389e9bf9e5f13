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

#include "pinch/activation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace pinch
{

double total_distance(std::size_t pa_index, const WaveguideLayout &layout, const std::vector<Position3> &ues)
{
    const Position3 pa = layout.pa_position(pa_index);
    double d = 0.0;
    for (const auto &u : ues)
        d += distance(pa, u);
    return d;
}

double spatial_correlation(const std::vector<Eigen::VectorXcd> &vectors)
{
    std::vector<double> norms;
    norms.reserve(vectors.size());
    for (const auto &v : vectors)
    {
        if (v.size() != vectors.front().size())
            throw std::invalid_argument("spatial_correlation: vectors differ in length");
        const double n = v.norm();
        if (!(n > 0.0))
            throw std::invalid_argument("spatial_correlation: zero-norm channel vector");
        norms.push_back(n);
    }
    double rho = 0.0;
    for (std::size_t k = 0; k < vectors.size(); ++k)
    {
        rho += 1.0;
        for (std::size_t i = k + 1; i < vectors.size(); ++i)
            rho += std::min(1.0, std::abs(vectors[k].dot(vectors[i])) / (norms[k] * norms[i]));
    }
    return rho;
}

namespace
{

double masked_correlation(const Eigen::MatrixXcd &per_pa, const Eigen::VectorXcd &guide, const Mask &mask)
{
    std::vector<Eigen::VectorXcd> vs;
    vs.reserve(static_cast<std::size_t>(per_pa.cols()));
    for (Eigen::Index k = 0; k < per_pa.cols(); ++k)
        vs.push_back(channel_vector(per_pa.col(k), guide, mask));
    return spatial_correlation(vs);
}

} // namespace

std::pair<Mask, ActivationTrace> select_active_pas(const WaveguideLayout &layout, const std::vector<Position3> &ues,
                                                   const Eigen::MatrixXcd &per_pa_channels,
                                                   const Eigen::VectorXcd &guide)
{
    const std::size_t n = layout.size();
    if (n == 0 || ues.empty())
        throw std::invalid_argument("select_active_pas: need at least one PA and one user");
    if (static_cast<std::size_t>(per_pa_channels.rows()) != n || static_cast<std::size_t>(guide.size()) != n ||
        static_cast<std::size_t>(per_pa_channels.cols()) != ues.size())
        throw std::invalid_argument("select_active_pas: channel dimensions do not match layout/users");

    std::vector<double> dist(n);
    for (std::size_t i = 0; i < n; ++i)
        dist[i] = total_distance(i, layout, ues);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });

    Mask mask(n, 0);
    ActivationTrace trace;
    mask[order.front()] = 1;
    trace.accepted.push_back(order.front());
    double rho = masked_correlation(per_pa_channels, guide, mask);
    trace.rho_history.push_back(rho);
    trace.iterations = 1;

    for (std::size_t pos = 1; pos < n; ++pos)
    {
        const std::size_t cand = order[pos];
        mask[cand] = 1;
        const double rho_star = masked_correlation(per_pa_channels, guide, mask);
        if (rho_star < rho * (1.0 - rho_decrease_tolerance))
        {
            trace.accepted.push_back(cand);
            rho = rho_star;
            trace.rho_history.push_back(rho);
        }
        else
        {
            mask[cand] = 0;
            trace.rejected.push_back({cand, rho_star, rho});
        }
        ++trace.iterations;
    }
    trace.final_rho = rho;
    return {mask, trace};
}

ActivationResult select_activation(const ScenarioConfig &config, const ChannelRealization &ch,
                                   ActivationPolicy policy)
{
    ActivationResult r;
    if (policy == ActivationPolicy::all_active)
    {
        r.masks = ActivationMask::all_active(config.tx.size(), config.rx.size());
        return r;
    }
    auto [delta, tx_trace] = select_active_pas(config.tx, ch.dl_users, ch.h_dl, ch.g_t);
    auto [beta, rx_trace] = select_active_pas(config.rx, ch.ul_users, ch.h_ul, ch.g_r);
    r.masks = {std::move(delta), std::move(beta)};
    r.tx_trace = std::move(tx_trace);
    r.rx_trace = std::move(rx_trace);
    return r;
}

nlohmann::json to_json(const ActivationTrace &trace)
{
    auto rejected = nlohmann::json::array();
    for (const auto &r : trace.rejected)
        rejected.push_back({{"index", r.index}, {"rho_candidate", r.rho_candidate}, {"rho_incumbent", r.rho_incumbent}});
    return {{"accepted", trace.accepted},
            {"rejected", rejected},
            {"rho_history", trace.rho_history},
            {"final_rho", trace.final_rho},
            {"iterations", trace.iterations}};
}

} // namespace pinch
