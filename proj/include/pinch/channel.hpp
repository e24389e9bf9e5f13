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

#include "pinch/core.hpp"
#include "pinch/rng.hpp"

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include <complex>
#include <cstdint>
#include <vector>

namespace pinch
{

using cplx = std::complex<double>;
/// Binary PA activation vector; entries are 0 or 1.
using Mask = std::vector<std::uint8_t>;

/// delta selects radiating PAs on the transmit waveguide, beta the
/// collecting PAs on the receive waveguide.
struct ActivationMask
{
    Mask delta;
    Mask beta;

    static ActivationMask all_active(std::size_t n_tx, std::size_t n_rx)
    {
        return {Mask(n_tx, 1), Mask(n_rx, 1)};
    }
};

std::size_t active_count(const Mask &mask);

/// Everything random or geometry-dependent about one Monte Carlo trial.
/// Per-PA channels exclude the activation mask.
struct ChannelRealization
{
    Eigen::MatrixXcd h_dl;    ///< N_t x K, PA n -> downlink user k
    Eigen::MatrixXcd h_ul;    ///< N_r x U, uplink user u -> PA n
    Eigen::VectorXcd g_t;     ///< in-waveguide phases, transmit waveguide
    Eigen::VectorXcd g_r;     ///< in-waveguide phases, receive waveguide
    Eigen::MatrixXcd H_tr;    ///< N_r x N_t, transmit PA -> receive PA
    Eigen::MatrixXcd h_cross; ///< U x K, uplink user -> downlink user
    std::vector<Position3> dl_users;
    std::vector<Position3> ul_users;

    std::size_t num_dl() const noexcept { return static_cast<std::size_t>(h_dl.cols()); }
    std::size_t num_ul() const noexcept { return static_cast<std::size_t>(h_ul.cols()); }
};

/// Spherical-wave free-space channel eta * exp(-j 2 pi d / lambda) / d.
cplx freespace_channel(const Position3 &pa, const Position3 &ue, const RadioParams &radio);

/// Lossless guided propagation exp(-j 2 pi d / lambda_g) from the feed point.
cplx inwaveguide_phase(const Position3 &pa, const Position3 &feed, const RadioParams &radio);

/// Scalar waveguide-to-user channel: sum_n mask[n] * per_pa[n] * guide[n].
cplx effective_channel(const Eigen::Ref<const Eigen::VectorXcd> &per_pa,
                       const Eigen::Ref<const Eigen::VectorXcd> &guide, const Mask &mask);

/// Per-PA vector [mask[n] * per_pa[n] * guide[n]]_n.
Eigen::VectorXcd channel_vector(const Eigen::Ref<const Eigen::VectorXcd> &per_pa,
                                const Eigen::Ref<const Eigen::VectorXcd> &guide, const Mask &mask);

/// Free-space path loss (lambda / (4 pi d))^2.
double freespace_path_loss(double distance_m, const RadioParams &radio);

/// Rician inter-waveguide matrix. The LoS part uses the geometric phase
/// between each PA pair; the NLoS part is i.i.d. unit-variance CN(0, 1).
Eigen::MatrixXcd interwaveguide_channel(const WaveguideLayout &tx, const WaveguideLayout &rx,
                                        const RadioParams &radio, RngStream &rng);

/// Rayleigh UE-to-UE link with free-space large-scale loss.
cplx ue_to_ue_channel(const Position3 &ul_ue, const Position3 &dl_ue, const RadioParams &radio,
                      RngStream &rng);

/// Pure function of (config, realization_index).
ChannelRealization draw_realization(const ScenarioConfig &config, std::uint64_t realization_index);

/// Complex entries are stored as [re, im] pairs.
nlohmann::json to_json(const ChannelRealization &ch);

} // namespace pinch
