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

#include <utility>
#include <vector>

namespace pinch
{

struct RejectedCandidate
{
    std::size_t index;
    double rho_candidate;
    double rho_incumbent;
};

/// Audit record of one greedy selection run.
struct ActivationTrace
{
    std::vector<std::size_t> accepted; ///< initial PA first, then accepted candidates in visit order
    std::vector<RejectedCandidate> rejected;
    std::vector<double> rho_history; ///< incumbent rho after initialization and after each acceptance
    double final_rho = 0.0;
    std::size_t iterations = 0; ///< initial activation plus one per visited candidate
};

/// Sum of distances from PA n to every user.
double total_distance(std::size_t pa_index, const WaveguideLayout &layout, const std::vector<Position3> &ues);

/// rho = sum_{k} sum_{i >= k} |v_k^H v_i| / (|v_k| |v_i|), self terms included.
/// Throws std::invalid_argument on a zero-norm or mismatched vector.
double spatial_correlation(const std::vector<Eigen::VectorXcd> &vectors);

/// Relative margin by which a candidate's rho must undercut the incumbent;
/// keeps rounding noise on identical channel directions from counting as a decrease.
inline constexpr double rho_decrease_tolerance = 1e-12;

/// Greedy distance-then-correlation PA selection on one waveguide.
/// The PA with the smallest total user distance is activated first; the
/// remaining PAs are visited in ascending total distance (ties to the lower
/// index) and kept only when they strictly lower the users' spatial
/// correlation.
std::pair<Mask, ActivationTrace> select_active_pas(const WaveguideLayout &layout, const std::vector<Position3> &ues,
                                                   const Eigen::MatrixXcd &per_pa_channels,
                                                   const Eigen::VectorXcd &guide);

struct ActivationResult
{
    ActivationMask masks;
    ActivationTrace tx_trace;
    ActivationTrace rx_trace;
};

/// Applies the configured policy to both waveguides for one realization.
ActivationResult select_activation(const ScenarioConfig &config, const ChannelRealization &ch,
                                   ActivationPolicy policy);

nlohmann::json to_json(const ActivationTrace &trace);

} // namespace pinch
