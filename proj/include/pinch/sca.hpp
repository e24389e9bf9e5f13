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
#include "pinch/conic.hpp"
#include "pinch/core.hpp"
#include "pinch/rates.hpp"
#include "pinch/rng.hpp"

#include <iosfwd>
#include <vector>

namespace pinch
{

/// One outer iteration of the SCA loop.
struct ScaIterate
{
    int iteration = 0;
    double objective = 0.0;          ///< surrogate optimum (sum of gamma, rate-scaled)
    double true_sum_rate = 0.0;      ///< rate_report at the iterate's powers
    double max_violation = 0.0;      ///< largest cone violation reported by the solver
    double tightness_residual = 0.0; ///< max relative AGM residual after the surrogate update
};

/// Current SCA iterate. Powers are watts; omega is the downlink
/// interference-plus-noise epigraph (watts), kappa the uplink one in the
/// units of the uplink rate expression (watts / sum(beta)).
struct ScaState
{
    PowerAllocation pw;
    std::vector<double> alpha_dl, gamma_dl, omega_dl;
    std::vector<double> alpha_ul, gamma_ul, kappa_ul;
    std::vector<double> zeta; ///< sqrt(omega_k / alpha_k)
    std::vector<double> nu;   ///< sqrt(kappa_u / alpha_u)
    std::vector<double> objective_trace;
    std::vector<ScaIterate> history;
    double initial_objective = 0.0;
    int iteration = 0;
    bool restored = false; ///< the random start was replaced by the most interior feasible point
};

/// Sets zeta, nu from the current alpha, omega, kappa; returns the largest
/// relative AGM residual |(a z)^2 + (w / z)^2 - 2 a w| / (2 a w).
double update_surrogates(ScaState &state);

/// Random powers within budget (sum p_k = init_dl_fraction * P_t, P_u
/// uniform in [0, P_u^max]) with every auxiliary at its equality value.
ScaState initialize(const ChannelRealization &ch, const ActivationMask &masks, const ScenarioConfig &config,
                    RngStream &rng);

/// ScaState with the given powers and every auxiliary at its equality value.
ScaState state_at(const PowerAllocation &pw, const ChannelRealization &ch, const ActivationMask &masks,
                  const ScenarioConfig &config);

/// Result of the power-feasibility program. With linear interference the
/// SINR targets are linear in the powers, so feasibility is decided exactly.
struct FeasiblePoint
{
    conic::SolveStatus status = conic::SolveStatus::numerical_failure;
    PowerAllocation pw;
    double margin = 0.0; ///< normalized SINR margin; positive means strictly feasible

    bool feasible() const { return status == conic::SolveStatus::optimal && margin > 0.0; }
};

/// Maximizes the smallest normalized SINR margin over the power budgets.
FeasiblePoint feasible_powers(const ChannelRealization &ch, const ActivationMask &masks,
                              const ScenarioConfig &config);

/// Index map of the subproblem variables. Powers are normalized by their
/// budgets and omega/kappa by the respective noise terms inside the program.
struct SubproblemLayout
{
    std::vector<int> p_dl, p_ul, alpha_dl, gamma_dl, omega_dl, alpha_ul, gamma_ul, kappa_ul;
};

/// Normalization constants linking program variables to physical units.
struct Normalization
{
    double p_dl = 1.0;  ///< P_t
    double p_ul = 1.0;  ///< P_u^max
    double omega = 1.0; ///< sigma_k^2
    double kappa = 1.0; ///< sigma^2 / sum(beta)
};

struct Subproblem
{
    conic::ConicProgram program;
    SubproblemLayout layout;
    Normalization scale;
    Eigen::VectorXd start; ///< current state in program coordinates
};

/// Convex surrogate of the power-allocation problem around `state`:
/// linear budgets and interference epigraphs, exponential cones for
/// log2(1 + alpha) >= gamma, AGM second-order cones for alpha * omega <= signal,
/// and the rate thresholds.
Subproblem build_subproblem(const ScaState &state, const ChannelRealization &ch, const ActivationMask &masks,
                            const ScenarioConfig &config);

struct SubproblemSolution
{
    conic::SolveStatus status = conic::SolveStatus::numerical_failure;
    conic::Solution raw;
};

SubproblemSolution solve_subproblem(const conic::ConicProgram &program, double tol,
                                    const std::optional<Eigen::VectorXd> &start = std::nullopt);

/// Copies a program solution back into physical units.
void apply_solution(ScaState &state, const Subproblem &sub, const Eigen::VectorXd &x);

enum class ScaStatus
{
    converged,
    max_iterations,
    infeasible_at_init,
    nonmonotone_objective,
    solver_failure
};

const char *to_string(ScaStatus s);

struct ScaResult
{
    ScaStatus status = ScaStatus::solver_failure;
    PowerAllocation pw;
    RateReport report;
    ScaState state;
    int start = 0; ///< 0 random, 1 quiet uplink, 2 quiet downlink

    /// True when `pw` is a usable allocation (the loop ran at least once).
    bool has_solution() const
    {
        return status == ScaStatus::converged || status == ScaStatus::max_iterations ||
               (status != ScaStatus::infeasible_at_init && !state.objective_trace.empty());
    }
};

/// Algorithm: build the surrogate, solve it, move zeta/nu to the new point,
/// stop when the surrogate optimum changes by less than epsilon or after
/// max_iters. When the first surrogate cannot meet the thresholds the start
/// moves to feasible_powers(); if that has no positive margin the run stops
/// with infeasible_at_init.
///
/// SCA only finds a local optimum, and switching a direction off is a common
/// one that a random start rarely reaches. The rng overload therefore also
/// runs up to two deterministic starts (config.sca.starts) and keeps the best
/// outcome that passes verify_solution.
ScaResult run_sca(const ChannelRealization &ch, const ActivationMask &masks, const ScenarioConfig &config,
                  RngStream &rng);
ScaResult run_sca(const ChannelRealization &ch, const ActivationMask &masks, const ScenarioConfig &config,
                  ScaState initial);

struct ConstraintCheck
{
    bool ok = true;
    double slack = 0.0; ///< negative when violated
};

/// Power-budget and rate-threshold checks using the exact rate expressions.
struct VerificationReport
{
    ConstraintCheck bs_budget;
    std::vector<ConstraintCheck> ue_power;
    std::vector<ConstraintCheck> dl_rate;
    std::vector<ConstraintCheck> ul_rate;
    RateReport rates;

    bool all_ok() const;
    double max_violation() const;
};

VerificationReport verify_solution(const PowerAllocation &pw, const ChannelRealization &ch,
                                   const ActivationMask &masks, const ScenarioConfig &config,
                                   double rate_slack = 1e-6);

/// iteration, objective, true_sum_rate, max_violation, tightness_residual
void write_trace_csv(std::ostream &out, const ScaState &state);

} // namespace pinch
