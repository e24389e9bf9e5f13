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

#include "pinch/sca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace pinch
{

namespace
{

constexpr double ln2 = 0.69314718055994530942;

/// Normalized link coefficients for one (channel, mask, config) triple.
struct LinkCoefficients
{
    Normalization scale;
    std::vector<double> dl_gain;          ///< a_k = |h_k|^2 P_t / (sum(delta) sigma_k^2)
    std::vector<std::vector<double>> cross; ///< cross[u][k] = |h_uk|^2 P_u^max / sigma_k^2
    std::vector<double> ul_gain;          ///< c_u = |h_u|^2 P_u^max / sigma^2
    double leak_linear = 0.0;             ///< signal_model: P_t |G|^2 / (sum(delta) sigma^2)
    double leak_quadratic = 0.0;          ///< literal_equation: P_t^2 |G|^2 / sigma^2
    RateModel model;
};

LinkCoefficients coefficients(const ChannelRealization &ch, const ActivationMask &masks, const ScenarioConfig &config)
{
    const auto e = effective_channels(ch, masks);
    if (e.n_active_tx == 0)
        throw InactiveMask("sca: no active transmit PA");
    if (e.n_active_rx == 0)
        throw InactiveMask("sca: no active receive PA");
    const auto &b = config.budget;

    LinkCoefficients c;
    c.model = RateModel::from(config);
    c.scale.p_dl = b.bs_total_w;
    c.scale.p_ul = b.ue_max_w;
    c.scale.omega = b.noise_dl_w;
    c.scale.kappa = b.noise_ul_w / e.n_active_rx;

    for (const auto &h : e.dl)
        c.dl_gain.push_back(std::norm(h) * b.bs_total_w / (e.n_active_tx * b.noise_dl_w));
    for (const auto &h : e.ul)
        c.ul_gain.push_back(std::norm(h) * b.ue_max_w / b.noise_ul_w);
    c.cross.assign(e.ul.size(), std::vector<double>(e.dl.size(), 0.0));
    for (std::size_t u = 0; u < e.ul.size(); ++u)
        for (std::size_t k = 0; k < e.dl.size(); ++k)
            c.cross[u][k] = std::norm(ch.h_cross(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(k))) *
                            b.ue_max_w / b.noise_dl_w;
    const double g2 = std::norm(e.coupling);
    c.leak_linear = b.bs_total_w * g2 / (e.n_active_tx * b.noise_ul_w);
    c.leak_quadratic = b.bs_total_w * b.bs_total_w * g2 / b.noise_ul_w;
    return c;
}

double rel_agm_residual(double a, double w, double z)
{
    const double lhs = (a * z) * (a * z) + (w / z) * (w / z);
    const double ref = 2.0 * a * w;
    return std::abs(lhs - ref) / std::max(ref, 1e-300);
}

double state_objective(const ScaState &s, double rate_scale)
{
    return rate_scale * (std::accumulate(s.gamma_dl.begin(), s.gamma_dl.end(), 0.0) +
                         std::accumulate(s.gamma_ul.begin(), s.gamma_ul.end(), 0.0));
}

} // namespace

double update_surrogates(ScaState &s)
{
    double worst = 0.0;
    s.zeta.resize(s.alpha_dl.size());
    s.nu.resize(s.alpha_ul.size());
    for (std::size_t k = 0; k < s.alpha_dl.size(); ++k)
    {
        s.zeta[k] = std::sqrt(s.omega_dl[k] / s.alpha_dl[k]);
        worst = std::max(worst, rel_agm_residual(s.alpha_dl[k], s.omega_dl[k], s.zeta[k]));
    }
    for (std::size_t u = 0; u < s.alpha_ul.size(); ++u)
    {
        s.nu[u] = std::sqrt(s.kappa_ul[u] / s.alpha_ul[u]);
        worst = std::max(worst, rel_agm_residual(s.alpha_ul[u], s.kappa_ul[u], s.nu[u]));
    }
    return worst;
}

ScaState initialize(const ChannelRealization &ch, const ActivationMask &masks, const ScenarioConfig &config,
                    RngStream &rng)
{
    const std::size_t K = ch.num_dl();
    const std::size_t U = ch.num_ul();
    ScaState s;
    s.pw.p_dl.resize(K);
    s.pw.p_ul.resize(U);
    double total = 0.0;
    for (auto &p : s.pw.p_dl)
    {
        p = rng.uniform(0.0, 1.0);
        while (p <= 0.0)
            p = rng.uniform(0.0, 1.0);
        total += p;
    }
    for (auto &p : s.pw.p_dl)
        p *= config.sca.init_dl_fraction * config.budget.bs_total_w / total;
    for (auto &p : s.pw.p_ul)
    {
        p = rng.uniform(0.0, 1.0) * config.budget.ue_max_w;
        while (p <= 0.0)
            p = rng.uniform(0.0, 1.0) * config.budget.ue_max_w;
    }

    return state_at(s.pw, ch, masks, config);
}

ScaState state_at(const PowerAllocation &pw, const ChannelRealization &ch, const ActivationMask &masks,
                  const ScenarioConfig &config)
{
    ScaState s;
    s.pw = pw;
    const RateModel model = RateModel::from(config);
    for (std::size_t k = 0; k < ch.num_dl(); ++k)
    {
        const auto t = downlink_terms(k, ch, masks, s.pw, config.budget, model);
        s.omega_dl.push_back(t.intra_interference + t.cross_interference + t.noise);
        s.alpha_dl.push_back(t.sinr());
        s.gamma_dl.push_back(std::log2(1.0 + s.alpha_dl.back()));
    }
    for (std::size_t u = 0; u < ch.num_ul(); ++u)
    {
        const auto t = uplink_terms(u, ch, masks, s.pw, config.budget, model);
        s.kappa_ul.push_back(t.intra_interference + t.cross_interference + t.noise);
        s.alpha_ul.push_back(t.sinr());
        s.gamma_ul.push_back(std::log2(1.0 + s.alpha_ul.back()));
    }
    update_surrogates(s);
    s.initial_objective = state_objective(s, model.rate_scale());
    return s;
}

Subproblem build_subproblem(const ScaState &state, const ChannelRealization &ch, const ActivationMask &masks,
                            const ScenarioConfig &config)
{
    using conic::AffineExpr;
    const std::size_t K = ch.num_dl();
    const std::size_t U = ch.num_ul();
    if (state.pw.p_dl.size() != K || state.pw.p_ul.size() != U || state.alpha_dl.size() != K ||
        state.alpha_ul.size() != U || state.zeta.size() != K || state.nu.size() != U ||
        config.thresholds.dl_bps_hz.size() != K || config.thresholds.ul_bps_hz.size() != U)
        throw std::invalid_argument("build_subproblem: inconsistent dimensions");

    const LinkCoefficients c = coefficients(ch, masks, config);
    Subproblem sub;
    sub.scale = c.scale;
    auto &prog = sub.program;
    auto &L = sub.layout;

    const auto declare = [&](std::vector<int> &idx, const char *name, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i)
            idx.push_back(prog.add_variable(std::string(name) + "[" + std::to_string(i) + "]"));
    };
    declare(L.p_dl, "p_dl", K);
    declare(L.p_ul, "p_ul", U);
    declare(L.alpha_dl, "alpha_dl", K);
    declare(L.gamma_dl, "gamma_dl", K);
    declare(L.omega_dl, "omega_dl", K);
    declare(L.alpha_ul, "alpha_ul", U);
    declare(L.gamma_ul, "gamma_ul", U);
    declare(L.kappa_ul, "kappa_ul", U);

    const double rate_scale = c.model.rate_scale();

    // Budgets.
    AffineExpr budget(1.0);
    for (int i : L.p_dl)
        budget.add(i, -1.0);
    prog.add_nonnegative(budget, "bs_budget");
    for (std::size_t k = 0; k < K; ++k)
        prog.add_nonnegative(AffineExpr::var(L.p_dl[k]), "p_dl_nonneg");
    for (std::size_t u = 0; u < U; ++u)
    {
        prog.add_nonnegative(AffineExpr::var(L.p_ul[u]), "p_ul_nonneg");
        prog.add_nonnegative(AffineExpr(1.0).add(L.p_ul[u], -1.0), "p_ul_max");
    }

    const auto rate_block = [&](int alpha, int gamma, double threshold, const std::string &tag) {
        prog.add_nonnegative(AffineExpr::var(alpha), "alpha_nonneg_" + tag);
        prog.add_exponential(AffineExpr::var(gamma, ln2), AffineExpr(1.0), AffineExpr(1.0).add(alpha, 1.0),
                             "log_rate_" + tag);
        const double need = std::max(threshold / rate_scale, 0.0);
        prog.add_nonnegative(AffineExpr::var(gamma) - AffineExpr(need), "threshold_" + tag);
    };

    // Downlink.
    for (std::size_t k = 0; k < K; ++k)
    {
        const std::string tag = "dl" + std::to_string(k);
        rate_block(L.alpha_dl[k], L.gamma_dl[k], config.thresholds.dl_bps_hz[k], tag);

        AffineExpr epi = AffineExpr::var(L.omega_dl[k]) - AffineExpr(1.0);
        if (c.model.has_intra_interference())
            for (std::size_t j = 0; j < K; ++j)
                if (j != k)
                    epi.add(L.p_dl[j], -c.dl_gain[k]);
        if (c.model.has_cross_user_interference())
            for (std::size_t u = 0; u < U; ++u)
                epi.add(L.p_ul[u], -c.cross[u][k]);
        prog.add_nonnegative(epi, "interference_" + tag);

        // (alpha zeta)^2 + (omega / zeta)^2 <= 2 * (a p) * 1
        const double z = state.zeta[k] / std::sqrt(c.scale.omega);
        prog.add_rotated(AffineExpr::var(L.p_dl[k], c.dl_gain[k]), AffineExpr(1.0),
                         {AffineExpr::var(L.alpha_dl[k], z), AffineExpr::var(L.omega_dl[k], 1.0 / z)}, "agm_" + tag);
    }

    // Uplink.
    for (std::size_t u = 0; u < U; ++u)
    {
        const std::string tag = "ul" + std::to_string(u);
        rate_block(L.alpha_ul[u], L.gamma_ul[u], config.thresholds.ul_bps_hz[u], tag);

        AffineExpr epi = AffineExpr::var(L.kappa_ul[u]) - AffineExpr(1.0);
        if (c.model.has_intra_interference())
            for (std::size_t j = 0; j < U; ++j)
                if (j != u)
                    epi.add(L.p_ul[j], -c.ul_gain[j]);
        const bool leak = c.model.has_interwaveguide_interference();
        if (leak && c.model.formula == InterferenceFormula::signal_model)
        {
            for (int i : L.p_dl)
                epi.add(i, -c.leak_linear);
            prog.add_nonnegative(epi, "interference_" + tag);
        }
        else if (leak && c.leak_quadratic > 0.0)
        {
            // q s^2 <= r  as  (sqrt(2 q) s)^2 <= 2 r, s = sum of normalized BS powers.
            AffineExpr s_expr;
            for (int i : L.p_dl)
                s_expr.add(i, std::sqrt(2.0 * c.leak_quadratic));
            prog.add_rotated(epi, AffineExpr(1.0), {s_expr}, "interference_" + tag);
        }
        else
        {
            prog.add_nonnegative(epi, "interference_" + tag);
        }

        const double z = state.nu[u] / std::sqrt(c.scale.kappa);
        prog.add_rotated(AffineExpr::var(L.p_ul[u], c.ul_gain[u]), AffineExpr(1.0),
                         {AffineExpr::var(L.alpha_ul[u], z), AffineExpr::var(L.kappa_ul[u], 1.0 / z)}, "agm_" + tag);
    }

    AffineExpr obj;
    for (int i : L.gamma_dl)
        obj.add(i, rate_scale);
    for (int i : L.gamma_ul)
        obj.add(i, rate_scale);
    prog.set_objective(obj);

    // The current point sits on the AGM boundary. Pull it slightly inside:
    // with z fixed, (0.8 a)^2 z^2 + (1.05 w)^2 / z^2 < 2 a w, so the cone
    // stays strictly feasible while the epigraph and budgets gain slack.
    sub.start = Eigen::VectorXd::Zero(prog.num_variables());
    const auto interior = [&](int p_idx, int a_idx, int g_idx, int w_idx, double p, double alpha, double w,
                              double threshold) {
        const double a = 0.8 * alpha;
        const double need = std::max(threshold / rate_scale, 0.0);
        const double cap = std::log2(1.0 + a);
        sub.start[p_idx] = 0.999 * p;
        sub.start[a_idx] = a;
        sub.start[g_idx] = cap > need ? 0.5 * (cap + need) : cap;
        sub.start[w_idx] = 1.05 * w;
    };
    for (std::size_t k = 0; k < K; ++k)
        interior(L.p_dl[k], L.alpha_dl[k], L.gamma_dl[k], L.omega_dl[k], state.pw.p_dl[k] / c.scale.p_dl,
                 state.alpha_dl[k], state.omega_dl[k] / c.scale.omega, config.thresholds.dl_bps_hz[k]);
    for (std::size_t u = 0; u < U; ++u)
        interior(L.p_ul[u], L.alpha_ul[u], L.gamma_ul[u], L.kappa_ul[u], state.pw.p_ul[u] / c.scale.p_ul,
                 state.alpha_ul[u], state.kappa_ul[u] / c.scale.kappa, config.thresholds.ul_bps_hz[u]);
    prog.check();
    return sub;
}

SubproblemSolution solve_subproblem(const conic::ConicProgram &program, double tol,
                                    const std::optional<Eigen::VectorXd> &start)
{
    conic::SolverSettings settings;
    settings.gap_tolerance = tol;
    SubproblemSolution out;
    out.raw = conic::solve(program, settings, start);
    out.status = out.raw.status;
    return out;
}

void apply_solution(ScaState &s, const Subproblem &sub, const Eigen::VectorXd &x)
{
    const auto &L = sub.layout;
    for (std::size_t k = 0; k < L.p_dl.size(); ++k)
    {
        s.pw.p_dl[k] = std::max(0.0, x[L.p_dl[k]]) * sub.scale.p_dl;
        s.alpha_dl[k] = x[L.alpha_dl[k]];
        s.gamma_dl[k] = x[L.gamma_dl[k]];
        s.omega_dl[k] = x[L.omega_dl[k]] * sub.scale.omega;
    }
    for (std::size_t u = 0; u < L.p_ul.size(); ++u)
    {
        s.pw.p_ul[u] = std::clamp(x[L.p_ul[u]], 0.0, 1.0) * sub.scale.p_ul;
        s.alpha_ul[u] = x[L.alpha_ul[u]];
        s.gamma_ul[u] = x[L.gamma_ul[u]];
        s.kappa_ul[u] = x[L.kappa_ul[u]] * sub.scale.kappa;
    }
}

const char *to_string(ScaStatus s)
{
    switch (s)
    {
    case ScaStatus::converged: return "converged";
    case ScaStatus::max_iterations: return "max_iterations";
    case ScaStatus::infeasible_at_init: return "infeasible_at_init";
    case ScaStatus::nonmonotone_objective: return "nonmonotone_objective";
    case ScaStatus::solver_failure: return "solver_failure";
    }
    return "?";
}

namespace
{

constexpr double subproblem_tolerance = 1e-8;
constexpr double monotone_tolerance = 1e-6;

} // namespace

namespace
{

/// Large SINR targets would dominate the row; dividing by them keeps every row O(1).
conic::AffineExpr row_scaled(conic::AffineExpr e, double theta)
{
    return (1.0 / std::max(1.0, theta)) * std::move(e);
}

} // namespace

FeasiblePoint feasible_powers(const ChannelRealization &ch, const ActivationMask &masks,
                              const ScenarioConfig &config)
{
    using conic::AffineExpr;
    const LinkCoefficients c = coefficients(ch, masks, config);
    const std::size_t K = ch.num_dl();
    const std::size_t U = ch.num_ul();
    const double rate_scale = c.model.rate_scale();
    const auto sinr_need = [&](double r) { return std::exp2(std::max(r, 0.0) / rate_scale) - 1.0; };

    FeasiblePoint out;
    // A target beyond double range cannot be met by any finite power.
    for (const auto *ts : {&config.thresholds.dl_bps_hz, &config.thresholds.ul_bps_hz})
        for (double r : *ts)
            if (!std::isfinite(sinr_need(r)))
            {
                out.status = conic::SolveStatus::infeasible;
                return out;
            }

    conic::ConicProgram prog;
    std::vector<int> p, q;
    for (std::size_t k = 0; k < K; ++k)
        p.push_back(prog.add_variable("p_dl[" + std::to_string(k) + "]"));
    for (std::size_t u = 0; u < U; ++u)
        q.push_back(prog.add_variable("p_ul[" + std::to_string(u) + "]"));
    const int tau = prog.add_variable("margin");

    AffineExpr budget(1.0);
    for (int i : p)
    {
        budget.add(i, -1.0);
        prog.add_nonnegative(AffineExpr::var(i));
    }
    prog.add_nonnegative(budget);
    for (int i : q)
    {
        prog.add_nonnegative(AffineExpr::var(i));
        prog.add_nonnegative(AffineExpr(1.0).add(i, -1.0));
    }
    prog.add_nonnegative(AffineExpr(1.0).add(tau, -1.0));

    // signal - theta * (interference + noise) >= theta * margin, everything over noise.
    for (std::size_t k = 0; k < K; ++k)
    {
        const double th = sinr_need(config.thresholds.dl_bps_hz[k]);
        AffineExpr e = AffineExpr::var(p[k], c.dl_gain[k]) - AffineExpr(th);
        if (c.model.has_intra_interference())
            for (std::size_t j = 0; j < K; ++j)
                if (j != k)
                    e.add(p[j], -th * c.dl_gain[k]);
        if (c.model.has_cross_user_interference())
            for (std::size_t u = 0; u < U; ++u)
                e.add(q[u], -th * c.cross[u][k]);
        prog.add_nonnegative(row_scaled(e.add(tau, -th), th));
    }
    int leak_var = -1;
    const bool leak = c.model.has_interwaveguide_interference();
    if (leak && c.model.formula == InterferenceFormula::literal_equation && c.leak_quadratic > 0.0)
    {
        // (sqrt(2) sum p)^2 <= 2 r
        leak_var = prog.add_variable("leak");
        AffineExpr sum;
        for (int i : p)
            sum.add(i, std::sqrt(2.0));
        prog.add_rotated(AffineExpr::var(leak_var), AffineExpr(1.0), {sum});
    }
    for (std::size_t u = 0; u < U; ++u)
    {
        const double th = sinr_need(config.thresholds.ul_bps_hz[u]);
        AffineExpr e = AffineExpr::var(q[u], c.ul_gain[u]) - AffineExpr(th);
        if (c.model.has_intra_interference())
            for (std::size_t j = 0; j < U; ++j)
                if (j != u)
                    e.add(q[j], -th * c.ul_gain[j]);
        if (leak && c.model.formula == InterferenceFormula::signal_model)
            for (int i : p)
                e.add(i, -th * c.leak_linear);
        if (leak_var >= 0)
            e.add(leak_var, -th * c.leak_quadratic);
        prog.add_nonnegative(row_scaled(e.add(tau, -th), th));
    }
    prog.set_objective(AffineExpr::var(tau));

    conic::SolverSettings settings;
    settings.gap_tolerance = subproblem_tolerance;
    const auto sol = conic::solve(prog, settings);
    out.status = sol.status;
    if (sol.status != conic::SolveStatus::optimal)
        return out;
    out.margin = sol.x[tau];
    out.pw.p_dl.resize(K);
    out.pw.p_ul.resize(U);
    for (std::size_t k = 0; k < K; ++k)
        out.pw.p_dl[k] = std::max(sol.x[p[k]], 0.0) * c.scale.p_dl;
    for (std::size_t u = 0; u < U; ++u)
        out.pw.p_ul[u] = std::clamp(sol.x[q[u]], 0.0, 1.0) * c.scale.p_ul;
    return out;
}

namespace
{

bool meets_thresholds(const PowerAllocation &pw, const ChannelRealization &ch, const ActivationMask &masks,
                      const ScenarioConfig &config)
{
    const RateReport r = rate_report(ch, masks, pw, config);
    for (std::size_t k = 0; k < r.r_dl.size(); ++k)
        if (!(r.r_dl[k] > config.thresholds.dl_bps_hz[k]))
            return false;
    for (std::size_t u = 0; u < r.r_ul.size(); ++u)
        if (!(r.r_ul[u] > config.thresholds.ul_bps_hz[u]))
            return false;
    return true;
}

/// Walks from the interior point toward the original start and stops short
/// of the feasibility boundary. The feasible set is convex in the powers, so
/// the feasible part of the segment is an interval and bisection finds its end.
/// Keeping most of the random start's shape avoids beginning at the symmetric
/// max-margin point, where the surrogate is nearly stationary.
PowerAllocation toward_start(const PowerAllocation &start, const PowerAllocation &interior,
                             const ChannelRealization &ch, const ActivationMask &masks, const ScenarioConfig &config)
{
    const auto mix = [&](double lam) {
        PowerAllocation pw = interior;
        for (std::size_t k = 0; k < pw.p_dl.size(); ++k)
            pw.p_dl[k] = lam * start.p_dl[k] + (1.0 - lam) * interior.p_dl[k];
        for (std::size_t u = 0; u < pw.p_ul.size(); ++u)
            pw.p_ul[u] = lam * start.p_ul[u] + (1.0 - lam) * interior.p_ul[u];
        return pw;
    };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 50; ++i)
    {
        const double mid = 0.5 * (lo + hi);
        (meets_thresholds(mix(mid), ch, masks, config) ? lo : hi) = mid;
    }
    return mix(0.9 * lo);
}

} // namespace

namespace
{

constexpr double quiet_fraction = 1e-3;

/// 1: downlink at the initial budget share, uplink nearly silent. 2: the reverse.
PowerAllocation quiet_start(int which, std::size_t K, std::size_t U, const ScenarioConfig &config)
{
    const double dl_share = config.sca.init_dl_fraction * config.budget.bs_total_w / static_cast<double>(K);
    PowerAllocation pw;
    pw.p_dl.assign(K, which == 1 ? dl_share : quiet_fraction * dl_share);
    pw.p_ul.assign(U, which == 1 ? quiet_fraction * config.budget.ue_max_w : config.budget.ue_max_w);
    return pw;
}

} // namespace

ScaResult run_sca(const ChannelRealization &ch, const ActivationMask &masks, const ScenarioConfig &config,
                  RngStream &rng)
{
    ScaResult best = run_sca(ch, masks, config, initialize(ch, masks, config, rng));
    // A proof of infeasibility does not depend on the start.
    if (best.status == ScaStatus::infeasible_at_init || config.sca.starts <= 1)
        return best;

    const auto verified = [&](const ScaResult &r) {
        return r.has_solution() && verify_solution(r.pw, ch, masks, config).all_ok();
    };
    bool best_ok = verified(best);
    for (int s = 1; s < config.sca.starts; ++s)
    {
        const PowerAllocation pw = quiet_start(s, ch.num_dl(), ch.num_ul(), config);
        ScaResult r = run_sca(ch, masks, config, state_at(pw, ch, masks, config));
        r.start = s;
        if (!r.has_solution())
            continue;
        const bool ok = verified(r);
        const bool better = !best.has_solution() || (ok && !best_ok) ||
                            (ok == best_ok && r.report.sum > best.report.sum + 1e-9);
        if (better)
        {
            best = std::move(r);
            best_ok = ok;
        }
    }
    return best;
}

ScaResult run_sca(const ChannelRealization &ch, const ActivationMask &masks, const ScenarioConfig &config,
                  ScaState initial)
{
    ScaResult result;
    result.state = std::move(initial);
    ScaState &s = result.state;
    const RateModel model = RateModel::from(config);

    double previous = s.initial_objective;
    for (int n = 1; n <= config.sca.max_iters; ++n)
    {
        const Subproblem sub = build_subproblem(s, ch, masks, config);
        auto sol = solve_subproblem(sub.program, subproblem_tolerance, sub.start);
        if (n == 1 && sol.status == conic::SolveStatus::infeasible)
        {
            // The random start cannot reach the thresholds; move to the most
            // interior power point instead, or stop if none exists.
            const auto fp = feasible_powers(ch, masks, config);
            if (!fp.feasible())
            {
                result.status = fp.status == conic::SolveStatus::numerical_failure ? ScaStatus::solver_failure
                                                                                  : ScaStatus::infeasible_at_init;
                result.pw = s.pw;
                return result;
            }
            ScaState moved = state_at(toward_start(s.pw, fp.pw, ch, masks, config), ch, masks, config);
            moved.restored = true;
            moved.initial_objective = s.initial_objective;
            s = std::move(moved);
            previous = state_objective(s, model.rate_scale());
            const Subproblem again = build_subproblem(s, ch, masks, config);
            sol = solve_subproblem(again.program, subproblem_tolerance, again.start);
            if (sol.status != conic::SolveStatus::optimal)
            {
                result.status = ScaStatus::solver_failure;
                result.pw = s.pw;
                return result;
            }
            apply_solution(s, again, sol.raw.x);
        }
        else if (sol.status != conic::SolveStatus::optimal)
        {
            result.status = n == 1 && sol.status == conic::SolveStatus::infeasible ? ScaStatus::infeasible_at_init
                                                                                    : ScaStatus::solver_failure;
            break;
        }
        else
        {
            apply_solution(s, sub, sol.raw.x);
        }

        const double lambda = sol.raw.objective;
        if (!s.objective_trace.empty() && lambda < s.objective_trace.back() - monotone_tolerance)
        {
            s.objective_trace.push_back(lambda);
            result.status = ScaStatus::nonmonotone_objective;
            break;
        }
        ScaIterate rec;
        rec.iteration = n;
        rec.objective = lambda;
        rec.true_sum_rate = rate_report(ch, masks, s.pw, config).sum;
        rec.max_violation = sol.raw.max_violation;
        rec.tightness_residual = update_surrogates(s);
        s.history.push_back(rec);
        s.objective_trace.push_back(lambda);
        s.iteration = n;

        if (std::abs(lambda - previous) < config.sca.epsilon)
        {
            result.status = ScaStatus::converged;
            break;
        }
        previous = lambda;
        if (n == config.sca.max_iters)
            result.status = ScaStatus::max_iterations;
    }
    result.pw = s.pw;
    if (result.has_solution())
        result.report = rate_report(ch, masks, s.pw, config);
    return result;
}

bool VerificationReport::all_ok() const
{
    const auto ok = [](const std::vector<ConstraintCheck> &v) {
        return std::all_of(v.begin(), v.end(), [](const ConstraintCheck &c) { return c.ok; });
    };
    return bs_budget.ok && ok(ue_power) && ok(dl_rate) && ok(ul_rate);
}

double VerificationReport::max_violation() const
{
    double worst = std::max(0.0, -bs_budget.slack);
    for (const auto *v : {&ue_power, &dl_rate, &ul_rate})
        for (const auto &c : *v)
            worst = std::max(worst, -c.slack);
    return worst;
}

VerificationReport verify_solution(const PowerAllocation &pw, const ChannelRealization &ch,
                                   const ActivationMask &masks, const ScenarioConfig &config, double rate_slack)
{
    VerificationReport r;
    const auto &b = config.budget;
    const double total = std::accumulate(pw.p_dl.begin(), pw.p_dl.end(), 0.0);
    const double power_tol = 1e-9 * b.bs_total_w;
    r.bs_budget.slack = b.bs_total_w - total;
    r.bs_budget.ok = r.bs_budget.slack >= -power_tol &&
                     std::all_of(pw.p_dl.begin(), pw.p_dl.end(), [](double p) { return p >= 0.0; });
    for (double p : pw.p_ul)
    {
        ConstraintCheck c;
        c.slack = std::min(b.ue_max_w - p, p);
        c.ok = c.slack >= -1e-9 * b.ue_max_w;
        r.ue_power.push_back(c);
    }
    r.rates = rate_report(ch, masks, pw, config);
    for (std::size_t k = 0; k < r.rates.r_dl.size(); ++k)
    {
        ConstraintCheck c;
        c.slack = r.rates.r_dl[k] - config.thresholds.dl_bps_hz[k];
        c.ok = c.slack >= -rate_slack;
        r.dl_rate.push_back(c);
    }
    for (std::size_t u = 0; u < r.rates.r_ul.size(); ++u)
    {
        ConstraintCheck c;
        c.slack = r.rates.r_ul[u] - config.thresholds.ul_bps_hz[u];
        c.ok = c.slack >= -rate_slack;
        r.ul_rate.push_back(c);
    }
    return r;
}

void write_trace_csv(std::ostream &out, const ScaState &state)
{
    const auto prec = out.precision(17);
    out << "iteration,objective,true_sum_rate,max_violation,tightness_residual\n";
    for (const auto &h : state.history)
        out << h.iteration << "," << h.objective << "," << h.true_sum_rate << "," << h.max_violation << ","
            << h.tightness_residual << "\n";
    out.precision(prec);
}

} // namespace pinch
