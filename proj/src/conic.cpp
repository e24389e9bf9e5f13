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

#include "pinch/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <cstdlib>

namespace pinch::conic
{

double AffineExpr::eval(const Eigen::VectorXd &x) const
{
    double v = constant;
    for (const auto &[i, c] : terms)
        v += c * x[i];
    return v;
}

AffineExpr operator+(AffineExpr a, const AffineExpr &b)
{
    a.terms.insert(a.terms.end(), b.terms.begin(), b.terms.end());
    a.constant += b.constant;
    return a;
}

AffineExpr operator-(AffineExpr a, const AffineExpr &b)
{
    for (const auto &[i, c] : b.terms)
        a.terms.emplace_back(i, -c);
    a.constant -= b.constant;
    return a;
}

AffineExpr operator*(double s, AffineExpr a)
{
    for (auto &t : a.terms)
        t.second *= s;
    a.constant *= s;
    return a;
}

int ConicProgram::add_variable(std::string name)
{
    names_.push_back(std::move(name));
    return static_cast<int>(names_.size()) - 1;
}

int ConicProgram::index_of(const std::string &name) const
{
    const auto it = std::find(names_.begin(), names_.end(), name);
    return it == names_.end() ? -1 : static_cast<int>(it - names_.begin());
}

void ConicProgram::add_equality(AffineExpr lhs, std::string label)
{
    blocks_.push_back({ConeKind::zero, {std::move(lhs)}, std::move(label)});
}

void ConicProgram::add_nonnegative(AffineExpr expr, std::string label)
{
    blocks_.push_back({ConeKind::nonnegative, {std::move(expr)}, std::move(label)});
}

void ConicProgram::add_second_order(AffineExpr head, std::vector<AffineExpr> tail, std::string label)
{
    std::vector<AffineExpr> rows;
    rows.reserve(tail.size() + 1);
    rows.push_back(std::move(head));
    for (auto &t : tail)
        rows.push_back(std::move(t));
    blocks_.push_back({ConeKind::second_order, std::move(rows), std::move(label)});
}

void ConicProgram::add_rotated(AffineExpr u, AffineExpr v, std::vector<AffineExpr> tail, std::string label)
{
    std::vector<AffineExpr> rows;
    rows.reserve(tail.size() + 2);
    rows.push_back(std::move(u));
    rows.push_back(std::move(v));
    for (auto &t : tail)
        rows.push_back(std::move(t));
    blocks_.push_back({ConeKind::rotated, std::move(rows), std::move(label)});
}

void ConicProgram::add_exponential(AffineExpr x, AffineExpr y, AffineExpr z, std::string label)
{
    blocks_.push_back({ConeKind::exponential, {std::move(x), std::move(y), std::move(z)}, std::move(label)});
}

ConicProgram ConicProgram::without(ConeKind kind) const
{
    ConicProgram out = *this;
    out.blocks_.erase(std::remove_if(out.blocks_.begin(), out.blocks_.end(),
                                     [&](const ConeBlock &b) { return b.kind == kind; }),
                      out.blocks_.end());
    return out;
}

std::size_t ConicProgram::count(ConeKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(blocks_.begin(), blocks_.end(), [&](const ConeBlock &b) { return b.kind == kind; }));
}

double ConicProgram::barrier_parameter() const
{
    double nu = 0.0;
    for (const auto &b : blocks_)
    {
        switch (b.kind)
        {
        case ConeKind::zero: break;
        case ConeKind::nonnegative: nu += 1.0; break;
        case ConeKind::second_order:
        case ConeKind::rotated: nu += 2.0; break;
        case ConeKind::exponential: nu += 3.0; break;
        }
    }
    return nu;
}

void ConicProgram::check() const
{
    const auto check_expr = [&](const AffineExpr &e, const std::string &where) {
        for (const auto &[i, c] : e.terms)
        {
            if (i < 0 || i >= num_variables())
                throw std::invalid_argument("conic program: " + where + " references undeclared variable " +
                                            std::to_string(i));
            if (!std::isfinite(c))
                throw std::invalid_argument("conic program: " + where + " has a non-finite coefficient");
        }
        if (!std::isfinite(e.constant))
            throw std::invalid_argument("conic program: " + where + " has a non-finite constant");
    };
    check_expr(objective_, "objective");
    for (const auto &b : blocks_)
    {
        const std::string where = b.label.empty() ? std::string("constraint") : b.label;
        switch (b.kind)
        {
        case ConeKind::zero:
        case ConeKind::nonnegative:
            if (b.rows.size() != 1)
                throw std::invalid_argument("conic program: " + where + " must have one row");
            break;
        case ConeKind::second_order:
            if (b.rows.size() < 2)
                throw std::invalid_argument("conic program: " + where + " needs a head and a tail");
            break;
        case ConeKind::rotated:
            if (b.rows.size() < 3)
                throw std::invalid_argument("conic program: " + where + " needs two heads and a tail");
            break;
        case ConeKind::exponential:
            if (b.rows.size() != 3)
                throw std::invalid_argument("conic program: " + where + " must have three rows");
            break;
        }
        for (const auto &r : b.rows)
            check_expr(r, where);
    }
}

namespace
{

double block_violation(ConeKind kind, const Eigen::VectorXd &v)
{
    switch (kind)
    {
    case ConeKind::zero: return std::abs(v[0]);
    case ConeKind::nonnegative: return std::max(0.0, -v[0]);
    case ConeKind::second_order: return std::max(0.0, v.tail(v.size() - 1).norm() - v[0]);
    case ConeKind::rotated:
    {
        const double u = v[0], w = v[1];
        if (u >= 0.0 && w >= 0.0)
            return std::max(0.0, v.tail(v.size() - 2).norm() - std::sqrt(2.0 * u * w));
        return std::max(0.0, -u) + std::max(0.0, -w) + v.tail(v.size() - 2).norm();
    }
    case ConeKind::exponential:
    {
        const double x = v[0], y = v[1], z = v[2];
        if (y > 0.0 && z > 0.0)
            return std::max(0.0, x - y * std::log(z / y));
        return std::max(0.0, -y) + std::max(0.0, -z) + std::max(0.0, x);
    }
    }
    return 0.0;
}

} // namespace

double ConicProgram::max_violation(const Eigen::VectorXd &x) const
{
    double worst = 0.0;
    for (const auto &b : blocks_)
    {
        Eigen::VectorXd v(static_cast<Eigen::Index>(b.rows.size()));
        for (std::size_t r = 0; r < b.rows.size(); ++r)
            v[static_cast<Eigen::Index>(r)] = b.rows[r].eval(x);
        worst = std::max(worst, block_violation(b.kind, v));
    }
    return worst;
}

void ConicProgram::write_cbf(std::ostream &out) const
{
    const auto prec = out.precision(17);
    out << "VER\n3\n\nOBJSENSE\nMAX\n\nVAR\n" << num_variables() << " 1\nF " << num_variables() << "\n\n";

    // CBF orders the exponential cone as (z, y, x): z >= y exp(x / y).
    std::vector<const AffineExpr *> rows;
    std::vector<std::pair<std::string, std::size_t>> cones;
    for (const auto &b : blocks_)
    {
        switch (b.kind)
        {
        case ConeKind::zero: cones.emplace_back("L=", 1); rows.push_back(&b.rows[0]); break;
        case ConeKind::nonnegative: cones.emplace_back("L+", 1); rows.push_back(&b.rows[0]); break;
        case ConeKind::second_order:
            cones.emplace_back("Q", b.rows.size());
            for (const auto &r : b.rows)
                rows.push_back(&r);
            break;
        case ConeKind::rotated:
            cones.emplace_back("QR", b.rows.size());
            for (const auto &r : b.rows)
                rows.push_back(&r);
            break;
        case ConeKind::exponential:
            cones.emplace_back("EXP", 3);
            rows.push_back(&b.rows[2]);
            rows.push_back(&b.rows[1]);
            rows.push_back(&b.rows[0]);
            break;
        }
    }
    out << "CON\n" << rows.size() << " " << cones.size() << "\n";
    for (const auto &[k, n] : cones)
        out << k << " " << n << "\n";

    // Merge duplicate (row, var) entries so the file has one coefficient per coordinate.
    std::map<int, double> obj;
    for (const auto &[i, c] : objective_.terms)
        obj[i] += c;
    out << "\nOBJACOORD\n" << obj.size() << "\n";
    for (const auto &[i, c] : obj)
        out << i << " " << c << "\n";
    out << "\nOBJBCOORD\n" << objective_.constant << "\n";

    std::map<std::pair<std::size_t, int>, double> a;
    std::vector<std::pair<std::size_t, double>> bvals;
    for (std::size_t r = 0; r < rows.size(); ++r)
    {
        for (const auto &[i, c] : rows[r]->terms)
            a[{r, i}] += c;
        if (rows[r]->constant != 0.0)
            bvals.emplace_back(r, rows[r]->constant);
    }
    out << "\nACOORD\n" << a.size() << "\n";
    for (const auto &[key, c] : a)
        out << key.first << " " << key.second << " " << c << "\n";
    out << "\nBCOORD\n" << bvals.size() << "\n";
    for (const auto &[r, c] : bvals)
        out << r << " " << c << "\n";
    out.precision(prec);
}

const char *to_string(SolveStatus s)
{
    switch (s)
    {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "?";
}
// ---------------------------------------------------------------------------
// Barrier method
// ---------------------------------------------------------------------------

namespace
{

/// Cone block in reduced coordinates: value(w) = A w[cols] + b.
struct DenseBlock
{
    ConeKind kind;
    std::vector<Eigen::Index> cols;
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

struct BarrierProblem
{
    std::vector<DenseBlock> blocks;
    Eigen::VectorXd cost; // minimized
    double nu = 0.0;
};

Eigen::VectorXd block_value(const DenseBlock &blk, const Eigen::VectorXd &w)
{
    Eigen::VectorXd v = blk.b;
    for (std::size_t j = 0; j < blk.cols.size(); ++j)
        v += blk.A.col(static_cast<Eigen::Index>(j)) * w[blk.cols[j]];
    return v;
}

/// Barrier value, gradient and Hessian in the block's own coordinates.
/// Returns false outside the cone interior.
bool block_barrier(ConeKind kind, const Eigen::VectorXd &v, double &phi, Eigen::VectorXd *grad,
                   Eigen::MatrixXd *hess)
{
    switch (kind)
    {
    case ConeKind::zero: return true;
    case ConeKind::nonnegative:
    {
        if (!(v[0] > 0.0))
            return false;
        phi = -std::log(v[0]);
        if (grad)
        {
            (*grad)(0) = -1.0 / v[0];
            (*hess)(0, 0) = 1.0 / (v[0] * v[0]);
        }
        return true;
    }
    case ConeKind::second_order:
    {
        const double t = v[0];
        const Eigen::Index m = v.size();
        // Factor out the largest tail entry: t^2 - y_j^2 = (t - |y_j|)(t + |y_j|)
        // keeps precision when a rotated cone is written in this form.
        Eigen::Index j = 0;
        const double yj = v.tail(m - 1).cwiseAbs().maxCoeff(&j);
        double rest = 0.0;
        for (Eigen::Index i = 1; i < m; ++i)
            if (i != j + 1)
                rest += v[i] * v[i];
        const double psi = (t - yj) * (t + yj) - rest;
        if (!(t > 0.0) || !(psi > 0.0))
            return false;
        phi = -std::log(psi);
        if (grad)
        {
            Eigen::VectorXd dpsi(m);
            dpsi[0] = 2.0 * t;
            dpsi.tail(m - 1) = -2.0 * v.tail(m - 1);
            *grad = -dpsi / psi;
            *hess = dpsi * dpsi.transpose() / (psi * psi);
            hess->diagonal().array() += 2.0 / psi;
            (*hess)(0, 0) -= 4.0 / psi;
        }
        return true;
    }
    case ConeKind::rotated:
    {
        const double u = v[0], r = v[1];
        const Eigen::Index m = v.size();
        const double psi = 2.0 * u * r - v.tail(m - 2).squaredNorm();
        if (!(u > 0.0) || !(r > 0.0) || !(psi > 0.0))
            return false;
        phi = -std::log(psi);
        if (grad)
        {
            Eigen::VectorXd dpsi(m);
            dpsi[0] = 2.0 * r;
            dpsi[1] = 2.0 * u;
            dpsi.tail(m - 2) = -2.0 * v.tail(m - 2);
            *grad = -dpsi / psi;
            *hess = dpsi * dpsi.transpose() / (psi * psi);
            hess->diagonal().tail(m - 2).array() += 2.0 / psi;
            (*hess)(0, 1) -= 2.0 / psi;
            (*hess)(1, 0) -= 2.0 / psi;
        }
        return true;
    }
    case ConeKind::exponential:
    {
        const double x = v[0], y = v[1], z = v[2];
        if (!(y > 0.0) || !(z > 0.0))
            return false;
        const double lzy = std::log(z / y);
        const double q = y * lzy - x;
        if (!(q > 0.0))
            return false;
        phi = -std::log(q) - std::log(y) - std::log(z);
        if (grad)
        {
            const Eigen::Vector3d dq(-1.0, lzy - 1.0, y / z);
            Eigen::Matrix3d d2q = Eigen::Matrix3d::Zero();
            d2q(1, 1) = -1.0 / y;
            d2q(1, 2) = d2q(2, 1) = 1.0 / z;
            d2q(2, 2) = -y / (z * z);
            Eigen::Vector3d g = -dq / q;
            g[1] -= 1.0 / y;
            g[2] -= 1.0 / z;
            *grad = g;
            Eigen::Matrix3d h = dq * dq.transpose() / (q * q) - d2q / q;
            h(1, 1) += 1.0 / (y * y);
            h(2, 2) += 1.0 / (z * z);
            *hess = h;
        }
        return true;
    }
    }
    return false;
}

bool evaluate(const BarrierProblem &p, const Eigen::VectorXd &w, double t, double &f, Eigen::VectorXd *g,
              Eigen::MatrixXd *H)
{
    f = t * p.cost.dot(w);
    if (g)
    {
        *g = t * p.cost;
        H->setZero(w.size(), w.size());
    }
    Eigen::VectorXd gv;
    Eigen::MatrixXd hv;
    for (const auto &blk : p.blocks)
    {
        const Eigen::VectorXd v = block_value(blk, w);
        double phi = 0.0;
        if (g)
        {
            gv.resize(v.size());
            hv.resize(v.size(), v.size());
        }
        if (!block_barrier(blk.kind, v, phi, g ? &gv : nullptr, g ? &hv : nullptr))
            return false;
        f += phi;
        if (g)
        {
            const Eigen::VectorXd gc = blk.A.transpose() * gv;
            const Eigen::MatrixXd hc = blk.A.transpose() * hv * blk.A;
            const auto nc = blk.cols.size();
            for (std::size_t a = 0; a < nc; ++a)
            {
                (*g)[blk.cols[a]] += gc[static_cast<Eigen::Index>(a)];
                for (std::size_t c = 0; c < nc; ++c)
                    (*H)(blk.cols[a], blk.cols[c]) += hc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(c));
            }
        }
    }
    return std::isfinite(f);
}

bool in_domain(const BarrierProblem &p, const Eigen::VectorXd &w)
{
    double f = 0.0;
    return evaluate(p, w, 0.0, f, nullptr, nullptr);
}

enum class CenterResult
{
    converged,
    stalled,
    diverging,
    early_exit
};

/// Damped Newton on t * cost'w + phi(w). `stop` is polled after each step.
template <class Stop>
CenterResult center(const BarrierProblem &p, Eigen::VectorXd &w, double t, const SolverSettings &s, int &steps,
                    Stop &&stop)
{
    const Eigen::Index n = w.size();
    Eigen::VectorXd g(n);
    Eigen::MatrixXd H(n, n);
    double best_lambda2 = std::numeric_limits<double>::infinity();
    int since_best = 0;
    for (int it = 0; it < s.max_newton_steps; ++it)
    {
        double f = 0.0;
        if (!evaluate(p, w, t, f, &g, &H))
            return CenterResult::stalled;

        // Jacobi-scaled Newton system.
        Eigen::VectorXd d_scale(n);
        for (Eigen::Index i = 0; i < n; ++i)
            d_scale[i] = 1.0 / std::sqrt(std::max(H(i, i), 1e-300));
        Eigen::MatrixXd Hs = d_scale.asDiagonal() * H * d_scale.asDiagonal();
        const Eigen::VectorXd gs = d_scale.cwiseProduct(g);
        Eigen::LLT<Eigen::MatrixXd> llt(Hs);
        Eigen::VectorXd ds;
        if (llt.info() == Eigen::Success)
            ds = llt.solve(-gs);
        if (llt.info() != Eigen::Success || !ds.allFinite() || gs.dot(ds) >= 0.0)
        {
            Hs.diagonal().array() += 1e-10;
            ds = Hs.ldlt().solve(-gs);
            if (!ds.allFinite())
                return CenterResult::stalled;
        }
        const Eigen::VectorXd d = d_scale.cwiseProduct(ds);
        const double lambda2 = -g.dot(d);
        if (!(lambda2 > 0.0) || lambda2 < 1e-10)
            return CenterResult::converged;
        // Newton decrement stuck at the rounding floor.
        if (lambda2 < best_lambda2)
        {
            best_lambda2 = lambda2;
            since_best = 0;
        }
        else if (++since_best > 20)
            return CenterResult::stalled;

        // Inside the Dikin ellipsoid a full step is safe and decreasing.
        const bool full = lambda2 < 0.0625;
        double a = full ? 1.0 : 1.0 / (1.0 + std::sqrt(lambda2));
        Eigen::VectorXd trial = w + a * d;
        while (!in_domain(p, trial))
        {
            a *= 0.5;
            if (a < 1e-16)
                return CenterResult::stalled;
            trial = w + a * d;
        }
        if (!full)
        {
            double ft = 0.0;
            evaluate(p, trial, t, ft, nullptr, nullptr);
            while (ft > f - 0.01 * a * lambda2 && a > 1e-8)
            {
                a *= 0.5;
                trial = w + a * d;
                evaluate(p, trial, t, ft, nullptr, nullptr);
            }
            if (a <= 1e-8 || !(ft < f))
                return CenterResult::stalled;
        }
        w = trial;
        ++steps;
        if (stop(w))
            return CenterResult::early_exit;
        if (std::abs(p.cost.dot(w)) > s.unbounded_threshold)
            return CenterResult::diverging;
        if (lambda2 < 1e-12)
            return CenterResult::converged;
    }
    return CenterResult::stalled;
}

/// Weight for which `w` is closest to the central path in the local norm,
/// so a warm start near the optimum does not get pulled back to the center.
double initial_barrier_weight(const BarrierProblem &p, const Eigen::VectorXd &w)
{
    const Eigen::Index n = w.size();
    Eigen::VectorXd g(n);
    Eigen::MatrixXd H(n, n);
    double f = 0.0;
    if (!evaluate(p, w, 0.0, f, &g, &H))
        return 1.0;
    H.diagonal().array() += 1e-12 * H.diagonal().cwiseAbs().maxCoeff();
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    const Eigen::VectorXd hc = ldlt.solve(p.cost);
    const double denom = p.cost.dot(hc);
    const double t = -g.dot(hc) / denom;
    if (!std::isfinite(t) || !(denom > 0.0))
        return 1.0;
    return std::clamp(t, 1.0, 1e6);
}

/// Wide box around the start point. It keeps barrier sublevel sets bounded
/// when the feasible set has recession directions; a solution pressed
/// against it signals an unbounded objective.
constexpr double box_relative_width = 1e6;

void add_box(BarrierProblem &p, const Eigen::VectorXd &center)
{
    for (Eigen::Index i = 0; i < center.size(); ++i)
    {
        const double half = box_relative_width * (1.0 + std::abs(center[i]));
        for (const double sign : {1.0, -1.0})
        {
            DenseBlock d{ConeKind::nonnegative, {i}, Eigen::MatrixXd::Constant(1, 1, -sign), Eigen::VectorXd(1)};
            d.b[0] = half + sign * center[i];
            p.blocks.push_back(std::move(d));
        }
    }
    p.nu += 2.0 * static_cast<double>(center.size());
}

bool box_active(const Eigen::VectorXd &center, const Eigen::VectorXd &w)
{
    for (Eigen::Index i = 0; i < center.size(); ++i)
    {
        const double half = box_relative_width * (1.0 + std::abs(center[i]));
        if (half - std::abs(w[i] - center[i]) < 1e-3 * half)
            return true;
    }
    return false;
}

} // namespace

Solution solve(const ConicProgram &program, const SolverSettings &settings, const std::optional<Eigen::VectorXd> &start)
{
    program.check();
    const int n = program.num_variables();
    Solution sol;
    sol.x = Eigen::VectorXd::Zero(n);

    // Eliminate equalities: x = x_p + F w.
    std::vector<const ConeBlock *> eqs;
    for (const auto &b : program.blocks())
        if (b.kind == ConeKind::zero)
            eqs.push_back(&b);
    Eigen::VectorXd x_p = Eigen::VectorXd::Zero(n);
    std::optional<Eigen::MatrixXd> F;
    if (!eqs.empty())
    {
        const auto m = static_cast<Eigen::Index>(eqs.size());
        Eigen::MatrixXd Aeq = Eigen::MatrixXd::Zero(m, n);
        Eigen::VectorXd beq(m);
        for (Eigen::Index r = 0; r < m; ++r)
        {
            for (const auto &[i, c] : eqs[static_cast<std::size_t>(r)]->rows[0].terms)
                Aeq(r, i) += c;
            beq[r] = -eqs[static_cast<std::size_t>(r)]->rows[0].constant;
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Aeq, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-12);
        x_p = svd.solve(beq);
        if ((Aeq * x_p - beq).norm() > settings.feasibility_tolerance * std::max(1.0, beq.norm()))
        {
            sol.status = SolveStatus::infeasible;
            return sol;
        }
        F = svd.matrixV().rightCols(n - svd.rank());
    }
    const Eigen::Index nw = F ? F->cols() : n;

    BarrierProblem p2;
    p2.nu = program.barrier_parameter();
    Eigen::VectorXd c_x = Eigen::VectorXd::Zero(n);
    for (const auto &[i, c] : program.objective().terms)
        c_x[i] += c;
    p2.cost = F ? Eigen::VectorXd(-(F->transpose() * c_x)) : Eigen::VectorXd(-c_x);
    for (const auto &b : program.blocks())
    {
        if (b.kind == ConeKind::zero)
            continue;
        const auto rows = static_cast<Eigen::Index>(b.rows.size());
        DenseBlock d{b.kind, {}, {}, Eigen::VectorXd(rows)};
        if (F)
        {
            Eigen::MatrixXd Ax = Eigen::MatrixXd::Zero(rows, n);
            for (Eigen::Index r = 0; r < rows; ++r)
            {
                for (const auto &[i, c] : b.rows[static_cast<std::size_t>(r)].terms)
                    Ax(r, i) += c;
                d.b[r] = b.rows[static_cast<std::size_t>(r)].constant;
            }
            d.b += Ax * x_p;
            d.A = Ax * *F;
            for (Eigen::Index j = 0; j < nw; ++j)
                d.cols.push_back(j);
        }
        else
        {
            std::vector<Eigen::Index> cols;
            for (const auto &r : b.rows)
                for (const auto &[i, c] : r.terms)
                    cols.push_back(i);
            std::sort(cols.begin(), cols.end());
            cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
            d.A = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(cols.size()));
            for (Eigen::Index r = 0; r < rows; ++r)
            {
                for (const auto &[i, c] : b.rows[static_cast<std::size_t>(r)].terms)
                {
                    const auto pos = std::lower_bound(cols.begin(), cols.end(), static_cast<Eigen::Index>(i));
                    d.A(r, pos - cols.begin()) += c;
                }
                d.b[r] = b.rows[static_cast<std::size_t>(r)].constant;
            }
            d.cols = std::move(cols);
        }
        p2.blocks.push_back(std::move(d));
    }

    Eigen::VectorXd w = Eigen::VectorXd::Zero(nw);
    if (start)
    {
        if (start->size() != n)
            throw std::invalid_argument("solve: start point has wrong dimension");
        w = F ? Eigen::VectorXd(F->transpose() * (*start - x_p)) : *start;
    }
    const Eigen::VectorXd box_center = w;
    const std::size_t n_cone_blocks = p2.blocks.size();
    add_box(p2, box_center);

    const auto to_x = [&](const Eigen::VectorXd &wv) -> Eigen::VectorXd {
        return F ? Eigen::VectorXd(x_p + *F * wv) : wv;
    };

    // Phase I: minimize s with every cone block shifted by s along an
    // interior direction of its cone; stop as soon as s < 0.
    if (!in_domain(p2, w))
    {
        BarrierProblem p1;
        for (std::size_t k = 0; k < p2.blocks.size(); ++k)
        {
            const DenseBlock &blk = p2.blocks[k];
            DenseBlock d = blk;
            Eigen::VectorXd e = Eigen::VectorXd::Zero(blk.A.rows());
            if (k < n_cone_blocks) // box rows stay unshifted
            {
                switch (blk.kind)
                {
                case ConeKind::nonnegative:
                case ConeKind::second_order: e[0] = 1.0; break;
                case ConeKind::rotated: e[0] = e[1] = 1.0; break;
                case ConeKind::exponential: e << -1.0, 1.0, 1.0; break;
                case ConeKind::zero: break;
                }
            }
            d.cols.push_back(nw);
            d.A.conservativeResize(Eigen::NoChange, d.A.cols() + 1);
            d.A.col(d.A.cols() - 1) = e;
            p1.blocks.push_back(std::move(d));
        }
        p1.cost = Eigen::VectorXd::Zero(nw + 1);
        p1.cost[nw] = 1.0;
        p1.nu = p2.nu;

        Eigen::VectorXd ws(nw + 1);
        ws.head(nw) = w;
        ws[nw] = 1.0;
        while (!in_domain(p1, ws))
        {
            ws[nw] *= 2.0;
            if (ws[nw] > 1e30)
            {
                sol.status = SolveStatus::numerical_failure;
                return sol;
            }
        }
        ws[nw] *= 2.0;

        auto stop = [&](const Eigen::VectorXd &v) { return v[nw] < 0.0 && in_domain(p2, v.head(nw)); };
        double t = 1.0;
        bool found = false;
        bool certified = false;
        for (int outer = 0; outer < settings.max_outer_iterations; ++outer)
        {
            const auto r = center(p1, ws, t, settings, sol.newton_steps, stop);
            if (r == CenterResult::early_exit || stop(ws))
            {
                found = true;
                break;
            }
            // s - nu / t lower-bounds the phase-I optimum.
            if (r == CenterResult::converged && ws[nw] - p1.nu / t > 0.0)
            {
                certified = true;
                break;
            }
            if (p1.nu / t < settings.gap_tolerance * 1e-3)
            {
                certified = ws[nw] > 0.0;
                break;
            }
            t *= settings.barrier_growth;
        }
        if (!found)
        {
            sol.x = to_x(ws.head(nw));
            sol.max_violation = program.max_violation(sol.x);
            sol.status = certified ? SolveStatus::infeasible : SolveStatus::numerical_failure;
            return sol;
        }
        w = ws.head(nw);
    }

    // Phase II.
    auto never = [](const Eigen::VectorXd &) { return false; };
    const auto rel_gap = [&](double gap, const Eigen::VectorXd &wv) { return gap / (1.0 + std::abs(p2.cost.dot(wv))); };
    double t = initial_barrier_weight(p2, w);
    SolveStatus status = SolveStatus::numerical_failure;
    for (int outer = 0; outer < settings.max_outer_iterations; ++outer)
    {
        const Eigen::VectorXd w_prev = w;
        const auto r = center(p2, w, t, settings, sol.newton_steps, never);
        if (r == CenterResult::diverging)
        {
            status = SolveStatus::unbounded;
            break;
        }
        if (r == CenterResult::stalled)
        {
            // Fall back to the last completed center if it is accurate enough.
            const double prev_gap = p2.nu * settings.barrier_growth / t;
            if (outer > 0 && rel_gap(prev_gap, w_prev) < settings.stall_gap_tolerance)
            {
                w = w_prev;
                sol.gap_bound = prev_gap;
                status = box_active(box_center, w) ? SolveStatus::unbounded : SolveStatus::optimal;
            }
            break;
        }
        const double gap = p2.nu / t;
        sol.gap_bound = gap;
        if (rel_gap(gap, w) < settings.gap_tolerance)
        {
            status = box_active(box_center, w) ? SolveStatus::unbounded : SolveStatus::optimal;
            break;
        }
        t *= settings.barrier_growth;
    }
    sol.x = to_x(w);
    sol.objective = program.objective().eval(sol.x);
    sol.max_violation = program.max_violation(sol.x);
    if (status == SolveStatus::optimal && sol.max_violation > settings.feasibility_tolerance)
        status = SolveStatus::numerical_failure;
    sol.status = status;
    return sol;
}

} // namespace pinch::conic
