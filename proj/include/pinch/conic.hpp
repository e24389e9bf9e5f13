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

#include <Eigen/Dense>

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pinch::conic
{

/// Sparse affine form sum_i coef_i * x[var_i] + constant.
struct AffineExpr
{
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    AffineExpr() = default;
    AffineExpr(double c) : constant(c) {}

    static AffineExpr var(int index, double coef = 1.0)
    {
        AffineExpr e;
        e.terms.emplace_back(index, coef);
        return e;
    }

    AffineExpr &add(int index, double coef)
    {
        terms.emplace_back(index, coef);
        return *this;
    }

    double eval(const Eigen::VectorXd &x) const;
};

AffineExpr operator+(AffineExpr a, const AffineExpr &b);
AffineExpr operator-(AffineExpr a, const AffineExpr &b);
AffineExpr operator*(double s, AffineExpr a);

enum class ConeKind
{
    zero,        ///< rows == 0
    nonnegative, ///< row >= 0
    second_order,///< rows [t; y]: |y|_2 <= t
    rotated,     ///< rows [u; v; y]: |y|_2^2 <= 2 u v, u, v >= 0
    exponential  ///< rows [x; y; z]: y > 0, y * exp(x / y) <= z
};

struct ConeBlock
{
    ConeKind kind;
    std::vector<AffineExpr> rows;
    std::string label;
};

/// A conic program in "maximize c'x s.t. A_i x + b_i in K_i" form over
/// named continuous variables.
class ConicProgram
{
public:
    int add_variable(std::string name);
    int num_variables() const noexcept { return static_cast<int>(names_.size()); }
    const std::vector<std::string> &names() const noexcept { return names_; }
    /// -1 when absent.
    int index_of(const std::string &name) const;

    void add_equality(AffineExpr lhs, std::string label = {});
    void add_nonnegative(AffineExpr expr, std::string label = {});
    void add_second_order(AffineExpr head, std::vector<AffineExpr> tail, std::string label = {});
    void add_rotated(AffineExpr u, AffineExpr v, std::vector<AffineExpr> tail, std::string label = {});
    void add_exponential(AffineExpr x, AffineExpr y, AffineExpr z, std::string label = {});
    void set_objective(AffineExpr objective) { objective_ = std::move(objective); }
    /// Copy with every block of the given kind removed.
    ConicProgram without(ConeKind kind) const;

    const std::vector<ConeBlock> &blocks() const noexcept { return blocks_; }
    const AffineExpr &objective() const noexcept { return objective_; }

    std::size_t count(ConeKind kind) const;
    /// Total barrier complexity parameter (1 per linear row, 2 per SOC, 3 per exp cone).
    double barrier_parameter() const;

    /// Throws std::invalid_argument if any row references an undeclared
    /// variable or a cone has the wrong dimension.
    void check() const;

    /// Largest violation of any cone membership at x (0 when feasible).
    double max_violation(const Eigen::VectorXd &x) const;

    /// Conic Benchmark Format (CBF v3) dump for cross-solver checks.
    void write_cbf(std::ostream &out) const;

private:
    std::vector<std::string> names_;
    std::vector<ConeBlock> blocks_;
    AffineExpr objective_;
};

enum class SolveStatus
{
    optimal,
    infeasible,
    unbounded,
    numerical_failure
};

const char *to_string(SolveStatus s);

struct SolverSettings
{
    /// Stop once the duality-gap bound falls below gap_tolerance * (1 + |objective|).
    double gap_tolerance = 1e-9;
    /// Centering may stall near the boundary in double precision; a point whose
    /// gap bound already meets this looser tolerance is then accepted.
    double stall_gap_tolerance = 1e-7;
    double feasibility_tolerance = 1e-9;
    double barrier_growth = 16.0;
    int max_newton_steps = 400;       ///< per centering
    int max_outer_iterations = 80;
    double unbounded_threshold = 1e12;
};

struct Solution
{
    SolveStatus status = SolveStatus::numerical_failure;
    Eigen::VectorXd x;
    double objective = 0.0;
    double gap_bound = 0.0;
    double max_violation = 0.0;
    int newton_steps = 0;
};

/// Log-barrier interior-point method with a phase-I feasibility search.
/// `start` need not be feasible; when it is strictly feasible phase I is skipped.
Solution solve(const ConicProgram &program, const SolverSettings &settings = {},
               const std::optional<Eigen::VectorXd> &start = std::nullopt);

} // namespace pinch::conic
