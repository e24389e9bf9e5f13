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

#include "pinch/conic.hpp"

#include <cmath>
#include <sstream>

using namespace pinch::conic;
using doctest::Approx;

TEST_CASE("linear program")
{
    ConicProgram p;
    const int x = p.add_variable("x");
    p.add_nonnegative(AffineExpr(1.0).add(x, -1.0), "x <= 1");
    p.set_objective(AffineExpr::var(x));
    const Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.x[x] == Approx(1.0).epsilon(1e-7));
    CHECK(s.objective == Approx(1.0).epsilon(1e-7));
    CHECK(s.max_violation <= 1e-9);
    CHECK(p.index_of("x") == x);
    CHECK(p.index_of("y") == -1);
}

TEST_CASE("equalities and a second-order cone")
{
    ConicProgram p;
    const int x = p.add_variable("x");
    const int y = p.add_variable("y");
    const int t = p.add_variable("t");
    p.add_equality(AffineExpr::var(t) - AffineExpr(2.0));
    p.add_second_order(AffineExpr::var(t), {AffineExpr::var(x), AffineExpr::var(y)});
    p.set_objective(AffineExpr::var(x) + AffineExpr::var(y));
    const Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == Approx(2.0 * std::sqrt(2.0)).epsilon(1e-7));
    CHECK(s.x[x] == Approx(std::sqrt(2.0)).epsilon(1e-6));
    CHECK(p.barrier_parameter() == Approx(2.0));
}

TEST_CASE("rotated cone")
{
    // max y with 2uv >= y^2, u <= 2, v <= 4 gives y = 4
    ConicProgram p;
    const int u = p.add_variable("u");
    const int v = p.add_variable("v");
    const int y = p.add_variable("y");
    p.add_rotated(AffineExpr::var(u), AffineExpr::var(v), {AffineExpr::var(y)});
    p.add_nonnegative(AffineExpr(2.0).add(u, -1.0));
    p.add_nonnegative(AffineExpr(4.0).add(v, -1.0));
    p.set_objective(AffineExpr::var(y));
    const Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == Approx(4.0).epsilon(1e-7));
}

TEST_CASE("exponential cone")
{
    // max x with exp(x) <= z, z <= 5 gives x = ln 5
    ConicProgram p;
    const int x = p.add_variable("x");
    const int z = p.add_variable("z");
    p.add_exponential(AffineExpr::var(x), AffineExpr(1.0), AffineExpr::var(z));
    p.add_nonnegative(AffineExpr(5.0).add(z, -1.0));
    p.set_objective(AffineExpr::var(x));
    const Solution s = solve(p);
    REQUIRE(s.status == SolveStatus::optimal);
    CHECK(s.objective == Approx(std::log(5.0)).epsilon(1e-7));
    CHECK(p.count(ConeKind::exponential) == 1);

    SUBCASE("log2(1 + a) >= g as used by the rate epigraph")
    {
        ConicProgram q;
        const int a = q.add_variable("a");
        const int g = q.add_variable("g");
        q.add_exponential(AffineExpr::var(g, std::log(2.0)), AffineExpr(1.0), AffineExpr(1.0).add(a, 1.0));
        q.add_nonnegative(AffineExpr(3.0).add(a, -1.0));
        q.set_objective(AffineExpr::var(g));
        const Solution r = solve(q);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.objective == Approx(2.0).epsilon(1e-7));
    }
    SUBCASE("dropping the cone leaves the objective unbounded")
    {
        CHECK(solve(p.without(ConeKind::exponential)).status == SolveStatus::unbounded);
    }
}

TEST_CASE("infeasible and unbounded programs")
{
    ConicProgram p;
    const int x = p.add_variable("x");
    p.add_nonnegative(AffineExpr::var(x) - AffineExpr(2.0));
    p.add_nonnegative(AffineExpr(1.0).add(x, -1.0));
    p.set_objective(AffineExpr::var(x));
    CHECK(solve(p).status == SolveStatus::infeasible);

    ConicProgram q;
    const int y = q.add_variable("y");
    q.add_nonnegative(AffineExpr::var(y));
    q.set_objective(AffineExpr::var(y));
    CHECK(solve(q).status == SolveStatus::unbounded);

    ConicProgram e;
    const int a = e.add_variable("a");
    e.add_equality(AffineExpr::var(a) - AffineExpr(1.0));
    e.add_equality(AffineExpr::var(a) - AffineExpr(2.0));
    e.set_objective(AffineExpr::var(a));
    CHECK(solve(e).status == SolveStatus::infeasible);
}

TEST_CASE("structure checks and export")
{
    ConicProgram p;
    const int x = p.add_variable("x");
    p.add_nonnegative(AffineExpr::var(x + 3));
    CHECK_THROWS_AS(p.check(), std::invalid_argument);

    ConicProgram q;
    const int a = q.add_variable("a");
    const int b = q.add_variable("b");
    q.add_nonnegative(AffineExpr(1.0).add(a, -1.0));
    q.add_second_order(AffineExpr::var(b), {AffineExpr::var(a)});
    q.add_rotated(AffineExpr::var(a), AffineExpr(4.0), {AffineExpr::var(b)});
    q.add_exponential(AffineExpr::var(a), AffineExpr(1.0), AffineExpr::var(b));
    q.set_objective(AffineExpr::var(a) + AffineExpr::var(b, 2.0));
    CHECK_NOTHROW(q.check());
    CHECK(q.barrier_parameter() == Approx(1.0 + 2.0 + 2.0 + 3.0));

    Eigen::VectorXd pt(2);
    pt << 2.0, 1.0; // violates a <= 1 by 1 and |a| <= b by 1
    CHECK(q.max_violation(pt) >= 1.0 - 1e-12);
    pt << 0.5, 1.8; // inside all four blocks
    CHECK(q.max_violation(pt) == Approx(0.0));

    std::ostringstream cbf;
    q.write_cbf(cbf);
    const std::string s = cbf.str();
    CHECK(s.rfind("VER\n3\n", 0) == 0);
    CHECK(s.find("OBJSENSE\nMAX") != std::string::npos);
    CHECK(s.find("L+ 1") != std::string::npos);
    CHECK(s.find("Q 2") != std::string::npos);
    CHECK(s.find("QR 3") != std::string::npos);
    CHECK(s.find("EXP 3") != std::string::npos);
    CHECK(s.find("CON\n9 4") != std::string::npos);
}
