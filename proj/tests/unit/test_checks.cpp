/*
* Copyright (C) 2026 The matrosov Authors
*
* Licensed under the Apache License, Version 2.0 (the "License");
* you may not use this file except in compliance with the License.
* You may obtain a copy of the License at
*
*     http://www.apache.org/licenses/LICENSE-2.0
*
* Unless required by applicable law or agreed to in writing, software
* distributed under the License is distributed on an "AS IS" BASIS,
* WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
* See the License for the specific language governing permissions and
* limitations under the License.
*/
#include "matrosov/checks.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

using namespace matrosov;
using Catch::Approx;

namespace
{

Vector vec(std::initializer_list<double> v)
{
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) {
        x(i++) = a;
    }
    return x;
}

VectorField identity()
{
    return [](double, const Vector& x) {
        return x;
    };
}

/// x' = -x on R^2 with V_1 = |x|^2 / 2 and Y_1 = -|x|^2
AuxiliaryFamily contraction()
{
    AuxiliaryFamily f;
    f.label    = "contraction";
    f.j        = 1;
    f.m        = 0;
    f.stateDim = 2;
    f.Delta    = 2.0;
    f.mu       = 1.0;
    f.plant.dim = 2;
    f.plant.rhs = [](double, const Vector& x, Vector& dx) {
        dx = -x;
    };
    f.toFamily = identity();
    f.toPlant  = identity();
    f.phi      = [](double, const Vector&) {
        return Vector(0);
    };
    f.V.push_back([](double, const Vector& X) {
        return 0.5 * X.squaredNorm();
    });
    f.Y.push_back([](const Vector& X, const Vector&) {
        return -X.squaredNorm();
    });
    return f;
}

/// Y_1 = -z_2^2, Y_2 = -z_1^2 + 10 |z_2| on the unit ball
AuxiliaryFamily toy2()
{
    auto f  = contraction();
    f.label = "toy2";
    f.j     = 2;
    f.Delta = 1.0;
    f.V.push_back([](double, const Vector&) {
        return 0.0;
    });
    f.Y = {[](const Vector& X, const Vector&) {
               return -X(1) * X(1);
           },
           [](const Vector& X, const Vector&) {
               return -X(0) * X(0) + 10.0 * std::abs(X(1));
           }};
    return f;
}

std::vector<SamplePair> grid(int n, double r)
{
    std::vector<SamplePair> out;
    for (int a = -n; a <= n; ++a) {
        for (int b = -n; b <= n; ++b) {
            const Vector X = vec({r * a / n, r * b / n});
            if (X.norm() <= r) {
                out.push_back({X, Vector(0)});
            }
        }
    }
    // points on the axes at every scale
    for (int e = 1; e <= 8; ++e) {
        const double s = r * std::pow(10.0, -e);
        out.push_back({vec({0.5 * r, s}), Vector(0)});
        out.push_back({vec({s, 0.0}), Vector(0)});
    }
    return out;
}

const std::vector<double> etas{1e-1, 1e-2, 1e-3};

} // namespace

TEST_CASE("violations csv header", "[checks]")
{
    std::ostringstream out;
    write_violations_csv({{"uga", 2, 1.5, 0.25}}, out);
    CHECK(out.str() == "stage,index,t,margin\nuga,2,1.5,0.25\n");
}

TEST_CASE("exact bounds have no violations, corrupted ones are caught", "[checks][bounds]")
{
    auto f = contraction();
    DerivativeBoundOptions o;
    o.trajectories = 5;
    o.horizon      = 3.0;
    const auto ok  = check_derivative_bounds(f, o);
    CHECK(ok.pass);
    CHECK(ok.violations.empty());
    CHECK(ok.checkedPoints > 0);

    f.Y[0] = [](const Vector& X, const Vector&) {
        return -X.squaredNorm() - 1.0;
    };
    const auto bad = check_derivative_bounds(f, o);
    CHECK_FALSE(bad.pass);
    REQUIRE_FALSE(bad.violations.empty());
    CHECK(bad.violations.front().stage == "derivative-bounds");
    CHECK(bad.violations.front().index == 1);
    CHECK(bad.violations.front().margin == Approx(1.0).margin(0.05));
}

TEST_CASE("constant V with Y = 0 has no violations", "[checks][bounds]")
{
    auto f = contraction();
    f.V[0] = [](double, const Vector&) {
        return 3.0;
    };
    f.Y[0] = [](const Vector&, const Vector&) {
        return 0.0;
    };
    DerivativeBoundOptions o;
    o.trajectories = 3;
    CHECK(check_derivative_bounds(f, o).pass);
}

TEST_CASE("trajectories leaving the region are truncated", "[checks][bounds]")
{
    auto f      = contraction();
    f.plant.rhs = [](double, const Vector& x, Vector& dx) {
        dx = x;
    };
    f.Y[0] = [](const Vector& X, const Vector&) {
        return X.squaredNorm();
    };
    DerivativeBoundOptions o;
    o.trajectories = 3;
    o.horizon      = 5.0;
    const auto rep = check_derivative_bounds(f, o);
    CHECK(rep.pass);
    CHECK(rep.skippedTrajectories == 3);
}

TEST_CASE("aitken limit", "[checks][chain]")
{
    CHECK(aitken_limit({1.0, 0.5, 0.25}) == Approx(0.0).margin(1e-15));
    CHECK(aitken_limit({3.0, 2.0, 1.5}) == Approx(1.0));
    CHECK(aitken_limit({2.0, 1.0}) == 1.0);
    CHECK(aitken_limit({4.0, 4.0, 4.0}) == 4.0);
}

TEST_CASE("chain on the toy family", "[checks][chain]")
{
    const auto f   = toy2();
    // spacing 1/600 resolves |z2| <= sqrt(eta) down to eta = 1e-3
    const auto rep = check_nonpositivity_chain(f, grid(600, 1.0), etas);
    REQUIRE(rep.steps.size() == 2);
    CHECK(rep.steps[0].pass);
    CHECK(rep.steps[0].levels[0].supY <= 0.0);
    // |z2| <= sqrt(eta) gives sup Y_2 close to 10 sqrt(eta)
    CHECK(rep.steps[1].pass);
    CHECK(rep.steps[1].rate == Approx(0.5).margin(0.05));
    CHECK(rep.pass);
}

TEST_CASE("a constant positive bound fails the chain", "[checks][chain][mutation]")
{
    auto f = toy2();
    f.Y[1] = [](const Vector&, const Vector&) {
        return 1.0;
    };
    const auto rep = check_nonpositivity_chain(f, grid(40, 1.0), etas);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.steps[1].pass);
    CHECK(rep.steps[1].slack == Approx(1.0 / 1e-3));
}

TEST_CASE("empty predicate sets are vacuous", "[checks][chain]")
{
    auto f = toy2();
    f.Y[0] = [](const Vector&, const Vector&) {
        return -5.0;
    };
    const auto rep = check_nonpositivity_chain(f, grid(20, 1.0), etas);
    CHECK(rep.steps[1].vacuous);
    CHECK(rep.steps[1].pass);
}

TEST_CASE("zero locus", "[checks][zero]")
{
    const auto one = check_zero_locus(contraction(), grid(40, 1.0), etas);
    CHECK(one.pass);
    CHECK(one.radius.back() < one.radius.front() / 3.0);

    auto line = toy2();
    line.Y[1] = [](const Vector& X, const Vector&) {
        return -X(1) * X(1);
    };
    const auto rep = check_zero_locus(line, grid(40, 1.0), etas);
    CHECK_FALSE(rep.pass);
    CHECK(rep.radius.back() == Approx(1.0));
}

TEST_CASE("sample pairs are seeded and enriched", "[checks][sampling]")
{
    auto f = toy2();
    f.m    = 2;
    const auto a = sample_pairs(f, 400, 3.0, 5);
    const auto b = sample_pairs(f, 400, 3.0, 5);
    REQUIRE(a.size() == 400);
    int zeros = 0, tiny = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].X == b[k].X);
        CHECK(a[k].psi == b[k].psi);
        CHECK(a[k].X.norm() <= 1.0 + 1e-12);
        CHECK(a[k].psi.norm() <= 3.0 + 1e-12);
        for (Eigen::Index c = 0; c < 2; ++c) {
            zeros += a[k].X(c) == 0.0;
            tiny += a[k].X(c) != 0.0 && std::abs(a[k].X(c)) < 1e-4;
        }
    }
    CHECK(zeros > 50);
    CHECK(tiny > 5);
}
