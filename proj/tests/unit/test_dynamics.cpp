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
#include "matrosov/dynamics.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace matrosov;
using Catch::Approx;

namespace
{

TimeVaryingSystem linear(double a)
{
    TimeVaryingSystem s;
    s.dim = 1;
    s.rhs = [a](double, const Vector& x, Vector& dx) {
        dx(0) = a * x(0);
    };
    return s;
}

Vector scalar(double v)
{
    Vector x(1);
    x(0) = v;
    return x;
}

double final_error(double dt)
{
    const auto tr = integrate(linear(-1.0), 0.0, scalar(1.0), 1.0, dt);
    return std::abs(tr.states.back()(0) - std::exp(-1.0));
}

} // namespace

TEST_CASE("rk4 decay reaches exp(-1)", "[dynamics]")
{
    const auto tr = integrate(linear(-1.0), 0.0, scalar(1.0), 1.0, 0.01);
    CHECK(std::abs(tr.states.back()(0) - 0.3678794) < 1e-6);
    CHECK(tr.time(tr.size() - 1) == 1.0);
}

TEST_CASE("rk4 halving the step divides the error by about 16", "[dynamics]")
{
    for (double dt : {0.1, 0.05, 0.02}) {
        const double ratio = final_error(dt) / final_error(dt / 2.0);
        CHECK(ratio == Approx(16.0).epsilon(0.05));
    }
}

TEST_CASE("degenerate horizons", "[dynamics]")
{
    CHECK_THROWS_AS(integrate(linear(-1.0), 0.0, scalar(1.0), -0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(integrate(linear(-1.0), 0.0, scalar(1.0), 1.0, 0.0), std::invalid_argument);
    CHECK(integrate(linear(-1.0), 0.0, scalar(1.0), 0.0, 0.1).size() == 1);
    const auto tr = integrate(linear(-1.0), 0.0, scalar(1.0), 0.1, 0.1);
    REQUIRE(tr.size() == 2);
    CHECK(tr.time(1) == Approx(0.1));
}

TEST_CASE("last step is shortened to land on tEnd", "[dynamics]")
{
    const auto tr = integrate(linear(-1.0), 0.0, scalar(1.0), 1.05, 0.1);
    CHECK(tr.size() == 12);
    CHECK(tr.time(tr.size() - 1) == 1.05);
    CHECK(tr.states.back()(0) == Approx(std::exp(-1.05)).epsilon(1e-6));
}

TEST_CASE("recordEvery thins the stored samples but keeps the end point", "[dynamics]")
{
    IntegrateOptions o;
    o.recordEvery = 10;
    const auto full = integrate(linear(-1.0), 0.0, scalar(1.0), 1.0, 0.01);
    const auto thin = integrate(linear(-1.0), 0.0, scalar(1.0), 1.0, 0.01, o);
    CHECK(thin.size() < full.size());
    CHECK(thin.states.back()(0) == full.states.back()(0));
}

TEST_CASE("integrate_visit sees the same states", "[dynamics]")
{
    const auto tr = integrate(linear(-0.5), 0.0, scalar(2.0), 2.0, 0.05);
    std::vector<double> seen;
    integrate_visit(linear(-0.5), 0.0, scalar(2.0), 2.0, 0.05, [&](double, const Vector& x) {
        seen.push_back(x(0));
    });
    REQUIRE(seen.size() == tr.size());
    for (std::size_t k = 0; k < seen.size(); ++k) {
        CHECK(seen[k] == tr.states[k](0));
    }
}

TEST_CASE("growth past the blow-up threshold raises with a partial trajectory", "[dynamics]")
{
    IntegrateOptions o;
    o.blowUp = 1e3;
    try {
        integrate(linear(1.0), 0.0, scalar(1.0), 100.0, 0.01, o);
        FAIL("no divergence reported");
    }
    catch (const IntegrationError& e) {
        CHECK(e.kind() == IntegrationError::Kind::Divergence);
        CHECK(e.lastValidTime() == Approx(std::log(1e3)).margin(0.05));
        CHECK(e.partial().size() > 1);
        CHECK(e.partial().states.back().norm() < 1e3);
    }
}

TEST_CASE("dimension mismatches are rejected", "[dynamics]")
{
    CHECK_THROWS_AS(linear(-1.0).eval(0.0, Vector::Zero(2)), std::invalid_argument);
}

TEST_CASE("sample_region containment and determinism", "[dynamics][sampling]")
{
    const auto ball = sample_region(RegionSpec::ball(2, 1.0), 100, 5);
    REQUIRE(ball.size() == 100);
    for (const auto& p : ball) {
        CHECK(p.norm() <= 1.0 + 1e-12);
    }
    CHECK(ball.front().norm() == Approx(1.0));

    const auto ann = sample_region(RegionSpec::annulus(3, 0.5, 1.0), 200, 9);
    for (const auto& p : ann) {
        CHECK(p.norm() >= 0.5 - 1e-12);
        CHECK(p.norm() <= 1.0 + 1e-12);
    }
    CHECK(ann[1].norm() == Approx(0.5));

    const auto again = sample_region(RegionSpec::annulus(3, 0.5, 1.0), 200, 9);
    for (std::size_t k = 0; k < ann.size(); ++k) {
        CHECK(ann[k] == again[k]);
    }
    const auto other = sample_region(RegionSpec::annulus(3, 0.5, 1.0), 200, 10);
    CHECK_FALSE(other[5] == ann[5]);
}

TEST_CASE("halton points stay in the unit cube", "[dynamics][sampling]")
{
    for (const auto& p : halton_points(4, 500, 3)) {
        CHECK(p.minCoeff() >= 0.0);
        CHECK(p.maxCoeff() < 1.0);
    }
}
