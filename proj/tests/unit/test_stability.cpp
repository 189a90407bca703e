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
#include "matrosov/stability.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace matrosov;
using Catch::Approx;

namespace
{

TimeVaryingSystem linear(int dim, double a)
{
    TimeVaryingSystem s;
    s.dim = dim;
    s.rhs = [a](double, const Vector& x, Vector& dx) {
        dx = a * x;
    };
    return s;
}

StabilityOptions opts()
{
    StabilityOptions o;
    o.icCount = 8;
    o.dt      = 1e-2;
    return o;
}

ChannelNetworkConfig network(HeatKind gA, double gB)
{
    ChannelNetworkConfig c;
    for (int i = 0; i < 3; ++i) {
        c.blocks.push_back(make_quadratic_block(1, 1.0, 1.0));
    }
    for (int i = 0; i < 2; ++i) {
        ChannelGain g;
        g.gA = make_heat(gA, {1.0, 1.0}, 3, 3);
        g.gB = [gB](double, const Vector&) {
            return gB;
        };
        c.channels.push_back(g);
    }
    c.sigma = make_output_nonlinearity("tanh", 1);
    return c;
}

} // namespace

TEST_CASE("ic batches", "[stability]")
{
    const auto b = ic_batch(3, 2.0, opts());
    REQUIRE(b.size() == 8);
    CHECK(b.front().norm() == Approx(2.0));
    for (const auto& x : b) {
        CHECK(x.norm() <= 2.0 + 1e-12);
    }
    auto o = opts();
    o.ics  = {Vector::Ones(3) / std::sqrt(3.0)};
    const auto e = ic_batch(3, 0.5, o);
    REQUIRE(e.size() == 1);
    CHECK(e.front().norm() == Approx(0.5));
}

TEST_CASE("contraction envelope equals the radius for every t0", "[stability][ugs]")
{
    const auto rep = verify_ugs(linear(2, -1.0), {0.5, 1.0, 2.0}, {0.0, 10.0, 100.0}, 5.0, opts());
    CHECK(rep.uniform);
    CHECK_FALSE(rep.diverged);
    REQUIRE(rep.gammaEnvelope.size() == 3);
    for (const auto& e : rep.gammaEnvelope) {
        CHECK(e.bound == Approx(e.radius));
        CHECK(e.spread == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("growth is reported as divergence", "[stability][ugs]")
{
    auto o   = opts();
    o.blowUp = 1e6;
    const auto rep = verify_ugs(linear(2, 1.0), {1.0}, {0.0}, 50.0, o);
    CHECK(rep.diverged);
    CHECK_FALSE(rep.uniform);
    REQUIRE_FALSE(rep.witnesses.empty());
    CHECK(std::isinf(rep.witnesses.front().value));
}

TEST_CASE("contraction settles at T = 1 for sigma = exp(-1)", "[stability][uga]")
{
    const auto rep = verify_uga(linear(2, -1.0), 1.0, std::exp(-1.0), {0.0, 3.0, 40.0}, 5.0, opts());
    REQUIRE(rep.uniformT);
    CHECK(*rep.uniformT == Approx(1.0).margin(1e-2 + 1e-9));
    CHECK(rep.spread < 1e-9);
    CHECK(rep.uniform);
    for (const auto& s : rep.settlingTimes) {
        REQUIRE(s.T);
        CHECK(*s.T == Approx(1.0).margin(1e-2 + 1e-9));
    }
}

TEST_CASE("sigma at least r settles immediately", "[stability][uga]")
{
    const auto rep = verify_uga(linear(2, -1.0), 1.0, 1.0, {0.0, 7.0}, 2.0, opts());
    REQUIRE(rep.uniformT);
    CHECK(*rep.uniformT == 0.0);
}

TEST_CASE("no attraction gives witnesses", "[stability][uga]")
{
    const auto rep = verify_uga(linear(2, 0.0), 1.0, 0.1, {0.0}, 3.0, opts());
    CHECK_FALSE(rep.uniformT);
    CHECK_FALSE(rep.uniform);
    REQUIRE_FALSE(rep.witnesses.empty());
    CHECK(rep.witnesses.front().value > 0.1);
}

TEST_CASE("batches are deterministic", "[stability]")
{
    const auto a = simulate_batch(linear(2, -0.5), 1.0, 2.0, 3.0, opts());
    const auto b = simulate_batch(linear(2, -0.5), 1.0, 2.0, 3.0, opts());
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].states.back() == b[k].states.back());
        CHECK(a[k].t0 == 2.0);
    }
}

TEST_CASE("necessity with constant unit gains: exact factorisation", "[stability][necessity]")
{
    const auto config = network(HeatKind::Zero, 1.0);
    Vector x          = Vector::Zero(3);
    x(0)              = 0.5;
    NecessityOptions o;
    o.tEnd   = 20.0;
    const auto rep = check_necessity_vector_field(config, 1, {x}, o);
    CHECK(rep.identityPass);
    CHECK(rep.identityError <= 1e-12);
    CHECK(rep.udpePass);
}

TEST_CASE("necessity: excited network passes, dead network fails", "[stability][necessity]")
{
    NecessityOptions o;
    o.tEnd = 40.0;
    o.mu   = 0.1;
    Vector x = Vector::Zero(3);
    x(0)     = 0.5;
    const auto good = check_necessity_vector_field(network(HeatKind::QuadraticSine, 1.0), 1, {x}, o);
    CHECK(good.pass);
    const auto dead = check_necessity_vector_field(network(HeatKind::Zero, 0.0), 1, {x}, o);
    CHECK_FALSE(dead.udpePass);
    CHECK_FALSE(dead.pass);
    CHECK(dead.identityPass);
}
