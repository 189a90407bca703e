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
#include "matrosov/family.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

using namespace matrosov;
using Catch::Approx;

namespace
{

constexpr double pi = 3.14159265358979323846;

Vector vec(std::initializer_list<double> v)
{
    Vector x(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) {
        x(i++) = a;
    }
    return x;
}

FamilyOptions quick()
{
    FamilyOptions o;
    o.nuSamples = 2000;
    o.muSamples = 2000;
    return o;
}

const AuxiliaryFamily& chained3()
{
    static const AuxiliaryFamily f =
        aux_family_chained3(make_heat(HeatKind::QuadraticSine, {1.0, 1.0}, 2, 1), quick());
    return f;
}

ChannelNetworkConfig network(double gB)
{
    ChannelNetworkConfig c;
    for (int i = 0; i < 3; ++i) {
        c.blocks.push_back(make_quadratic_block(1, 1.0, 1.0));
    }
    for (int i = 0; i < 2; ++i) {
        ChannelGain g;
        g.gA = make_heat(HeatKind::QuadraticSine, {1.0, 1.0}, 3, 3);
        g.gB = [gB](double, const Vector&) {
            return gB;
        };
        c.channels.push_back(g);
    }
    c.sigma = make_output_nonlinearity("tanh", 1);
    return c;
}

} // namespace

TEST_CASE("chained3 family shape and frozen values", "[family][chained3]")
{
    const auto& f = chained3();
    CHECK(f.j == 5);
    CHECK(f.m == 2);
    CHECK(f.Y.size() == 5);
    CHECK(f.V.size() == 5);
    // Y1 = -x3^2
    CHECK(f.evalY(0, vec({0.3, -1.0, 4.0}), vec({0.0, 0.0})) == -16.0);
    // zeta = omega(0, x2 = 1) = 1/2, V3 = zeta^2
    CHECK(f.V[2](0.0, vec({0.0, 1.0, 0.0})) == Approx(0.25).margin(1e-14));
    for (std::size_t i = 0; i < f.V.size(); ++i) {
        CHECK(f.V[i](1.3, Vector::Zero(3)) == Approx(0.0).margin(1e-14));
    }
    for (double n : f.nu()) {
        CHECK(n >= 0.0);
    }
    CHECK(f.mu > 0.0);
}

TEST_CASE("family mu dominates a fresh sample", "[family][property]")
{
    const auto& f = chained3();
    CHECK(sampled_mu(f, 2000, 4.0 * pi, 77) <= f.mu);
}

TEST_CASE("directional derivative of V1 matches a trajectory difference", "[family][property]")
{
    const auto& f = chained3();
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        const Vector s = vec({U(rng), U(rng), U(rng)});
        const double t = 5.0 * (U(rng) + 1.0);
        const double d = directional_derivative(f, 0, t, s);
        const double h = 1e-6;
        const Vector sp = s + h * f.plant.eval(t, s);
        const double fd = (f.V[0](t + h, f.toFamily(t + h, sp)) - f.V[0](t, f.toFamily(t, s))) / h;
        CHECK(d == Approx(fd).margin(1e-4));
    }
}

TEST_CASE("region sampling stays inside the Delta-ball", "[family]")
{
    const auto& f = chained3();
    for (const auto& X : sample_family_region(f, 500, 3)) {
        CHECK(f.regionNorm(X) <= f.Delta + 1e-12);
    }
}

TEST_CASE("skew family", "[family][skew]")
{
    const auto heat2 = make_heat(HeatKind::QuadraticSine, {1.0, 1.0}, 2, 1);
    const auto f2    = aux_family_skew(2, {1.0}, heat2, quick());
    CHECK(f2.j == 5);
    CHECK(f2.stateDim == 3);

    const auto heat4 = make_heat(HeatKind::QuadraticSine, {1.0, 1.0}, 4, 3);
    const auto f4    = aux_family_skew(4, {1.0, 1.0, 1.0}, heat4, quick());
    CHECK(f4.j == 9);
    for (const auto& V : f4.V) {
        CHECK(V(0.7, Vector::Zero(5)) == Approx(0.0).margin(1e-14));
    }
}

TEST_CASE("channel family", "[family][channels]")
{
    const auto f = aux_family_channels(network(2.0), quick());
    CHECK(f.j == 7);
    CHECK(f.m == 2);
    CHECK(f.stateDim == 5);
    for (const auto& V : f.V) {
        CHECK(V(0.4, Vector::Zero(5)) == Approx(0.0).margin(1e-14));
    }
    // at t = 3 pi / 4 the steady state of the sine gain vanishes, so gTilde_2 = gB = 2
    // and V2 = g_2 y_3 . y_2 = 2
    CHECK(f.V[1](0.75 * pi, vec({0.0, 1.0, 1.0, 0.0, 0.0})) == Approx(2.0).epsilon(1e-12));
    // family coordinates round-trip
    const Vector s = vec({0.3, -0.2, 0.5, 0.1, -0.4});
    CHECK((f.toPlant(1.1, f.toFamily(1.1, s)) - s).norm() < 1e-14);

    CHECK_THROWS(aux_family_channels([] {
        auto c = network(1.0);
        c.blocks.pop_back();
        c.channels.pop_back();
        return c;
    }()));
}

TEST_CASE("bounds are assembled from their terms", "[family]")
{
    AuxiliaryFamily f;
    BoundTerm t;
    t.negative = [](const Vector& X, const Vector&) {
        return X.squaredNorm();
    };
    t.positive = [](const Vector& X, const Vector&) {
        return std::abs(X(0));
    };
    t.nu = 3.0;
    attach_bounds(f, {t});
    CHECK(f.evalY(0, vec({2.0}), Vector(0)) == -4.0 + 6.0);
    CHECK(f.nu() == std::vector<double>{3.0});
    CHECK_THROWS(attach_bounds(f, {BoundTerm{}}));
}
