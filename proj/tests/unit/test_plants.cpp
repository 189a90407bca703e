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
#include "matrosov/plants.hpp"

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

HeatFunction sine_heat(int dim, int restricted, double kappa = 1.0)
{
    return make_heat(HeatKind::QuadraticSine, {kappa, 1.0}, dim, restricted);
}

ChannelNetworkConfig unit_network(int n, double gB)
{
    ChannelNetworkConfig c;
    for (int i = 0; i < n; ++i) {
        c.blocks.push_back(make_quadratic_block(1, 1.0, 1.0));
    }
    for (int i = 0; i < n - 1; ++i) {
        ChannelGain g;
        g.gA = make_heat(HeatKind::Zero, {}, n, n);
        g.gB = [gB](double, const Vector&) {
            return gB;
        };
        c.channels.push_back(g);
    }
    c.sigma = make_output_nonlinearity("tanh", 1);
    return c;
}

} // namespace

TEST_CASE("chained3 hand evaluations", "[plants][chained3]")
{
    const auto zero = chained3_closed_loop(make_heat(HeatKind::Zero, {}, 2, 1));
    CHECK(zero.eval(0.3, Vector::Zero(3)).norm() == 0.0);
    CHECK((zero.eval(0.0, vec({1, 0, 0})) - vec({-1, 0, 0})).norm() == 0.0);

    const auto sine = chained3_closed_loop(sine_heat(2, 1));
    CHECK((sine.eval(pi / 2, vec({0, 1, 0})) - vec({1, 0, -1})).norm() < 1e-15);
    CHECK(sine.eval(1.7, Vector::Zero(3)).norm() == 0.0);
}

TEST_CASE("chainedN with n = 3 and unit gains is chained3", "[plants][chainedN]")
{
    const auto heat = sine_heat(2, 1);
    const auto a    = chained3_closed_loop(heat);
    const auto b    = chainedN_closed_loop(3, 1.0, {1.0, 1.0}, heat);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        const Vector x = vec({U(rng), U(rng), U(rng)});
        const double t = 10.0 * U(rng);
        CHECK((a.eval(t, x) - b.eval(t, x)).norm() <= 1e-12);
    }
}

TEST_CASE("chainedN n = 4 symbolic expansion", "[plants][chainedN]")
{
    // u = -k1 x1 + h, v = -(k2' u x2 ... ) alternating from the last term: n even gives k2' x2
    const double k1 = 1.5;
    const std::vector<double> kp{2.0, 3.0, 5.0};
    const auto sys = chainedN_closed_loop(4, k1, kp, make_heat(HeatKind::Zero, {}, 3, 2));
    const Vector x = vec({0.4, -0.3, 0.7, 0.2});
    const double u = -k1 * 0.4;
    const double v = -(kp[0] * (-0.3) + kp[1] * u * 0.7 + kp[2] * 0.2);
    const Vector expect = vec({u, u * 0.7, u * 0.2, v});
    CHECK((sys.eval(0.0, x) - expect).norm() < 1e-15);

    const auto r = sys.eval(0.0, vec({1, 0, 0, 0}));
    CHECK((r - vec({-k1, 0, 0, 0})).norm() == 0.0);
    CHECK(sys.eval(2.0, Vector::Zero(4)).norm() == 0.0);
}

TEST_CASE("chainedN rejects bad gains", "[plants][chainedN]")
{
    CHECK_THROWS(chainedN_closed_loop(4, 1.0, {1.0, 1.0}, make_heat(HeatKind::Zero, {}, 3, 2)));
    CHECK_THROWS(chainedN_closed_loop(4, -1.0, {1.0, 1.0, 1.0}, make_heat(HeatKind::Zero, {}, 3, 2)));
    CHECK_THROWS(chainedN_closed_loop(2, 1.0, {1.0}, make_heat(HeatKind::Zero, {}, 1, 1)));
}

TEST_CASE("heat kinds", "[plants][heat]")
{
    const auto a = sine_heat(2, 1);
    // restricted psi for the three-state case is x2^2 cos t
    for (double t : {0.0, 0.7, 2.0}) {
        CHECK(a.psi(t, vec({0.8})) == Approx(0.64 * std::cos(t)).margin(1e-15));
    }
    CHECK(a.h(1.0, Vector::Zero(2)) == 0.0);
    CHECK(a.psi(1.0, Vector::Zero(1)) == 0.0);

    const auto b = make_heat(HeatKind::Zero, {}, 2, 1);
    CHECK(b.psi(0.4, vec({3.0})) == 0.0);
    CHECK(b.h(0.4, vec({3.0, 1.0})) == 0.0);

    CHECK(parse_heat_kind("fading") == HeatKind::Fading);
    CHECK_THROWS(parse_heat_kind("square"));
    CHECK(to_string(parse_heat_kind("quadratic_sine")) == "quadratic_sine");
}

TEST_CASE("psi is the time derivative of the restricted heat", "[plants][heat][property]")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    for (auto kind : {HeatKind::QuadraticSine, HeatKind::Fading}) {
        const auto h = make_heat(kind, {2.0, 1.3}, 3, 2);
        for (int k = 0; k < 25; ++k) {
            const Vector xi = vec({U(rng), U(rng)});
            const double t  = 3.0 + 2.0 * U(rng);
            const double e  = 1e-5;
            const double fd = (h.hRestricted(t + e, xi) - h.hRestricted(t - e, xi)) / (2 * e);
            CHECK(h.psi(t, xi) == Approx(fd).margin(1e-7));
        }
    }
}

TEST_CASE("skew matrix structure", "[plants][skew]")
{
    const auto A = skew_matrix(2, {3.0}, 0.5);
    CHECK(A(0, 0) == 0.0);
    CHECK(A(0, 1) == 0.5);
    CHECK(A(1, 0) == -1.5);
    CHECK(A(1, 1) == -3.0);

    const auto A0 = skew_matrix(4, {1.0, 2.0, 3.0}, 0.0);
    CHECK(A0(3, 3) == -3.0);
    CHECK(A0.cwiseAbs().sum() == 3.0);

    const auto sys = skew_symmetric_plant(3, {1.0, 1.0}, make_heat(HeatKind::Zero, {}, 3, 2));
    const auto r   = sys.eval(0.0, vec({1, 0, 0, 0}));
    CHECK((r - vec({-1, 0, 0, 0})).norm() == 0.0);
}

TEST_CASE("skew weights cancel everything except the last coordinate", "[plants][skew][property]")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::uniform_real_distribution<double> K(0.2, 3.0);
    for (int m = 2; m <= 6; ++m) {
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<double> k;
            for (int i = 2; i <= m; ++i) {
                k.push_back(K(rng));
            }
            const auto p  = skew_weights(m, k);
            const Matrix P = Eigen::Map<const Vector>(p.data(), m).asDiagonal();
            const double u = U(rng);
            Vector z(m);
            for (int i = 0; i < m; ++i) {
                z(i) = U(rng);
            }
            const double lhs = 2.0 * z.dot(P * skew_matrix(m, k, u) * z);
            const double rhs = -2.0 * p.back() * k.back() * z(m - 1) * z(m - 1);
            CHECK(lhs == Approx(rhs).margin(1e-10 * (1.0 + std::abs(rhs))));
        }
    }
    CHECK(skew_weights(3, {2.0, 5.0}).back() == 1.0);
}

TEST_CASE("gain vector examples", "[plants][gains]")
{
    const auto g = make_gain_vector({2.0, 3.0, 5.0});
    REQUIRE(g.g.size() == 4);
    CHECK(g.g[0] == 30.0);
    CHECK(g.g[1] == 15.0);
    CHECK(g.g[2] == 5.0);
    CHECK(g.g[3] == 1.0);
    // [g3 g2 g1]^(1/3) gTilde_2^(1/3) gTilde_1^(2/3) = (2250 * 3 * 4)^(1/3) = 30
    CHECK(std::cbrt(5.0 * 15.0 * 30.0 * 3.0 * 4.0) == Approx(30.0).epsilon(1e-14));

    const auto ones = gain_identities_check({1.0, 1.0, 1.0});
    CHECK(ones.ok(0.0));
}

TEST_CASE("gain identities on random positive draws", "[plants][gains][property]")
{
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> L(-2.0, 2.0);
    for (int n = 3; n <= 6; ++n) {
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> gt, y;
            for (int i = 0; i < n - 1; ++i) {
                gt.push_back(std::exp(L(rng)));
            }
            for (int i = 0; i < n; ++i) {
                y.push_back(std::exp(L(rng)));
            }
            CHECK(gain_identities_check(gt, y).ok(1e-9));
        }
    }
}

TEST_CASE("channel network with unit gains", "[plants][channels]")
{
    const auto config = unit_network(3, 1.0);
    const auto sys    = channel_network_plant(config);
    REQUIRE(sys.dim == 5);
    const auto r = sys.eval(0.0, vec({1, 1, 1, 0, 0}));
    // u1 = g1 y2 = 1, u2 = g2 y3 - g1 y1 = 0, u3 = -sigma(y3) - g2 y2
    CHECK(r(0) == Approx(1.0));
    CHECK(r(1) == Approx(0.0).margin(1e-15));
    CHECK(r(2) == Approx(-std::tanh(1.0) - 1.0));
    CHECK(r(3) == 0.0);
    CHECK(r(4) == 0.0);
    CHECK(sys.eval(0.5, Vector::Zero(5)).norm() == 0.0);
}

TEST_CASE("dead channels leave only the terminal loop", "[plants][channels]")
{
    const auto sys = channel_network_plant(unit_network(3, 0.0));
    const auto r   = sys.eval(0.0, vec({0.7, -0.4, 0.9, 0, 0}));
    CHECK(r(0) == 0.0);
    CHECK(r(1) == 0.0);
    CHECK(r(2) == Approx(-std::tanh(0.9)));
}

TEST_CASE("storage dissipates through the terminal output only", "[plants][channels][property]")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    std::uniform_real_distribution<double> G(0.1, 3.0);
    ChannelNetworkConfig config = unit_network(4, 1.0);
    config.blocks[1] = make_quadratic_block(1, 2.0, 0.5);
    config.blocks[2] = make_quadratic_block(1, 0.7, 1.3);
    for (int trial = 0; trial < 50; ++trial) {
        Vector x(4);
        for (int i = 0; i < 4; ++i) {
            x(i) = U(rng);
        }
        const std::vector<double> gt{G(rng), G(rng), G(rng)};
        const Vector rates = channel_block_rates(config, x, gt);
        const auto y       = channel_outputs(config, x);
        double dW          = 0.0;
        for (int i = 0; i < 4; ++i) {
            dW += config.blocks[static_cast<std::size_t>(i)].gradW(x.segment(i, 1)).dot(rates.segment(i, 1));
        }
        const double expect = -y.back().dot(config.sigma.sigma(y.back()));
        CHECK(dW == Approx(expect).margin(1e-12));
    }
}

TEST_CASE("channel configuration checks", "[plants][channels]")
{
    const auto rep = check_channel_config(unit_network(3, 1.0), 2.0, 200, 1);
    CHECK(rep.ok);
    CHECK(rep.worstStorageMargin >= 0.0);
    CHECK(channel_storage(unit_network(3, 1.0), vec({1, 2, 2})) == Approx(4.5));
    CHECK_THROWS(make_output_nonlinearity("cubic", 1));
}

TEST_CASE("cascade demo plant", "[plants][cascade]")
{
    const auto sys = cascade_demo_plant(1.0);
    REQUIRE(sys.dim == 2);
    const auto r = sys.eval(pi / 2, vec({1.0, 2.0}));
    CHECK(r(0) == Approx(-1.0 + 2.0));
    CHECK(r(1) == Approx(-1.5 * 2.0));
}
