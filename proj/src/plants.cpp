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

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace matrosov
{

namespace
{

void require_heat_dims(const HeatFunction& heat, int dim, int restrictedDim, const char* plant)
{
    if (heat.dim != dim || heat.restrictedDim != restrictedDim) {
        std::ostringstream msg;
        msg << plant << " needs a heat with dim=" << dim << " and restrictedDim=" << restrictedDim << ", got "
            << heat.dim << "/" << heat.restrictedDim;
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

TimeVaryingSystem chained3_closed_loop(const HeatFunction& heat)
{
    require_heat_dims(heat, 2, 1, "chained3");
    TimeVaryingSystem sys;
    sys.dim   = 3;
    sys.label = "chained3/" + to_string(heat.kind);
    sys.rhs   = [h = heat.h](double t, const Vector& x, Vector& dx) {
        Vector z(2);
        z << x(1), x(2);
        const double u = -x(0) + h(t, z);
        dx(0)          = u;
        dx(1)          = u * x(2);
        dx(2)          = -x(2) - u * x(1);
    };
    return sys;
}

TimeVaryingSystem chainedN_closed_loop(int n, double k1, const std::vector<double>& kPrime, const HeatFunction& heat)
{
    if (n < 3) {
        throw std::invalid_argument("chained form needs n >= 3");
    }
    if (static_cast<int>(kPrime.size()) != n - 1) {
        throw std::invalid_argument("chained form needs n - 1 gains k'_2..k'_n");
    }
    if (!(k1 > 0.0) || std::any_of(kPrime.begin(), kPrime.end(), [](double k) {
            return !(k > 0.0);
        })) {
        throw std::invalid_argument("chained form gains must be positive");
    }
    require_heat_dims(heat, n - 1, n - 2, "chainedN");
    TimeVaryingSystem sys;
    sys.dim   = n;
    sys.label = "chained" + std::to_string(n) + "/" + to_string(heat.kind);
    sys.rhs   = [n, k1, kPrime, h = heat.h](double t, const Vector& x, Vector& dx) {
        const Vector z = x.tail(n - 1);
        const double u = -k1 * x(0) + h(t, z);
        dx(0)          = u;
        for (int i = 1; i < n - 1; ++i) {
            dx(i) = u * x(i + 1);
        }
        double v = 0.0;
        for (int i = 2; i <= n; ++i) {
            const double mult = ((n - i) % 2 == 1) ? u : 1.0;
            v -= kPrime[static_cast<std::size_t>(i - 2)] * mult * x(i - 1);
        }
        dx(n - 1) = v;
    };
    return sys;
}

Matrix skew_matrix(int m, const std::vector<double>& k, double u)
{
    if (m < 2 || static_cast<int>(k.size()) != m - 1) {
        throw std::invalid_argument("skew plant needs m >= 2 and gains k_2..k_m");
    }
    Matrix A = Matrix::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) {
        A(i, i + 1) = u;
    }
    for (int i = 1; i < m; ++i) {
        A(i, i - 1) = -k[static_cast<std::size_t>(i - 1)] * u;
    }
    A(m - 1, m - 1) = -k[static_cast<std::size_t>(m - 2)];
    return A;
}

TimeVaryingSystem cascade_demo_plant(double coupling)
{
    TimeVaryingSystem sys;
    sys.dim   = 2;
    sys.label = "cascade";
    sys.rhs   = [coupling](double t, const Vector& x, Vector& dx) {
        dx(0) = -x(0) + coupling * std::sin(t) * x(1) * x(0);
        dx(1) = -(1.0 + 0.5 * std::sin(t)) * x(1);
    };
    return sys;
}

std::vector<double> skew_weights(int m, const std::vector<double>& k)
{
    if (m < 2 || static_cast<int>(k.size()) != m - 1) {
        throw std::invalid_argument("skew plant needs m >= 2 and gains k_2..k_m");
    }
    std::vector<double> p(static_cast<std::size_t>(m), 1.0);
    for (int i = m - 1; i >= 1; --i) {
        // p_i = k_(i+1) p_(i+1) in 1-based indices
        p[static_cast<std::size_t>(i - 1)] = k[static_cast<std::size_t>(i - 1)] * p[static_cast<std::size_t>(i)];
    }
    return p;
}

TimeVaryingSystem skew_symmetric_plant(int m, const std::vector<double>& k, const HeatFunction& heat)
{
    if (m < 2 || static_cast<int>(k.size()) != m - 1) {
        throw std::invalid_argument("skew plant needs m >= 2 and gains k_2..k_m");
    }
    if (std::any_of(k.begin(), k.end(), [](double v) {
            return !(v > 0.0);
        })) {
        throw std::invalid_argument("skew plant gains must be positive");
    }
    require_heat_dims(heat, m, m - 1, "skew");
    TimeVaryingSystem sys;
    sys.dim   = m + 1;
    sys.label = "skew" + std::to_string(m) + "/" + to_string(heat.kind);
    sys.rhs   = [m, k, h = heat.h](double t, const Vector& x, Vector& dx) {
        const Vector z = x.tail(m);
        const double u = -x(0) + h(t, z);
        dx(0)          = u;
        for (int i = 0; i < m; ++i) {
            double r = 0.0;
            if (i + 1 < m) {
                r += u * z(i + 1);
            }
            if (i > 0) {
                r -= k[static_cast<std::size_t>(i - 1)] * u * z(i - 1);
            }
            if (i == m - 1) {
                r -= k[static_cast<std::size_t>(m - 2)] * z(i);
            }
            dx(i + 1) = r;
        }
    };
    return sys;
}

// ---------------------------------------------------------------------------

BlockModel make_quadratic_block(int dim, double a, double b)
{
    if (dim < 1 || !(a > 0.0) || !(b != 0.0)) {
        throw std::invalid_argument("quadratic block needs dim >= 1, a > 0 and b != 0");
    }
    BlockModel blk;
    blk.stateDim  = dim;
    blk.outputDim = dim;
    blk.B         = [dim, b](const Vector&) {
        return Matrix(b * Matrix::Identity(dim, dim));
    };
    blk.W = [a](const Vector& x) {
        return 0.5 * a * x.squaredNorm();
    };
    blk.gradW = [a](const Vector& x) {
        return Vector(a * x);
    };
    blk.c     = a * b * b;
    const double gain = std::abs(a * b);
    blk.kappa = [gain](double r) {
        return gain * r;
    };
    std::ostringstream lbl;
    lbl << "quadratic(a=" << a << ",b=" << b << ")";
    blk.label = lbl.str();
    return blk;
}

OutputNonlinearity make_output_nonlinearity(std::string_view name, int outputDim)
{
    if (outputDim < 1) {
        throw std::invalid_argument("output dimension must be positive");
    }
    OutputNonlinearity out;
    out.label = std::string(name);
    if (name == "tanh") {
        out.sigma = [](const Vector& u) {
            return Vector(u.array().tanh());
        };
        const double p = outputDim;
        out.rho        = [p](double r) {
            return r * std::tanh(r / p);
        };
        return out;
    }
    if (name.rfind("linear:", 0) == 0) {
        const double k = std::stod(std::string(name.substr(7)));
        if (!(k > 0.0)) {
            throw std::invalid_argument("linear output nonlinearity needs a positive gain");
        }
        out.sigma = [k](const Vector& u) {
            return Vector(k * u);
        };
        out.rho = [k](double r) {
            return k * r * r;
        };
        return out;
    }
    throw std::invalid_argument("unknown output nonlinearity '" + std::string(name) + "'");
}

int ChannelNetworkConfig::xDim() const
{
    int d = 0;
    for (const auto& b : blocks) {
        d += b.stateDim;
    }
    return d;
}

std::vector<int> ChannelNetworkConfig::xOffsets() const
{
    std::vector<int> off;
    int d = 0;
    for (const auto& b : blocks) {
        off.push_back(d);
        d += b.stateDim;
    }
    return off;
}

void ChannelNetworkConfig::validate() const
{
    const int n = blockCount();
    if (n < 2) {
        throw std::invalid_argument("channel network needs at least two blocks");
    }
    if (static_cast<int>(channels.size()) != n - 1) {
        std::ostringstream msg;
        msg << "channel network with " << n << " blocks needs " << n - 1 << " channel gains, got " << channels.size();
        throw std::invalid_argument(msg.str());
    }
    const int p = outputDim();
    for (const auto& b : blocks) {
        if (b.outputDim != p) {
            throw std::invalid_argument("all blocks must share one output dimension");
        }
        if (!b.B || !b.W || !b.gradW) {
            throw std::invalid_argument("block '" + b.label + "' is incomplete");
        }
    }
    const int dx = xDim();
    for (const auto& ch : channels) {
        if (ch.gA.dim != dx || ch.gA.restrictedDim != dx || !ch.gB) {
            throw std::invalid_argument("channel gains must act on the full block state");
        }
    }
    if (!sigma.sigma || !sigma.rho) {
        throw std::invalid_argument("channel network needs an output nonlinearity");
    }
}

std::vector<Vector> channel_outputs(const ChannelNetworkConfig& config, const Vector& x)
{
    const auto off = config.xOffsets();
    std::vector<Vector> y;
    y.reserve(config.blocks.size());
    for (std::size_t i = 0; i < config.blocks.size(); ++i) {
        const auto& b = config.blocks[i];
        y.push_back(b.output(x.segment(off[i], b.stateDim)));
    }
    return y;
}

std::vector<double> gain_products(const std::vector<double>& gTilde)
{
    const std::size_t n = gTilde.size() + 1;
    std::vector<double> g(n, 1.0);
    for (std::size_t i = n - 1; i-- > 0;) {
        g[i] = gTilde[i] * g[i + 1];
    }
    return g;
}

std::vector<Vector> channel_inputs(const ChannelNetworkConfig& config, const std::vector<Vector>& y,
                                   const std::vector<double>& g)
{
    const std::size_t n = y.size();
    std::vector<Vector> u(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        u[i] = g[i] * y[i + 1];
        if (i > 0) {
            u[i] -= g[i - 1] * y[i - 1];
        }
    }
    u[n - 1] = -config.sigma.sigma(y[n - 1]) - g[n - 2] * y[n - 2];
    return u;
}

Vector channel_block_rates(const ChannelNetworkConfig& config, const Vector& x, const std::vector<double>& gTilde)
{
    const auto y   = channel_outputs(config, x);
    const auto g   = gain_products(gTilde);
    const auto u   = channel_inputs(config, y, g);
    const auto off = config.xOffsets();
    Vector dx(x.size());
    for (std::size_t i = 0; i < config.blocks.size(); ++i) {
        const auto& b                   = config.blocks[i];
        dx.segment(off[i], b.stateDim) = b.B(x.segment(off[i], b.stateDim)) * u[i];
    }
    return dx;
}

double channel_storage(const ChannelNetworkConfig& config, const Vector& x)
{
    const auto off = config.xOffsets();
    double w       = 0.0;
    for (std::size_t i = 0; i < config.blocks.size(); ++i) {
        const auto& b = config.blocks[i];
        w += b.W(x.segment(off[i], b.stateDim));
    }
    return w;
}

TimeVaryingSystem channel_network_plant(const ChannelNetworkConfig& config)
{
    config.validate();
    const int n  = config.blockCount();
    const int dx = config.xDim();
    TimeVaryingSystem sys;
    sys.dim   = dx + n - 1;
    sys.label = "channels" + std::to_string(n);
    sys.rhs   = [config, n, dx](double t, const Vector& s, Vector& ds) {
        const Vector x = s.head(dx);
        std::vector<double> gTilde(static_cast<std::size_t>(n - 1));
        for (int i = 0; i < n - 1; ++i) {
            const auto& ch   = config.channels[static_cast<std::size_t>(i)];
            const double gA  = ch.gA.h(t, x);
            gTilde[static_cast<std::size_t>(i)] = -s(dx + i) + gA + ch.gB(t, x);
            ds(dx + i)       = -s(dx + i) + gA;
        }
        ds.head(dx) = channel_block_rates(config, x, gTilde);
    };
    return sys;
}

ChannelConfigReport check_channel_config(const ChannelNetworkConfig& config, double radius, int samples,
                                         std::uint64_t seed)
{
    config.validate();
    ChannelConfigReport rep;
    rep.worstDissipationMargin = std::numeric_limits<double>::infinity();
    rep.worstSectorMargin      = std::numeric_limits<double>::infinity();
    rep.worstStorageMargin     = std::numeric_limits<double>::infinity();
    const double tol           = 1e-7;
    for (std::size_t i = 0; i < config.blocks.size(); ++i) {
        const auto& b   = config.blocks[i];
        const auto pts  = sample_region(RegionSpec::ball(b.stateDim, radius), samples, seed + i);
        const double w0 = b.W(Vector::Zero(b.stateDim));
        for (const auto& x : pts) {
            Matrix J(b.outputDim, b.stateDim);
            for (int c = 0; c < b.stateDim; ++c) {
                const double e = 1e-6 * std::max(1.0, std::abs(x(c)));
                Vector xp = x, xm = x;
                xp(c) += e;
                xm(c) -= e;
                J.col(c) = (b.output(xp) - b.output(xm)) / (2.0 * e);
            }
            const Matrix JB = J * b.B(x);
            const Matrix S  = 0.5 * (JB + JB.transpose());
            Eigen::SelfAdjointEigenSolver<Matrix> es(S);
            const double margin = es.eigenvalues().minCoeff() - b.c;
            rep.worstDissipationMargin = std::min(rep.worstDissipationMargin, margin);
            rep.worstStorageMargin     = std::min(rep.worstStorageMargin, b.W(x) - w0);
        }
    }
    const auto us = sample_region(RegionSpec::ball(config.outputDim(), radius), samples, seed + 977);
    for (const auto& u : us) {
        const double m = u.dot(config.sigma.sigma(u)) - config.sigma.rho(u.norm());
        rep.worstSectorMargin = std::min(rep.worstSectorMargin, m);
    }
    if (rep.worstDissipationMargin < -tol) {
        rep.problems.push_back("dissipation matrix falls below c");
    }
    if (rep.worstStorageMargin < -tol) {
        rep.problems.push_back("storage function dips below its value at the origin");
    }
    if (rep.worstSectorMargin < -tol) {
        rep.problems.push_back("output nonlinearity leaves its sector");
    }
    rep.ok = rep.problems.empty();
    return rep;
}

// ---------------------------------------------------------------------------

GainVector make_gain_vector(const std::vector<double>& gTilde)
{
    if (gTilde.empty()) {
        throw std::invalid_argument("gain vector needs at least one channel gain");
    }
    return {gTilde, gain_products(gTilde)};
}

namespace
{

double rel_err(double a, double b)
{
    const double s = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / s;
}

} // namespace

GainIdentityReport gain_identities_check(const std::vector<double>& gTilde, const std::vector<double>& yNorms)
{
    const auto gv = make_gain_vector(gTilde);
    const int n   = static_cast<int>(gv.g.size());
    std::vector<double> y(static_cast<std::size_t>(n), 1.0);
    if (!yNorms.empty()) {
        if (static_cast<int>(yNorms.size()) != n) {
            throw std::invalid_argument("need one output norm per block");
        }
        y = yNorms;
    }
    auto gt = [&](int i) {
        return std::abs(gTilde[static_cast<std::size_t>(i - 1)]);
    };
    auto g = [&](int i) {
        return gv.g[static_cast<std::size_t>(i - 1)];
    };
    GainIdentityReport rep;
    for (int i = 1; i <= n - 1; ++i) {
        rep.recursionError = std::max(rep.recursionError, rel_err(g(i), gTilde[static_cast<std::size_t>(i - 1)] * g(i + 1)));
    }
    for (int i = 1; i <= n - 1; ++i) {
        const double e = n - i;
        double chain   = 1.0;
        for (int k = i; k <= n - 1; ++k) {
            chain *= std::abs(g(k));
        }
        double tail = 1.0;
        for (int k = i; k <= n - 2; ++k) {
            tail *= std::pow(gt(k), (n - k - 1) / e);
        }
        if (i <= n - 2) {
            rep.factorisationError =
                std::max(rep.factorisationError, rel_err(std::abs(g(i)), std::pow(chain, 1.0 / e) * tail));
        }
        const double yi  = y[static_cast<std::size_t>(i - 1)];
        const double phi = chain * yi;
        const double rhs = std::pow(phi, 1.0 / e) * std::pow(yi, (e - 1.0) / e) * tail;
        rep.outputNormError = std::max(rep.outputNormError, rel_err(std::abs(g(i)) * yi, rhs));
    }
    return rep;
}

} // namespace matrosov
