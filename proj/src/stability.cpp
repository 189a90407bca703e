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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace matrosov
{

std::vector<Vector> ic_batch(int dim, double r, const StabilityOptions& o)
{
    if (!(r >= 0.0)) {
        throw std::invalid_argument("IC radius must be nonnegative");
    }
    if (!o.ics.empty()) {
        std::vector<Vector> out;
        for (const auto& v : o.ics) {
            if (v.size() != dim) {
                throw std::invalid_argument("explicit IC has the wrong dimension");
            }
            if (v.norm() > 1.0 + 1e-12) {
                throw std::invalid_argument("explicit ICs must lie in the unit ball");
            }
            out.push_back(r * v);
        }
        return out;
    }
    if (o.icCount < 1) {
        throw std::invalid_argument("IC batch needs at least one point");
    }
    if (r == 0.0) {
        return std::vector<Vector>(static_cast<std::size_t>(o.icCount), Vector::Zero(dim));
    }
    return sample_region(RegionSpec::ball(dim, r), o.icCount, o.seed);
}

namespace
{

double relative_spread(const std::vector<double>& v)
{
    if (v.empty()) {
        return 0.0;
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    if (*hi <= 0.0) {
        return 0.0;
    }
    return (*hi - *lo) / *hi;
}

void check_grid(const std::vector<double>& t0grid, double horizon, const StabilityOptions& o)
{
    if (t0grid.empty() || !(horizon > 0.0) || !(o.dt > 0.0)) {
        throw std::invalid_argument("stability check needs t0 values, a positive horizon and a positive step");
    }
}

} // namespace

std::vector<Trajectory> simulate_batch(const TimeVaryingSystem& plant, double r, double t0, double horizon,
                                       const StabilityOptions& o)
{
    std::vector<Trajectory> out;
    IntegrateOptions io;
    io.blowUp = o.blowUp;
    for (const auto& x0 : ic_batch(plant.dim, r, o)) {
        try {
            out.push_back(integrate(plant, t0, x0, t0 + horizon, o.dt, io));
        }
        catch (const IntegrationError& e) {
            out.push_back(e.partial());
        }
    }
    return out;
}

StabilityReport verify_ugs(const TimeVaryingSystem& plant, const std::vector<double>& radii,
                           const std::vector<double>& t0grid, double horizon, const StabilityOptions& o)
{
    check_grid(t0grid, horizon, o);
    StabilityReport rep;
    rep.seed    = o.seed;
    rep.uniform = true;
    IntegrateOptions io;
    io.blowUp = o.blowUp;
    for (double r : radii) {
        EnvelopeEntry env;
        env.radius     = r;
        const auto ics = ic_batch(plant.dim, r, o);
        for (double t0 : t0grid) {
            double sup = 0.0;
            for (const auto& x0 : ics) {
                try {
                    integrate_visit(
                        plant, t0, x0, t0 + horizon, o.dt,
                        [&](double, const Vector& x) {
                            sup = std::max(sup, x.norm());
                        },
                        io);
                }
                catch (const IntegrationError& e) {
                    rep.diverged = true;
                    sup          = std::numeric_limits<double>::infinity();
                    rep.witnesses.push_back({t0, x0, e.lastValidTime(), sup, e.what()});
                }
            }
            env.perT0.push_back(sup);
        }
        env.bound  = *std::max_element(env.perT0.begin(), env.perT0.end());
        env.spread = std::isfinite(env.bound) ? relative_spread(env.perT0) : 1.0;
        rep.spread = std::max(rep.spread, env.spread);
        if (!std::isfinite(env.bound) || env.spread >= o.uniformTol) {
            rep.uniform = false;
        }
        rep.gammaEnvelope.push_back(std::move(env));
    }
    return rep;
}

StabilityReport verify_uga(const TimeVaryingSystem& plant, double r, double sigma, const std::vector<double>& t0grid,
                           double horizon, const StabilityOptions& o)
{
    check_grid(t0grid, horizon, o);
    if (!(sigma > 0.0)) {
        throw std::invalid_argument("sigma must be positive");
    }
    StabilityReport rep;
    rep.seed       = o.seed;
    const auto ics = ic_batch(plant.dim, r, o);
    IntegrateOptions io;
    io.blowUp = o.blowUp;
    std::vector<double> Ts;
    bool all = true;
    for (double t0 : t0grid) {
        double worst = 0.0;
        bool settled = true;
        for (const auto& x0 : ics) {
            double settle = t0;
            double last   = x0.norm();
            bool pending  = false;
            bool blewUp   = false;
            try {
                integrate_visit(
                    plant, t0, x0, t0 + horizon, o.dt,
                    [&](double t, const Vector& x) {
                        last = x.norm();
                        if (last > sigma) {
                            pending = true;
                        }
                        else if (pending) {
                            pending = false;
                            settle  = t;
                        }
                    },
                    io);
            }
            catch (const IntegrationError& e) {
                rep.diverged = true;
                pending      = true;
                blewUp       = true;
                rep.witnesses.push_back({t0, x0, e.lastValidTime(), std::numeric_limits<double>::infinity(), e.what()});
            }
            if (pending) {
                if (!blewUp) {
                    std::ostringstream msg;
                    msg << "|x| > " << sigma << " at the end of the horizon";
                    rep.witnesses.push_back({t0, x0, t0 + horizon, last, msg.str()});
                }
                settled = false;
            }
            else {
                worst = std::max(worst, settle - t0);
            }
        }
        SettlingEntry e;
        e.radius = r;
        e.sigma  = sigma;
        e.t0     = t0;
        if (settled) {
            e.T = worst;
            Ts.push_back(worst);
        }
        all = all && settled;
        rep.settlingTimes.push_back(e);
    }
    if (all) {
        rep.uniformT = *std::max_element(Ts.begin(), Ts.end());
        rep.spread   = relative_spread(Ts);
    }
    rep.uniform = all;
    return rep;
}

// ---------------------------------------------------------------------------

namespace
{

std::vector<SteadyStateGain> channel_omegas(const ChannelNetworkConfig& config, const NecessityOptions& o)
{
    std::vector<SteadyStateGain> out;
    for (const auto& ch : config.channels) {
        const GainMode mode = ch.gA.hasClosedForm() ? GainMode::ClosedForm : GainMode::Quadrature;
        out.push_back(steady_state_gain(ch.gA, mode, o.truncation, o.panels));
    }
    return out;
}

std::vector<double> gains_on_set(const ChannelNetworkConfig& config, const std::vector<SteadyStateGain>& omega,
                                 double t, const Vector& x)
{
    std::vector<double> g;
    for (std::size_t j = 0; j < config.channels.size(); ++j) {
        g.push_back(omega[j].value(t, x) + config.channels[j].gB(t, x));
    }
    return g;
}

Vector zero_trailing(const ChannelNetworkConfig& config, int block, const Vector& x)
{
    Vector out     = x;
    const auto off = config.xOffsets();
    for (int b = block; b < config.blockCount(); ++b) {
        out.segment(off[static_cast<std::size_t>(b)], config.blocks[static_cast<std::size_t>(b)].stateDim).setZero();
    }
    return out;
}

} // namespace

Vector channel_field_on_set(const ChannelNetworkConfig& config, const std::vector<SteadyStateGain>& omega, double t,
                            const Vector& x, double fdStep)
{
    const int nc   = static_cast<int>(config.channels.size());
    const Vector Fx = channel_block_rates(config, x, gains_on_set(config, omega, t, x));
    Vector F(nc + Fx.size());
    const Vector xp = x + fdStep * Fx;
    const Vector xm = x - fdStep * Fx;
    for (int j = 0; j < nc; ++j) {
        const auto sj = static_cast<std::size_t>(j);
        auto zetaMap  = [&](const Vector& y) {
            return -config.channels[sj].gA.h(t, y) + omega[sj].value(t, y);
        };
        F(j) = (zetaMap(xp) - zetaMap(xm)) / (2.0 * fdStep);
    }
    F.tail(Fx.size()) = Fx;
    return F;
}

NecessityReport check_necessity_vector_field(const ChannelNetworkConfig& config, int block,
                                             const std::vector<Vector>& points, const NecessityOptions& o)
{
    config.validate();
    const int n = config.blockCount();
    if (block < 1 || block > n - 1) {
        throw std::invalid_argument("necessity check needs 1 <= block <= n - 1");
    }
    if (points.empty()) {
        throw std::invalid_argument("necessity check needs at least one point");
    }
    const auto omega = channel_omegas(config, o);
    const auto off   = config.xOffsets();

    NecessityReport rep;
    rep.block        = block;
    rep.identityPass = true;
    rep.udpePass     = true;

    ExcitationProbe probe;
    probe.dim    = config.xDim();
    probe.tBegin = o.tBegin;
    probe.tEnd   = o.tEnd;
    probe.tStep  = o.tStep;
    for (int c = 0; c < config.blocks[static_cast<std::size_t>(block - 1)].stateDim; ++c) {
        probe.split.push_back(off[static_cast<std::size_t>(block - 1)] + c);
    }
    probe.phi = [&config, &omega, block, fd = o.fdStep](double t, const Vector& x) {
        Vector out(1);
        out(0) = channel_field_on_set(config, omega, t, zero_trailing(config, block, x), fd).norm();
        return out;
    };

    for (const auto& p : points) {
        if (p.size() != config.xDim()) {
            throw std::invalid_argument("necessity point has the wrong dimension");
        }
        const Vector x = zero_trailing(config, block, p);
        // factorisation on the time grid
        for (double t = o.tBegin; t <= o.tEnd + 1e-12; t += 10.0 * o.tStep) {
            const auto g    = gains_on_set(config, omega, t, x);
            const Vector Fx = channel_block_rates(config, x, g);
            const auto y    = channel_outputs(config, x);
            auto partial    = [&](int k) {
                // gTilde_k ... gTilde_(block-1), empty product 1
                double prod = 1.0;
                for (int j = k; j <= block - 1; ++j) {
                    prod *= g[static_cast<std::size_t>(j - 1)];
                }
                return prod;
            };
            double factor = 1.0;
            for (int j = block; j <= n - 1; ++j) {
                factor *= g[static_cast<std::size_t>(j - 1)];
            }
            Vector R = Vector::Zero(Fx.size());
            for (int k = 1; k <= std::min(block + 1, n); ++k) {
                const auto& bm = config.blocks[static_cast<std::size_t>(k - 1)];
                Vector u       = Vector::Zero(bm.outputDim);
                if (k <= block) {
                    u += partial(k) * y[static_cast<std::size_t>(k)];
                }
                if (k >= 2) {
                    u -= partial(k - 1) * y[static_cast<std::size_t>(k - 2)];
                }
                const Vector xk = x.segment(off[static_cast<std::size_t>(k - 1)], bm.stateDim);
                R.segment(off[static_cast<std::size_t>(k - 1)], bm.stateDim) = bm.B(xk) * u;
            }
            const double scale = Fx.norm() + std::abs(factor) * R.norm();
            const double err   = scale > 0.0 ? (Fx - factor * R).norm() / scale : 0.0;
            rep.identityError  = std::max(rep.identityError, err);
        }
        auto v = check_udpe(probe, x, o.delta, o.T, o.mu);
        rep.udpePass = rep.udpePass && v.pass;
        rep.verdicts.push_back(std::move(v));
    }
    rep.identityPass = rep.identityError <= o.identityTol;
    rep.pass         = rep.udpePass && rep.identityPass;
    return rep;
}

} // namespace matrosov
