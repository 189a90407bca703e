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

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace matrosov
{

Vector TimeVaryingSystem::eval(double t, const Vector& x) const
{
    if (x.size() != dim) {
        std::ostringstream msg;
        msg << "state has dimension " << x.size() << ", system '" << label << "' expects " << dim;
        throw std::invalid_argument(msg.str());
    }
    Vector dx(dim);
    rhs(t, x, dx);
    return dx;
}

double Trajectory::time(std::size_t k) const
{
    if (k + 1 == states.size()) {
        return tEnd;
    }
    return std::min(t0 + static_cast<double>(k) * dt, tEnd);
}

IntegrationError::IntegrationError(Kind kind, double lastValidTime, Trajectory partial, const std::string& what)
    : std::runtime_error(what)
    , m_kind(kind)
    , m_lastValidTime(lastValidTime)
    , m_partial(std::move(partial))
{
}

namespace
{

void check_arguments(const TimeVaryingSystem& system, double t0, const Vector& x0, double tEnd, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw std::invalid_argument("step size must be positive and finite");
    }
    if (!(tEnd >= t0)) {
        throw std::invalid_argument("tEnd must not precede t0");
    }
    if (x0.size() != system.dim) {
        std::ostringstream msg;
        msg << "initial state has dimension " << x0.size() << ", system '" << system.label << "' expects "
            << system.dim;
        throw std::invalid_argument(msg.str());
    }
    if (!system.rhs) {
        throw std::invalid_argument("system has no right-hand side");
    }
}

// steps needed so that the last one is the only (possibly) short one
long step_count(double t0, double tEnd, double dt)
{
    const double ratio = (tEnd - t0) / dt;
    long n             = static_cast<long>(std::ceil(ratio - 1e-9));
    return std::max(n, 0L);
}

struct Rk4Workspace {
    Vector k1, k2, k3, k4, tmp;
    explicit Rk4Workspace(int n)
        : k1(n)
        , k2(n)
        , k3(n)
        , k4(n)
        , tmp(n)
    {
    }
};

void rk4_step(const RhsFn& f, double t, Vector& x, double h, Rk4Workspace& w)
{
    f(t, x, w.k1);
    w.tmp.noalias() = x + 0.5 * h * w.k1;
    f(t + 0.5 * h, w.tmp, w.k2);
    w.tmp.noalias() = x + 0.5 * h * w.k2;
    f(t + 0.5 * h, w.tmp, w.k3);
    w.tmp.noalias() = x + h * w.k3;
    f(t + h, w.tmp, w.k4);
    x += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

template <class Visit, class Fail>
void run_rk4(const TimeVaryingSystem& system, double t0, const Vector& x0, double tEnd, double dt,
             const IntegrateOptions& options, Visit&& visit, Fail&& fail)
{
    check_arguments(system, t0, x0, tEnd, dt);
    if (!x0.allFinite()) {
        fail(IntegrationError::Kind::NonFinite, t0, "initial state is not finite");
        return;
    }
    const long n = step_count(t0, tEnd, dt);
    Vector x     = x0;
    Rk4Workspace ws(system.dim);
    visit(0L, t0, x, n == 0);
    double t = t0;
    for (long k = 1; k <= n; ++k) {
        const double tNext = (k == n) ? tEnd : t0 + static_cast<double>(k) * dt;
        rk4_step(system.rhs, t, x, tNext - t, ws);
        if (!x.allFinite()) {
            fail(IntegrationError::Kind::NonFinite, t, "state became non-finite");
            return;
        }
        if (x.norm() > options.blowUp) {
            fail(IntegrationError::Kind::Divergence, t, "state norm exceeded the divergence bound");
            return;
        }
        t = tNext;
        visit(k, t, x, k == n);
    }
}

} // namespace

Trajectory integrate(const TimeVaryingSystem& system, double t0, const Vector& x0, double tEnd, double dt,
                     const IntegrateOptions& options)
{
    const int every = std::max(1, options.recordEvery);
    Trajectory traj;
    traj.t0    = t0;
    traj.dt    = dt * every;
    traj.tEnd  = tEnd;
    traj.label = system.label;
    traj.states.reserve(static_cast<std::size_t>(step_count(t0, tEnd, dt) / every + 2));
    run_rk4(
        system, t0, x0, tEnd, dt, options,
        [&](long k, double, const Vector& x, bool last) {
            if (k % every == 0 || last) {
                traj.states.push_back(x);
            }
        },
        [&](IntegrationError::Kind kind, double tValid, const char* what) {
            Trajectory partial = traj;
            partial.tEnd       = tValid;
            std::ostringstream msg;
            msg << what << " after t = " << tValid << " (system '" << system.label << "')";
            throw IntegrationError(kind, tValid, std::move(partial), msg.str());
        });
    return traj;
}

void integrate_visit(const TimeVaryingSystem& system, double t0, const Vector& x0, double tEnd, double dt,
                     const std::function<void(double, const Vector&)>& visit, const IntegrateOptions& options)
{
    run_rk4(
        system, t0, x0, tEnd, dt, options,
        [&](long, double t, const Vector& x, bool) {
            visit(t, x);
        },
        [&](IntegrationError::Kind kind, double tValid, const char* what) {
            std::ostringstream msg;
            msg << what << " after t = " << tValid << " (system '" << system.label << "')";
            Trajectory empty;
            empty.t0   = t0;
            empty.dt   = dt;
            empty.tEnd = tValid;
            throw IntegrationError(kind, tValid, std::move(empty), msg.str());
        });
}

namespace
{

std::vector<int> first_primes(int count)
{
    std::vector<int> primes;
    for (int c = 2; static_cast<int>(primes.size()) < count; ++c) {
        bool prime = true;
        for (int p : primes) {
            if (p * p > c) {
                break;
            }
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) {
            primes.push_back(c);
        }
    }
    return primes;
}

double radical_inverse(std::uint64_t index, int base)
{
    double result = 0.0;
    double f      = 1.0 / base;
    while (index > 0) {
        result += f * static_cast<double>(index % base);
        index /= base;
        f /= base;
    }
    return result;
}

double normal_quantile(double u)
{
    u = std::clamp(u, 1e-12, 1.0 - 1e-12);
    return std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
}

// direction from d uniforms; a degenerate draw falls back to e_1
Vector unit_direction(const Vector& u, int offset, int dim)
{
    Vector d(dim);
    if (dim == 1) {
        d(0) = u(offset) < 0.5 ? -1.0 : 1.0;
        return d;
    }
    for (int i = 0; i < dim; ++i) {
        d(i) = normal_quantile(u(offset + i));
    }
    const double n = d.norm();
    if (!(n > 1e-300)) {
        d.setZero();
        d(0) = 1.0;
        return d;
    }
    return d / n;
}

double radial_coordinate(const RegionSpec& region, double u, RadialLaw law)
{
    const double a = region.kind == RegionKind::Ball ? 0.0 : region.inner;
    const double b = region.outer;
    if (law == RadialLaw::Radius) {
        return a + (b - a) * u;
    }
    const double d  = region.dim;
    const double ad = std::pow(a, d);
    const double bd = std::pow(b, d);
    return std::pow(ad + u * (bd - ad), 1.0 / d);
}

} // namespace

std::vector<Vector> halton_points(int dim, int count, std::uint64_t seed)
{
    if (dim < 1 || count < 0) {
        throw std::invalid_argument("halton_points needs dim >= 1 and count >= 0");
    }
    const auto primes = first_primes(dim);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Vector shift(dim);
    for (int i = 0; i < dim; ++i) {
        shift(i) = unif(rng);
    }
    std::vector<Vector> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Vector p(dim);
        for (int i = 0; i < dim; ++i) {
            double v = radical_inverse(static_cast<std::uint64_t>(k) + 1, primes[static_cast<std::size_t>(i)]) +
                       shift(i);
            p(i) = v - std::floor(v);
        }
        pts.push_back(std::move(p));
    }
    return pts;
}

std::vector<Vector> sample_region(const RegionSpec& region, int count, std::uint64_t seed, RadialLaw law)
{
    if (region.dim < 1) {
        throw std::invalid_argument("region dimension must be at least 1");
    }
    if (!(region.outer > 0.0) || !std::isfinite(region.outer)) {
        throw std::invalid_argument("region radius must be positive and finite");
    }
    if (region.kind == RegionKind::Annulus && !(region.inner >= 0.0 && region.inner <= region.outer)) {
        throw std::invalid_argument("annulus needs 0 <= inner <= outer");
    }
    if (count < 1) {
        throw std::invalid_argument("sample count must be positive");
    }
    const int d = region.dim;
    auto u      = halton_points(d + 1, count, seed);
    std::vector<Vector> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const Vector& uk = u[static_cast<std::size_t>(k)];
        double r;
        if (k == 0) {
            r = region.outer;
        }
        else if (k == 1 && region.kind == RegionKind::Annulus) {
            r = region.inner;
        }
        else {
            r = radial_coordinate(region, uk(0), law);
        }
        pts.push_back(r * unit_direction(uk, 1, d));
    }
    return pts;
}

} // namespace matrosov
