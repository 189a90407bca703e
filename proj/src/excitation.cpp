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
#include "matrosov/excitation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

namespace matrosov
{

ExcitationProbe ExcitationProbe::scalar(ScalarField f, int dim, double tBegin, double tEnd, double tStep)
{
    ExcitationProbe p;
    p.phi = [f = std::move(f)](double t, const Vector& x) {
        Vector v(1);
        v(0) = f(t, x);
        return v;
    };
    p.dim    = dim;
    p.tBegin = tBegin;
    p.tEnd   = tEnd;
    p.tStep  = tStep;
    return p;
}

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_probe(const ExcitationProbe& probe)
{
    if (!probe.phi) {
        throw std::invalid_argument("probe has no signal");
    }
    if (!(probe.tStep > 0.0) || !(probe.tEnd > probe.tBegin)) {
        throw std::invalid_argument("probe horizon must be nonempty with a positive step");
    }
    for (int i : probe.split) {
        if (i < 0 || i >= probe.dim) {
            throw std::invalid_argument("probe split index out of range");
        }
    }
}

long grid_last(const ExcitationProbe& probe)
{
    return static_cast<long>(std::floor((probe.tEnd - probe.tBegin) / probe.tStep + 1e-9));
}

std::vector<double> cumulative(const std::vector<double>& g, double h)
{
    std::vector<double> c(g.size(), 0.0);
    for (std::size_t k = 1; k < g.size(); ++k) {
        c[k] = c[k - 1] + 0.5 * h * (g[k - 1] + g[k]);
    }
    return c;
}

double cumulative_at(const std::vector<double>& c, double h, double s)
{
    // s measured from the grid origin
    const double q   = s / h;
    std::size_t k    = static_cast<std::size_t>(std::floor(q));
    if (k + 1 >= c.size()) {
        return c.back();
    }
    const double w = q - static_cast<double>(k);
    return (1.0 - w) * c[k] + w * c[k + 1];
}

struct WindowMin {
    double mass  = kInf;
    double start = 0.0;
};

// minimum over grid starts of the integral over [start, start + T]
WindowMin min_window(const std::vector<double>& c, double h, double T, double t0)
{
    WindowMin best;
    const double span = h * static_cast<double>(c.size() - 1);
    for (std::size_t k = 0; k < c.size(); ++k) {
        const double s = h * static_cast<double>(k);
        if (s + T > span + 1e-9 * h) {
            break;
        }
        const double m = cumulative_at(c, h, s + T) - c[k];
        if (m < best.mass) {
            best.mass  = m;
            best.start = t0 + s;
        }
    }
    return best;
}

std::vector<double> signal_norms(const ExcitationProbe& probe, const Vector& z)
{
    const long K = grid_last(probe);
    std::vector<double> g(static_cast<std::size_t>(K + 1));
    for (long k = 0; k <= K; ++k) {
        g[static_cast<std::size_t>(k)] = probe.phi(probe.tBegin + static_cast<double>(k) * probe.tStep, z).norm();
    }
    return g;
}

double split_norm(const ExcitationProbe& probe, const Vector& x)
{
    if (probe.split.empty()) {
        return x.norm();
    }
    double s = 0.0;
    for (int i : probe.split) {
        s += x(i) * x(i);
    }
    return std::sqrt(s);
}

std::vector<Vector> neighbourhood(const Vector& x, double delta, const UdpeOptions& options)
{
    std::vector<Vector> pts{x};
    if (delta > 0.0 && options.neighbours > 0) {
        for (const auto& d :
             sample_region(RegionSpec::ball(static_cast<int>(x.size()), delta), options.neighbours, options.seed)) {
            pts.push_back(x + d);
        }
    }
    return pts;
}

void check_window_args(const ExcitationProbe& probe, const Vector& x, double delta, double T)
{
    check_probe(probe);
    if (x.size() != probe.dim) {
        throw std::invalid_argument("point dimension does not match the probe");
    }
    if (!(delta >= 0.0)) {
        throw std::invalid_argument("delta must be nonnegative");
    }
    if (!(T > 0.0)) {
        throw std::invalid_argument("window length must be positive");
    }
    if (T > probe.tEnd - probe.tBegin) {
        std::ostringstream msg;
        msg << "window length " << T << " exceeds the probe horizon " << probe.tEnd - probe.tBegin;
        throw std::invalid_argument(msg.str());
    }
    if (split_norm(probe, x) == 0.0) {
        throw std::invalid_argument("excited part of x is zero; the window test needs a nonzero point");
    }
}

UdpeVerdict window_test(const std::vector<Vector>& pts, const std::function<std::vector<double>(const Vector&)>& norms,
                        const ExcitationProbe& probe, double delta, double T, double mu, double relTol)
{
    UdpeVerdict v;
    v.delta   = delta;
    v.T       = T;
    v.mu      = mu;
    v.minMass = kInf;
    for (const auto& z : pts) {
        const auto c  = cumulative(norms(z), probe.tStep);
        const auto wm = min_window(c, probe.tStep, T, probe.tBegin);
        if (wm.mass < v.minMass) {
            v.minMass  = wm.mass;
            v.witnessT = wm.start;
            v.witnessZ = z;
        }
    }
    v.pass = v.minMass >= mu * (1.0 - relTol);
    return v;
}

} // namespace

UdpeVerdict check_udpe(const ExcitationProbe& probe, const Vector& x, double delta, double T, double mu,
                       const UdpeOptions& options)
{
    check_window_args(probe, x, delta, T);
    return window_test(
        neighbourhood(x, delta, options),
        [&](const Vector& z) {
            return signal_norms(probe, z);
        },
        probe, delta, T, mu, options.massRelTol);
}

PEProfile estimate_pe_profile(const ExcitationProbe& probe, double Delta, int radiiCount,
                              const ProfileOptions& options)
{
    check_probe(probe);
    if (!(Delta > 0.0) || radiiCount < 1) {
        throw std::invalid_argument("profile needs Delta > 0 and at least one radius");
    }
    if (!(options.windowMax > 0.0) || !(options.windowStep > 0.0)) {
        throw std::invalid_argument("profile window grid must be positive");
    }
    if (options.windowMax > probe.tEnd - probe.tBegin) {
        throw std::invalid_argument("profile window exceeds the probe horizon");
    }
    std::vector<int> excitedIdx = probe.split;
    if (excitedIdx.empty()) {
        for (int i = 0; i < probe.dim; ++i) {
            excitedIdx.push_back(i);
        }
    }
    std::vector<int> otherIdx;
    for (int i = 0; i < probe.dim; ++i) {
        if (std::find(excitedIdx.begin(), excitedIdx.end(), i) == excitedIdx.end()) {
            otherIdx.push_back(i);
        }
    }
    const int de = static_cast<int>(excitedIdx.size());
    const int dn = static_cast<int>(otherIdx.size());

    // unit directions of the excited part, both signs of the first axis always included
    std::vector<Vector> dirs;
    {
        Vector e = Vector::Zero(de);
        e(0)     = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
        if (de > 1 && options.directions > 2) {
            for (const auto& p :
                 sample_region(RegionSpec::annulus(de, 1.0, 1.0), options.directions - 2, options.seed)) {
                dirs.push_back(p);
            }
        }
    }
    std::vector<Vector> others{Vector::Zero(dn)};
    if (dn > 0 && options.otherSamples > 1) {
        for (const auto& p :
             sample_region(RegionSpec::ball(dn, Delta), options.otherSamples - 1, options.seed + 1)) {
            others.push_back(p);
        }
    }

    std::vector<double> windows;
    for (int q = 1; options.windowStep * q < options.windowMax - 1e-12; ++q) {
        windows.push_back(options.windowStep * q);
    }
    windows.push_back(options.windowMax);

    PEProfile prof;
    prof.Delta = Delta;
    for (int k = 0; k < radiiCount; ++k) {
        double r;
        if (options.spacing == RadiusSpacing::Linear) {
            r = Delta * (k + 1) / radiiCount;
        }
        else {
            const double lo = std::log(Delta * options.smallestRatio);
            const double hi = std::log(Delta);
            r = radiiCount == 1 ? Delta : std::exp(lo + (hi - lo) * k / (radiiCount - 1));
        }
        prof.radii.push_back(r);
    }

    for (double r : prof.radii) {
        std::vector<double> mu(windows.size(), kInf);
        for (const auto& d : dirs) {
            for (const auto& o : others) {
                Vector z = Vector::Zero(probe.dim);
                for (int i = 0; i < de; ++i) {
                    z(excitedIdx[static_cast<std::size_t>(i)]) = r * d(i);
                }
                for (int i = 0; i < dn; ++i) {
                    z(otherIdx[static_cast<std::size_t>(i)]) = o(i);
                }
                const auto c = cumulative(signal_norms(probe, z), probe.tStep);
                for (std::size_t w = 0; w < windows.size(); ++w) {
                    mu[w] = std::min(mu[w], min_window(c, probe.tStep, windows[w], probe.tBegin).mass);
                }
            }
        }
        std::size_t pick = windows.size() - 1;
        if (options.selection == WindowSelection::LargestMass) {
            const double target = mu.back() * (1.0 - 1e-6);
            for (std::size_t w = 0; w < windows.size(); ++w) {
                if (mu[w] >= target) {
                    pick = w;
                    break;
                }
            }
        }
        else {
            double best = -1.0;
            for (std::size_t w = 0; w < windows.size(); ++w) {
                const double score = std::exp(-windows[w]) * mu[w] * mu[w] / windows[w];
                if (score > best) {
                    best = score;
                    pick = w;
                }
            }
        }
        const bool ok = mu[pick] > 1e-300 && std::isfinite(mu[pick]);
        prof.excited.push_back(ok);
        prof.theta.push_back(ok ? windows[pick] : std::numeric_limits<double>::quiet_NaN());
        prof.gamma.push_back(ok ? mu[pick] : 0.0);
    }
    return prof;
}

void write_profile_csv(const PEProfile& profile, std::ostream& out)
{
    out << "radius,theta,gamma\n";
    const auto prec = out.precision(17);
    for (std::size_t k = 0; k < profile.radii.size(); ++k) {
        out << profile.radii[k] << ',';
        if (profile.excited[k]) {
            out << profile.theta[k];
        }
        else {
            out << "nan";
        }
        out << ',' << profile.gamma[k] << '\n';
    }
    out.precision(prec);
}

DecayGain::DecayGain(const PEProfile& profile)
{
    const std::size_t n = profile.radii.size();
    if (n == 0) {
        throw std::invalid_argument("empty excitation profile");
    }
    std::vector<double> v(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (profile.excited[k]) {
            const double th = profile.theta[k];
            const double g  = profile.gamma[k];
            v[k]            = std::min(profile.radii[k], std::exp(-th) * g * g / th);
        }
    }
    for (std::size_t k = n - 1; k-- > 0;) {
        v[k] = std::min(v[k], v[k + 1]);
    }
    // value of knot k is only trusted from the next knot on
    m_radii.push_back(0.0);
    m_values.push_back(0.0);
    m_radii.push_back(profile.radii[0]);
    m_values.push_back(0.0);
    for (std::size_t k = 1; k < n; ++k) {
        m_radii.push_back(profile.radii[k]);
        m_values.push_back(v[k - 1]);
    }
}

double DecayGain::operator()(double s) const
{
    if (m_radii.empty() || !(s > 0.0)) {
        return 0.0;
    }
    if (s >= m_radii.back()) {
        return m_values.back();
    }
    const auto it     = std::upper_bound(m_radii.begin(), m_radii.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - m_radii.begin());
    const double r0 = m_radii[k - 1], r1 = m_radii[k];
    const double w  = (s - r0) / (r1 - r0);
    return (1.0 - w) * m_values[k - 1] + w * m_values[k];
}

// ---------------------------------------------------------------------------

double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels)
{
    static const std::array<double, 4> xs = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                             0.8611363115940526};
    static const std::array<double, 4> ws = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                             0.3478548451374538};
    if (panels < 1) {
        throw std::invalid_argument("quadrature needs at least one panel");
    }
    const double h = (b - a) / panels;
    double sum     = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < 4; ++i) {
            sum += ws[i] * f(c + 0.5 * h * xs[i]);
        }
    }
    return 0.5 * h * sum;
}

double SteadyStateGain::truncationBound(double supPsi) const
{
    return mode == GainMode::ClosedForm ? 0.0 : std::exp(-truncation) * supPsi;
}

SteadyStateGain steady_state_gain(ScalarField psi, double truncation, int panels, VectorField psiGrad)
{
    if (!psi) {
        throw std::invalid_argument("steady-state gain needs psi");
    }
    if (!(truncation > 0.0) || panels < 1) {
        throw std::invalid_argument("quadrature needs a positive truncation and panel count");
    }
    SteadyStateGain g;
    g.mode       = GainMode::Quadrature;
    g.truncation = truncation;
    g.value      = [psi, truncation, panels](double t, const Vector& xi) {
        return gauss_legendre(
            [&](double s) {
                return std::exp(-s) * psi(t - s, xi);
            },
            0.0, truncation, panels);
    };
    if (psiGrad) {
        g.gradient = [psiGrad, truncation, panels](double t, const Vector& xi) {
            Vector acc = Vector::Zero(xi.size());
            for (int i = 0; i < xi.size(); ++i) {
                acc(i) = gauss_legendre(
                    [&](double s) {
                        return std::exp(-s) * psiGrad(t - s, xi)(i);
                    },
                    0.0, truncation, panels);
            }
            return acc;
        };
    }
    return g;
}

SteadyStateGain steady_state_gain(const HeatFunction& heat, GainMode mode, double truncation, int panels)
{
    if (mode == GainMode::ClosedForm) {
        if (!heat.hasClosedForm()) {
            throw std::invalid_argument("no closed-form steady state registered for heat '" + to_string(heat.kind) +
                                        "'");
        }
        SteadyStateGain g;
        g.mode       = GainMode::ClosedForm;
        g.truncation = kInf;
        g.value      = heat.steadyState;
        g.gradient   = heat.steadyStateGrad;
        return g;
    }
    return steady_state_gain(heat.psi, truncation, panels, heat.psiGradX);
}

// ---------------------------------------------------------------------------

UdpeVerdict filtered_excitation_preserves_pe(const ExcitationProbe& probe, double a, const Vector& filterInit,
                                             const Vector& x, double delta, double T, double mu,
                                             const UdpeOptions& options)
{
    check_window_args(probe, x, delta, T);
    if (!(a > 0.0)) {
        throw std::invalid_argument("filter pole must be positive");
    }
    const long K = grid_last(probe);
    auto norms   = [&](const Vector& z) {
        const Vector p0 = probe.phi(probe.tBegin, z);
        if (filterInit.size() != p0.size()) {
            throw std::invalid_argument("filter state dimension does not match the signal");
        }
        TimeVaryingSystem filt;
        filt.dim   = static_cast<int>(p0.size());
        filt.label = "excitation filter";
        filt.rhs   = [&](double t, const Vector& w, Vector& dw) {
            dw = -a * w + probe.phi(t, z);
        };
        const double tLast = probe.tBegin + static_cast<double>(K) * probe.tStep;
        const auto traj    = integrate(filt, probe.tBegin, filterInit, tLast, probe.tStep);
        std::vector<double> g;
        g.reserve(static_cast<std::size_t>(K + 1));
        for (long k = 0; k <= K && static_cast<std::size_t>(k) < traj.size(); ++k) {
            g.push_back(traj.states[static_cast<std::size_t>(k)].norm());
        }
        return g;
    };
    return window_test(neighbourhood(x, delta, options), norms, probe, delta, T, mu, options.massRelTol);
}

ProductReport product_factor_check(const std::vector<ExcitationProbe>& factors, const Vector& x, double delta,
                                   double T, double mu, int power, const UdpeOptions& options)
{
    if (factors.empty()) {
        throw std::invalid_argument("product check needs at least one factor");
    }
    if (power < 1) {
        throw std::invalid_argument("power must be positive");
    }
    ExcitationProbe prod = factors.front();
    prod.phi             = [factors](double t, const Vector& z) {
        double v = 1.0;
        for (const auto& f : factors) {
            v *= f.phi(t, z).norm();
        }
        Vector out(1);
        out(0) = v;
        return out;
    };
    ProductReport rep;
    const auto pv = check_udpe(prod, x, delta, T, mu, options);
    rep.productPE = pv.pass;
    for (const auto& f : factors) {
        const auto fv = check_udpe(f, x, delta, T, 0.0, options);
        rep.factorMass.push_back(fv.minMass);
        rep.factorPE.push_back(fv.minMass > 1e-12);
        ExcitationProbe pw = f;
        pw.phi             = [f, power](double t, const Vector& z) {
            Vector out(1);
            out(0) = std::pow(f.phi(t, z).norm(), power);
            return out;
        };
        const auto pwv = check_udpe(pw, x, delta, T, 0.0, options);
        rep.powerPE.push_back(pwv.minMass > 1e-12);
    }
    if (!rep.productPE) {
        rep.note = "product not PE";
    }
    else {
        const bool all = std::all_of(rep.factorPE.begin(), rep.factorPE.end(), [](bool b) {
            return b;
        });
        rep.note = all ? "product PE; every factor and power PE" : "product PE but a factor is not";
    }
    return rep;
}

} // namespace matrosov
