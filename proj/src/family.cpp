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

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace matrosov
{

std::vector<double> AuxiliaryFamily::nu() const
{
    std::vector<double> out;
    for (const auto& t : terms) {
        out.push_back(t.nu);
    }
    return out;
}

double AuxiliaryFamily::regionNorm(const Vector& X) const
{
    if (regionBlocks.empty()) {
        return X.norm();
    }
    double r = 0.0;
    int off  = 0;
    for (int b : regionBlocks) {
        r = std::max(r, X.segment(off, b).norm());
        off += b;
    }
    return r;
}

void AuxiliaryFamily::validate() const
{
    if (j < 1 || static_cast<int>(V.size()) != j || static_cast<int>(Y.size()) != j) {
        std::ostringstream msg;
        msg << "family '" << label << "' needs j = " << j << " functions and bounds, has " << V.size() << " and "
            << Y.size();
        throw std::invalid_argument(msg.str());
    }
    if (!terms.empty() && static_cast<int>(terms.size()) != j) {
        throw std::invalid_argument("family '" + label + "' has a partial term list");
    }
    if (!phi || !toFamily || !toPlant || !plant.rhs) {
        throw std::invalid_argument("family '" + label + "' is incomplete");
    }
    int total = 0;
    for (int b : regionBlocks) {
        total += b;
    }
    if (!regionBlocks.empty() && total != stateDim) {
        throw std::invalid_argument("family '" + label + "' region blocks do not cover the state");
    }
}

void attach_bounds(AuxiliaryFamily& family, std::vector<BoundTerm> terms)
{
    family.Y.clear();
    for (const auto& t : terms) {
        if (!t.negative) {
            throw std::invalid_argument("bound term without a negative part");
        }
        if (t.positive) {
            family.Y.push_back([neg = t.negative, pos = t.positive, nu = t.nu](const Vector& X, const Vector& psi) {
                return -neg(X, psi) + nu * pos(X, psi);
            });
        }
        else {
            family.Y.push_back([neg = t.negative](const Vector& X, const Vector& psi) {
                return -neg(X, psi);
            });
        }
    }
    family.terms = std::move(terms);
}

double directional_derivative(const AuxiliaryFamily& family, int i, double t, const Vector& s, double step)
{
    const Vector f  = family.plant.eval(t, s);
    const auto& V   = family.V[static_cast<std::size_t>(i)];
    const Vector sp = s + step * f;
    const Vector sm = s - step * f;
    const double vp = V(t + step, family.toFamily(t + step, sp));
    const double vm = V(t - step, family.toFamily(t - step, sm));
    return (vp - vm) / (2.0 * step);
}

std::vector<Vector> sample_family_region(const AuxiliaryFamily& family, int count, std::uint64_t seed,
                                         RadialLaw law)
{
    std::vector<int> blocks = family.regionBlocks;
    if (blocks.empty()) {
        blocks.push_back(family.stateDim);
    }
    std::vector<std::vector<Vector>> parts;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        parts.push_back(sample_region(RegionSpec::ball(blocks[b], family.Delta), count, seed + 101 * b, law));
    }
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        Vector X(family.stateDim);
        int off = 0;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            X.segment(off, blocks[b]) = parts[b][static_cast<std::size_t>(k)];
            off += blocks[b];
        }
        out.push_back(std::move(X));
    }
    return out;
}

namespace
{

struct TimedSample {
    double t;
    Vector X;
};

std::vector<TimedSample> timed_samples(const AuxiliaryFamily& family, int count, double tWindow, std::uint64_t seed)
{
    const auto Xs = sample_family_region(family, count, seed);
    const auto ts = halton_points(1, count, seed + 17);
    std::vector<TimedSample> out;
    out.reserve(Xs.size());
    for (std::size_t k = 0; k < Xs.size(); ++k) {
        out.push_back({tWindow * ts[k](0), Xs[k]});
    }
    return out;
}

// nu_i = inflation * sup (Vdot_i + negative_i) / positive_i over the samples
void estimate_constants(AuxiliaryFamily& fam, std::vector<BoundTerm>& terms, const FamilyOptions& o)
{
    const auto samples = timed_samples(fam, o.nuSamples, o.timeWindow, o.seed);
    std::vector<double> ratio(terms.size(), 0.0);
    std::vector<double> residual(terms.size(), -std::numeric_limits<double>::infinity());
    double mu = 0.0;
    for (const auto& smp : samples) {
        const Vector s   = fam.toPlant(smp.t, smp.X);
        const Vector psi = fam.phi(smp.t, smp.X);
        mu               = std::max(mu, psi.norm());
        for (std::size_t i = 0; i < terms.size(); ++i) {
            mu = std::max(mu, std::abs(fam.V[i](smp.t, smp.X)));
            if (!terms[i].positive) {
                continue;
            }
            const double vdot = directional_derivative(fam, static_cast<int>(i), smp.t, s, o.fdStep);
            const double num  = vdot + terms[i].negative(smp.X, psi);
            const double den  = terms[i].positive(smp.X, psi);
            if (den > 1e-9) {
                ratio[i] = std::max(ratio[i], num / den);
            }
            else {
                residual[i] = std::max(residual[i], num);
            }
        }
    }
    for (std::size_t i = 0; i < terms.size(); ++i) {
        if (terms[i].positive) {
            terms[i].nu = o.nuInflation * ratio[i];
            if (residual[i] > 1e-6) {
                std::ostringstream msg;
                msg << "Y" << i + 1 << ": derivative exceeds the negative term by " << residual[i]
                    << " where the positive term vanishes";
                fam.notes.push_back(msg.str());
            }
        }
    }
    const auto muPoints = timed_samples(fam, o.muSamples, o.timeWindow, o.seed + 5);
    for (const auto& smp : muPoints) {
        mu = std::max(mu, fam.phi(smp.t, smp.X).norm());
        for (const auto& V : fam.V) {
            mu = std::max(mu, std::abs(V(smp.t, smp.X)));
        }
    }
    fam.mu = o.muInflation * mu;
}

// -int_0^L exp(-s) f(t + s) ds
double tail_integral(const std::function<double(double)>& f, double t, const FamilyOptions& o)
{
    return -gauss_legendre(
        [&](double s) {
            return std::exp(-s) * f(t + s);
        },
        0.0, o.truncation, o.panels);
}

DecayGain decay_gain_for(const ExcitationProbe& probe, const FamilyOptions& o, PEProfile& profileOut,
                         const std::string& what)
{
    ProfileOptions po;
    po.windowMax     = o.windowMax;
    po.windowStep    = o.windowStep;
    po.selection     = WindowSelection::BestDecay;
    po.spacing       = RadiusSpacing::Geometric;
    po.smallestRatio = o.profileSmallest;
    po.seed          = o.seed + 5;
    profileOut       = estimate_pe_profile(probe, o.Delta, o.profileRadii, po);
    const bool any   = std::any_of(profileOut.excited.begin(), profileOut.excited.end(), [](bool b) {
        return b;
    });
    if (!any) {
        throw std::runtime_error("no excitation profile available for " + what +
                                 "; the integral-type function cannot be bounded");
    }
    return DecayGain(profileOut);
}

SteadyStateGain make_gain(const HeatFunction& heat, const FamilyOptions& o)
{
    if (o.gainMode == GainMode::ClosedForm && !heat.hasClosedForm()) {
        return steady_state_gain(heat, GainMode::Quadrature, o.truncation, o.panels);
    }
    return steady_state_gain(heat, o.gainMode, o.truncation, o.panels);
}

void check_options(const FamilyOptions& o)
{
    if (!(o.Delta > 0.0) || o.nuSamples < 10 || o.muSamples < 1 || !(o.truncation > 0.0) || o.panels < 1) {
        throw std::invalid_argument("family options need Delta > 0, nuSamples >= 10 and a positive truncation");
    }
}

Vector identity_map(double, const Vector& x)
{
    return x;
}

} // namespace

double sampled_mu(const AuxiliaryFamily& family, int samples, double tWindow, std::uint64_t seed)
{
    double mu = 0.0;
    for (const auto& smp : timed_samples(family, samples, tWindow, seed)) {
        mu = std::max(mu, family.phi(smp.t, smp.X).norm());
        for (const auto& V : family.V) {
            mu = std::max(mu, std::abs(V(smp.t, smp.X)));
        }
    }
    return mu;
}

// ---------------------------------------------------------------------------

AuxiliaryFamily aux_family_chained3(const HeatFunction& heat, const FamilyOptions& o)
{
    check_options(o);
    if (heat.dim != 2 || heat.restrictedDim != 1) {
        throw std::invalid_argument("chained3 family needs a heat with dim 2 and restrictedDim 1");
    }
    AuxiliaryFamily fam;
    fam.label    = "chained3/" + to_string(heat.kind);
    fam.j        = 5;
    fam.m        = 2;
    fam.stateDim = 3;
    fam.Delta    = o.Delta;
    fam.plant    = chained3_closed_loop(heat);
    fam.toFamily = identity_map;
    fam.toPlant  = identity_map;

    const auto gain  = make_gain(heat, o);
    const auto omega = gain.value;
    auto xi          = [](double x2) {
        Vector v(1);
        v(0) = x2;
        return v;
    };
    auto u = [h = heat.h](double t, const Vector& X) {
        Vector z(2);
        z << X(1), X(2);
        return -X(0) + h(t, z);
    };
    auto zeta = [hc = heat.hRestricted, omega, xi](double t, const Vector& X) {
        const Vector v = xi(X(1));
        return X(0) - hc(t, v) + omega(t, v);
    };

    fam.V.push_back([](double, const Vector& X) {
        return 0.5 * (X(1) * X(1) + X(2) * X(2));
    });
    fam.V.push_back([u](double t, const Vector& X) {
        return X(2) * u(t, X) * X(1);
    });
    fam.V.push_back([zeta](double t, const Vector& X) {
        const double z = zeta(t, X);
        return z * z;
    });
    fam.V.push_back([omega, xi, o](double t, const Vector& X) {
        const Vector v = xi(X(1));
        return tail_integral(
            [&](double s) {
                const double w = omega(s, v) * X(1);
                return w * w;
            },
            t, o);
    });
    fam.V.push_back([](double, const Vector& X) {
        return X(0) * X(0);
    });
    fam.phi = [u, zeta](double t, const Vector& X) {
        Vector p(2);
        p << zeta(t, X), u(t, X) * X(1);
        return p;
    };

    ExcitationProbe probe = ExcitationProbe::scalar(
        [omega](double t, const Vector& x) {
            return omega(t, x);
        },
        1, 0.0, o.profileHorizon, o.profileStep);
    PEProfile prof;
    const DecayGain G = decay_gain_for(probe, o, prof, "the steady-state gain");
    fam.profiles.push_back(prof);

    std::vector<BoundTerm> terms(5);
    terms[0].negative = [](const Vector& X, const Vector&) {
        return X(2) * X(2);
    };
    terms[0].formula  = "-x3^2";
    terms[1].negative = [](const Vector&, const Vector& p) {
        return p(1) * p(1);
    };
    terms[1].positive = [](const Vector& X, const Vector&) {
        return std::abs(X(2));
    };
    terms[1].formula  = "-psi2^2 + nu |x3|";
    terms[2].negative = [](const Vector&, const Vector& p) {
        return p(0) * p(0);
    };
    terms[2].positive = terms[1].positive;
    terms[2].formula  = "-psi1^2 + nu |x3|";
    terms[3].negative = [G](const Vector& X, const Vector&) {
        return G(std::abs(X(1))) * X(1) * X(1);
    };
    terms[3].positive = [](const Vector& X, const Vector& p) {
        return p(0) * p(0) + p(1) * p(1) + std::abs(X(2));
    };
    terms[3].formula  = "-gamma(|x2|) x2^2 + nu (psi1^2 + psi2^2 + |x3|)";
    terms[4].negative = [](const Vector& X, const Vector&) {
        return X(0) * X(0);
    };
    terms[4].positive = [](const Vector& X, const Vector&) {
        return std::hypot(X(1), X(2));
    };
    terms[4].formula = "-x1^2 + nu |(x2, x3)|";

    fam.Y.assign(5, BoundFn{});
    estimate_constants(fam, terms, o);
    attach_bounds(fam, std::move(terms));
    fam.validate();
    return fam;
}

// ---------------------------------------------------------------------------

AuxiliaryFamily aux_family_skew(int m, const std::vector<double>& k, const HeatFunction& heat,
                                const FamilyOptions& o)
{
    check_options(o);
    if (m < 2 || static_cast<int>(k.size()) != m - 1) {
        throw std::invalid_argument("skew family needs m >= 2 and gains k_2..k_m");
    }
    if (heat.dim != m || heat.restrictedDim != m - 1) {
        throw std::invalid_argument("skew family needs a heat with dim m and restrictedDim m - 1");
    }
    AuxiliaryFamily fam;
    fam.label    = "skew" + std::to_string(m) + "/" + to_string(heat.kind);
    fam.j        = 2 * m + 1;
    fam.m        = m;
    fam.stateDim = m + 1;
    fam.Delta    = o.Delta;
    fam.plant    = skew_symmetric_plant(m, k, heat);
    fam.toFamily = identity_map;
    fam.toPlant  = identity_map;

    const auto p     = skew_weights(m, k);
    const auto gain  = make_gain(heat, o);
    const auto omega = gain.value;

    // X = (y, z_1..z_m); z_i sits at X(i)
    auto u = [h = heat.h, m](double t, const Vector& X) {
        return -X(0) + h(t, Vector(X.tail(m)));
    };
    auto xi = [m](const Vector& X) {
        return Vector(X.segment(1, m - 1));
    };
    auto zeta = [hr = heat.hRestricted, omega, xi](double t, const Vector& X) {
        const Vector v = xi(X);
        return X(0) - hr(t, v) + omega(t, v);
    };
    auto kk = [k](int a) {
        return k[static_cast<std::size_t>(a - 2)];
    };

    fam.V.push_back([p, m](double, const Vector& X) {
        double s = 0.0;
        for (int i = 1; i <= m; ++i) {
            s += p[static_cast<std::size_t>(i - 1)] * X(i) * X(i);
        }
        return s;
    });
    for (int i = 2; i <= m; ++i) {
        const int a = m - i + 2;
        fam.V.push_back([u, a, i](double t, const Vector& X) {
            return X(a) * std::pow(u(t, X), 2 * i - 3) * X(a - 1);
        });
    }
    fam.V.push_back([zeta](double t, const Vector& X) {
        const double z = zeta(t, X);
        return z * z;
    });
    for (int i = 2; i <= m; ++i) {
        const int c = m - i + 1;
        fam.V.push_back([omega, xi, o, i, c](double t, const Vector& X) {
            const Vector v = xi(X);
            return tail_integral(
                [&](double s) {
                    const double w = std::pow(omega(s, v), i - 1) * X(c);
                    return w * w;
                },
                t, o);
        });
    }
    fam.V.push_back([](double, const Vector& X) {
        return X(0) * X(0);
    });
    fam.phi = [u, zeta, m](double t, const Vector& X) {
        Vector ps(m);
        const double uu = u(t, X);
        ps(0)           = zeta(t, X);
        for (int i = 2; i <= m; ++i) {
            ps(i - 1) = std::pow(uu, i - 1) * X(m - i + 1);
        }
        return ps;
    };

    // |varphi_idx|: varphi_1 is the state z_m, varphi_i the psi slot i - 1
    auto vphi = [m](const Vector& X, const Vector& ps, int idx) {
        if (idx <= 0) {
            return 0.0;
        }
        if (idx == 1) {
            return std::abs(X(m));
        }
        return std::abs(ps(idx - 1));
    };
    std::vector<int> J;
    for (int jj = 2; jj <= m; ++jj) {
        if (jj <= m - 1 || jj >= 3) {
            J.push_back(jj);
        }
    }
    auto rootSum = [vphi, J](const Vector& X, const Vector& ps) {
        double s = 0.0;
        for (int jj : J) {
            s += std::pow(vphi(X, ps, jj), 1.0 / (jj - 1));
        }
        return s;
    };

    std::vector<DecayGain> G(static_cast<std::size_t>(m + 1));
    for (int i = 2; i <= m; ++i) {
        ExcitationProbe probe;
        probe.dim   = m - 1;
        probe.phi   = [omega, i](double t, const Vector& x) {
            Vector out(1);
            out(0) = std::pow(std::abs(omega(t, x)), i - 1);
            return out;
        };
        probe.tBegin = 0.0;
        probe.tEnd   = o.profileHorizon;
        probe.tStep  = o.profileStep;
        PEProfile prof;
        G[static_cast<std::size_t>(i)] =
            decay_gain_for(probe, o, prof, "power " + std::to_string(i - 1) + " of the steady-state gain");
        fam.profiles.push_back(prof);
    }

    std::vector<BoundTerm> terms(static_cast<std::size_t>(fam.j));
    {
        const double c1   = 2.0 * p[static_cast<std::size_t>(m - 1)] * kk(m);
        terms[0].negative = [c1, m](const Vector& X, const Vector&) {
            return c1 * X(m) * X(m);
        };
        terms[0].formula = "-2 p_m k_m z_m^2";
    }
    for (int i = 2; i <= m; ++i) {
        const int a       = m - i + 2;
        const double ka   = kk(a);
        auto& t           = terms[static_cast<std::size_t>(i - 1)];
        t.negative        = [ka, i](const Vector&, const Vector& ps) {
            return ka * ps(i - 1) * ps(i - 1);
        };
        t.positive = [vphi, i](const Vector& X, const Vector& ps) {
            return vphi(X, ps, i - 1) + vphi(X, ps, i - 2);
        };
        t.formula = "-k_" + std::to_string(a) + " varphi_" + std::to_string(i) + "^2 + nu (|varphi_" +
                    std::to_string(i - 1) + "| + |varphi_" + std::to_string(i - 2) + "|)";
    }
    {
        auto& t    = terms[static_cast<std::size_t>(m)];
        t.negative = [](const Vector&, const Vector& ps) {
            return ps(0) * ps(0);
        };
        t.positive = [m, rootSum](const Vector& X, const Vector& ps) {
            return std::abs(X(m)) + rootSum(X, ps);
        };
        t.formula = "-zeta^2 + nu (|z_m| + sum |varphi_j|^(1/(j-1)))";
    }
    for (int i = 2; i <= m; ++i) {
        const int c = m - i + 1;
        auto& t     = terms[static_cast<std::size_t>(m + i - 1)];
        t.negative  = [g = G[static_cast<std::size_t>(i)], c](const Vector& X, const Vector&) {
            return g(std::abs(X(c))) * X(c) * X(c);
        };
        t.positive = [m, i, rootSum](const Vector& X, const Vector& ps) {
            const double zt = i == 2 ? ps(0) * ps(0) : std::abs(ps(0));
            return ps(i - 1) * ps(i - 1) + zt + std::abs(X(m)) + rootSum(X, ps);
        };
        t.formula = "-gamma_" + std::to_string(i) + "(|z_" + std::to_string(c) + "|) z_" + std::to_string(c) +
                    "^2 + nu (varphi_" + std::to_string(i) + "^2 + " + (i == 2 ? "zeta^2" : "|zeta|") +
                    " + |z_m| + sum |varphi_j|^(1/(j-1)))";
    }
    {
        auto& t    = terms[static_cast<std::size_t>(2 * m)];
        t.negative = [](const Vector& X, const Vector&) {
            return X(0) * X(0);
        };
        t.positive = [m](const Vector& X, const Vector&) {
            return X.tail(m).norm();
        };
        t.formula = "-y^2 + nu |z|";
    }

    fam.Y.assign(static_cast<std::size_t>(fam.j), BoundFn{});
    estimate_constants(fam, terms, o);
    attach_bounds(fam, std::move(terms));
    fam.validate();
    return fam;
}

// ---------------------------------------------------------------------------

namespace
{

struct ChannelModel {
    ChannelNetworkConfig config;
    std::vector<ScalarField> omega;
    int n  = 0;
    int dx = 0;
    std::vector<int> off;

    std::vector<double> gTilde(double t, const Vector& X) const
    {
        const Vector x = X.head(dx);
        std::vector<double> g(static_cast<std::size_t>(n - 1));
        for (int j = 0; j < n - 1; ++j) {
            g[static_cast<std::size_t>(j)] =
                -X(dx + j) + omega[static_cast<std::size_t>(j)](t, x) + config.channels[static_cast<std::size_t>(j)].gB(t, x);
        }
        return g;
    }
    // phi_k for k = 1..n-1 in slot k-1
    Vector phis(double t, const Vector& X) const
    {
        const auto g = gain_products(gTilde(t, X));
        const auto y = channel_outputs(config, X.head(dx));
        Vector p(n - 1);
        for (int k = 1; k <= n - 1; ++k) {
            p(k - 1) = std::abs(g[static_cast<std::size_t>(k - 1)]) * y[static_cast<std::size_t>(k - 1)].norm();
        }
        return p;
    }
    // Omega_k with blocks k+1..n set to zero
    double Omega(int k, double t, const Vector& x) const
    {
        Vector xb = x;
        for (int b = k; b < n; ++b) {
            xb.segment(off[static_cast<std::size_t>(b)], config.blocks[static_cast<std::size_t>(b)].stateDim).setZero();
        }
        double prod = 1.0;
        for (int jj = k; jj <= n - 1; ++jj) {
            const auto sj = static_cast<std::size_t>(jj - 1);
            prod *= omega[sj](t, xb) + config.channels[sj].gB(t, xb);
        }
        return prod;
    }
    Vector block(const Vector& X, int i) const
    {
        return X.segment(off[static_cast<std::size_t>(i - 1)], config.blocks[static_cast<std::size_t>(i - 1)].stateDim);
    }
    Vector y(const Vector& X, int i) const
    {
        return config.blocks[static_cast<std::size_t>(i - 1)].output(block(X, i));
    }
};

} // namespace

AuxiliaryFamily aux_family_channels(const ChannelNetworkConfig& config, const FamilyOptions& o)
{
    check_options(o);
    config.validate();
    auto cm    = std::make_shared<ChannelModel>();
    cm->config = config;
    cm->n      = config.blockCount();
    cm->dx     = config.xDim();
    cm->off    = config.xOffsets();
    const int n  = cm->n;
    const int dx = cm->dx;
    if (n < 3) {
        throw std::invalid_argument("channel family needs at least three blocks");
    }
    for (const auto& ch : config.channels) {
        cm->omega.push_back(make_gain(ch.gA, o).value);
    }

    AuxiliaryFamily fam;
    fam.label        = "channels" + std::to_string(n);
    fam.j            = 3 * n - 2;
    fam.m            = n - 1;
    fam.stateDim     = dx + n - 1;
    fam.Delta        = o.Delta;
    fam.plant        = channel_network_plant(config);
    fam.regionBlocks = {dx, n - 1};
    fam.toFamily     = [cm](double t, const Vector& s) {
        Vector X       = s;
        const Vector x = s.head(cm->dx);
        for (int j = 0; j < cm->n - 1; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            X(cm->dx + j) = s(cm->dx + j) - cm->config.channels[sj].gA.h(t, x) + cm->omega[sj](t, x);
        }
        return X;
    };
    fam.toPlant = [cm](double t, const Vector& X) {
        Vector s       = X;
        const Vector x = X.head(cm->dx);
        for (int j = 0; j < cm->n - 1; ++j) {
            const auto sj = static_cast<std::size_t>(j);
            s(cm->dx + j) = X(cm->dx + j) + cm->config.channels[sj].gA.h(t, x) - cm->omega[sj](t, x);
        }
        return s;
    };
    fam.phi = [cm](double t, const Vector& X) {
        return cm->phis(t, X);
    };

    fam.V.push_back([cm](double, const Vector& X) {
        return channel_storage(cm->config, X.head(cm->dx));
    });
    for (int i = 2; i <= n; ++i) {
        fam.V.push_back([cm, i](double t, const Vector& X) {
            const int nn = cm->n;
            const auto g = gain_products(cm->gTilde(t, X));
            double w     = g[static_cast<std::size_t>(nn - i)];
            for (int l = nn - i + 2; l <= nn - 1; ++l) {
                w *= g[static_cast<std::size_t>(l - 1)] * g[static_cast<std::size_t>(l - 1)];
            }
            return w * cm->y(X, nn - i + 2).dot(cm->y(X, nn - i + 1));
        });
    }
    for (int i = 1; i <= n - 1; ++i) {
        fam.V.push_back([dx, i](double, const Vector& X) {
            return X(dx + i - 1) * X(dx + i - 1);
        });
    }
    for (int i = 1; i <= n - 1; ++i) {
        const int k = n - i;
        fam.V.push_back([cm, k, o](double t, const Vector& X) {
            const Vector x  = X.head(cm->dx);
            const double yk = cm->y(X, k).squaredNorm();
            return tail_integral(
                [&](double s) {
                    const double w = cm->Omega(k, s, x);
                    return w * w * yk;
                },
                t, o);
        });
    }

    std::vector<DecayGain> G(static_cast<std::size_t>(n));
    for (int k = 1; k <= n - 1; ++k) {
        ExcitationProbe probe;
        probe.dim = dx;
        for (int c = 0; c < config.blocks[static_cast<std::size_t>(k - 1)].stateDim; ++c) {
            probe.split.push_back(cm->off[static_cast<std::size_t>(k - 1)] + c);
        }
        probe.phi = [cm, k](double t, const Vector& x) {
            Vector out(1);
            out(0) = cm->Omega(k, t, x);
            return out;
        };
        probe.tBegin = 0.0;
        probe.tEnd   = o.profileHorizon;
        probe.tStep  = o.profileStep;
        PEProfile prof;
        G[static_cast<std::size_t>(k)] = decay_gain_for(probe, o, prof, "channel product " + std::to_string(k));
        fam.profiles.push_back(prof);
    }

    auto yn = [cm](const Vector& X) {
        return cm->y(X, cm->n).norm();
    };
    auto sn = [cm](const Vector& X) {
        return cm->config.sigma.sigma(cm->y(X, cm->n)).norm();
    };
    // phi_k read from psi
    auto ph = [](const Vector& ps, int k) {
        return std::abs(ps(k - 1));
    };
    auto rootSum = [n, ph](const Vector& ps) {
        double s = 0.0;
        for (int l = 1; l <= n - 1; ++l) {
            s += std::pow(ph(ps, l), 1.0 / (n - l));
        }
        return s;
    };
    auto c = [&config](int i) {
        return config.blocks[static_cast<std::size_t>(i - 1)].c;
    };

    std::vector<BoundTerm> terms(static_cast<std::size_t>(fam.j));
    terms[0].negative = [cm](const Vector& X, const Vector&) {
        return cm->config.sigma.rho(cm->y(X, cm->n).norm());
    };
    terms[0].formula = "-rho(|y_n|)";
    {
        const double cn   = c(n);
        terms[1].negative = [cn, ph, n](const Vector&, const Vector& ps) {
            return cn * ph(ps, n - 1) * ph(ps, n - 1);
        };
        terms[1].positive = [yn, sn](const Vector& X, const Vector&) {
            return yn(X) + sn(X);
        };
        terms[1].formula = "-c_n phi_(n-1)^2 + nu (|y_n| + |sigma(y_n)|)";
    }
    {
        const double cc   = c(n - 1);
        terms[2].negative = [cc, ph, n](const Vector&, const Vector& ps) {
            return cc * ph(ps, n - 2) * ph(ps, n - 2);
        };
        terms[2].positive = [yn, ph, n](const Vector& X, const Vector& ps) {
            return yn(X) + ph(ps, n - 1);
        };
        terms[2].formula = "-c_(n-1) phi_(n-2)^2 + nu (|y_n| + phi_(n-1))";
    }
    for (int i = 4; i <= n; ++i) {
        const double cc = c(n - i + 2);
        auto& t         = terms[static_cast<std::size_t>(i - 1)];
        t.negative      = [cc, ph, n, i](const Vector&, const Vector& ps) {
            return cc * ph(ps, n - i + 1) * ph(ps, n - i + 1);
        };
        t.positive = [ph, n, i](const Vector&, const Vector& ps) {
            return ph(ps, n - i + 2) + ph(ps, n - i + 3);
        };
        t.formula = "-c phi_(n-i+1)^2 + nu (phi_(n-i+2) + phi_(n-i+3))";
    }
    for (int i = 1; i <= n - 1; ++i) {
        auto& t    = terms[static_cast<std::size_t>(n + i - 1)];
        t.negative = [dx, i](const Vector& X, const Vector&) {
            return X(dx + i - 1) * X(dx + i - 1);
        };
        t.positive = [yn, sn, rootSum](const Vector& X, const Vector& ps) {
            return yn(X) + sn(X) + rootSum(ps);
        };
        t.formula = "-zeta_" + std::to_string(i) + "^2 + nu (|y_n| + |sigma(y_n)| + sum phi_l^(1/(n-l)))";
    }
    for (int i = 1; i <= n - 1; ++i) {
        const int k = n - i;
        auto& t     = terms[static_cast<std::size_t>(2 * n - 2 + i)];
        t.negative  = [cm, g = G[static_cast<std::size_t>(k)], k](const Vector& X, const Vector&) {
            return g(cm->block(X, k).norm()) * cm->y(X, k).squaredNorm();
        };
        t.positive = [cm, yn, sn, rootSum, ph, k, i, dx, n](const Vector& X, const Vector& ps) {
            double s = std::pow(ph(ps, k), 2.0 / i) + yn(X) + sn(X) + rootSum(ps);
            for (int l = 1; l <= n - 1; ++l) {
                s += std::abs(X(dx + l - 1));
            }
            for (int b = k + 1; b <= n; ++b) {
                s += cm->block(X, b).norm();
            }
            return s;
        };
        t.formula = "-gamma_" + std::to_string(k) + "(|x_" + std::to_string(k) + "|) |y_" + std::to_string(k) +
                    "|^2 + nu (phi_" + std::to_string(k) + "^(2/" + std::to_string(i) +
                    ") + |y_n| + |sigma(y_n)| + sum phi_l^(1/(n-l)) + sum |zeta_l| + sum_(b>" + std::to_string(k) +
                    ") |x_b|)";
    }

    fam.Y.assign(static_cast<std::size_t>(fam.j), BoundFn{});
    estimate_constants(fam, terms, o);
    attach_bounds(fam, std::move(terms));
    fam.validate();
    return fam;
}

} // namespace matrosov
