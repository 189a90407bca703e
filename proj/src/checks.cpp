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

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace matrosov
{

void write_violations_csv(const std::vector<Violation>& rows, std::ostream& out)
{
    out << "stage,index,t,margin\n";
    out << std::setprecision(12);
    for (const auto& r : rows) {
        out << r.stage << ',' << r.index << ',' << r.t << ',' << r.margin << '\n';
    }
}

std::vector<SamplePair> sample_pairs(const AuxiliaryFamily& family, int count, double psiRadius, std::uint64_t seed)
{
    if (count < 1) {
        throw std::invalid_argument("sample_pairs needs a positive count");
    }
    const int psiDim = family.m;
    const auto Xs    = sample_family_region(family, count, seed);
    std::vector<Vector> psis;
    if (psiDim > 0) {
        psis = sample_region(RegionSpec::ball(psiDim, psiRadius), count, seed + 7, RadialLaw::Radius);
    }
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> pick(0, 2);
    std::uniform_real_distribution<double> decades(0.0, 8.0);
    // odd samples: coordinates zeroed at random; every second odd sample also
    // shrinks a random subset by one log-uniform factor, approaching the zero
    // locus along rays so that all eta levels are populated
    auto enrich = [&](Vector& v, bool multiScale, double factor) {
        for (Eigen::Index c = 0; c < v.size(); ++c) {
            const int action = multiScale ? pick(rng) : (coin(rng) ? 0 : 2);
            if (action == 0) {
                v(c) = 0.0;
            }
            else if (action == 1) {
                v(c) *= factor;
            }
        }
    };
    std::vector<SamplePair> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        SamplePair p{Xs[static_cast<std::size_t>(k)], psiDim > 0 ? psis[static_cast<std::size_t>(k)] : Vector(0)};
        if (k % 2 == 1) {
            const bool multiScale = k % 4 == 3;
            const double factor   = std::pow(10.0, -decades(rng));
            enrich(p.X, multiScale, factor);
            enrich(p.psi, multiScale, factor);
        }
        out.push_back(std::move(p));
    }
    return out;
}

// ---------------------------------------------------------------------------

DerivativeBoundReport check_derivative_bounds(const AuxiliaryFamily& family, const std::vector<Trajectory>& trajectories,
                                              double tol)
{
    DerivativeBoundReport rep;
    rep.worstMargin.assign(static_cast<std::size_t>(family.j), -std::numeric_limits<double>::infinity());
    const int maxViolations = 1000;
    for (std::size_t tr = 0; tr < trajectories.size(); ++tr) {
        const auto& traj = trajectories[tr];
        const std::size_t N = traj.size();
        if (N < 3) {
            continue;
        }
        // family coordinates and the end of the in-region prefix
        std::vector<Vector> X(N);
        std::size_t inside = N;
        for (std::size_t k = 0; k < N; ++k) {
            X[k] = family.toFamily(traj.time(k), traj.states[k]);
            if (family.regionNorm(X[k]) > family.Delta) {
                inside = k;
                break;
            }
        }
        if (inside < N) {
            ++rep.skippedTrajectories;
            std::ostringstream msg;
            msg << "trajectory " << tr << " leaves the region at t = " << traj.time(inside) << "; checked up to there";
            rep.notes.push_back(msg.str());
        }
        for (std::size_t k = 1; k + 1 < inside; ++k) {
            const double tm = traj.time(k - 1);
            const double t  = traj.time(k);
            const double tp = traj.time(k + 1);
            const Vector psi = family.phi(t, X[k]);
            for (int i = 0; i < family.j; ++i) {
                const auto& V     = family.V[static_cast<std::size_t>(i)];
                const double vdot = (V(tp, X[k + 1]) - V(tm, X[k - 1])) / (tp - tm);
                const double m    = vdot - family.evalY(i, X[k], psi);
                auto& w           = rep.worstMargin[static_cast<std::size_t>(i)];
                w                 = std::max(w, m);
                if (m > tol && static_cast<int>(rep.violations.size()) < maxViolations) {
                    rep.violations.push_back({"derivative-bounds", i + 1, t, m});
                }
            }
            ++rep.checkedPoints;
        }
    }
    rep.pass = rep.checkedPoints > 0;
    for (double w : rep.worstMargin) {
        if (w > tol) {
            rep.pass = false;
        }
    }
    if (rep.checkedPoints == 0) {
        rep.notes.push_back("no trajectory points inside the region");
    }
    return rep;
}

DerivativeBoundReport check_derivative_bounds(const AuxiliaryFamily& family, const DerivativeBoundOptions& o)
{
    if (o.trajectories < 1 || !(o.dt > 0.0) || !(o.horizon > 0.0) || o.t0.empty()) {
        throw std::invalid_argument("derivative-bound check needs trajectories, a positive step and horizon, and t0");
    }
    const double tol    = o.tol < 0.0 ? 10.0 * o.dt : o.tol;
    const double radius = o.icRadius < 0.0 ? 0.5 * family.Delta : o.icRadius;
    AuxiliaryFamily shrunk = family;
    shrunk.Delta           = radius;
    const auto ics         = sample_family_region(shrunk, o.trajectories, o.seed);
    std::vector<Trajectory> trajs;
    for (double t0 : o.t0) {
        for (const auto& X0 : ics) {
            const Vector s0 = family.toPlant(t0, X0);
            try {
                trajs.push_back(integrate(family.plant, t0, s0, t0 + o.horizon, o.dt));
            }
            catch (const IntegrationError& e) {
                trajs.push_back(e.partial());
            }
        }
    }
    auto rep = check_derivative_bounds(family, trajs, tol);
    if (static_cast<int>(rep.violations.size()) > o.maxViolations) {
        rep.violations.resize(static_cast<std::size_t>(o.maxViolations));
    }
    return rep;
}

// ---------------------------------------------------------------------------

double aitken_limit(const std::vector<double>& s)
{
    if (s.empty()) {
        return 0.0;
    }
    if (s.size() < 3) {
        return s.back();
    }
    const double a = s[s.size() - 3];
    const double b = s[s.size() - 2];
    const double c = s[s.size() - 1];
    const double d = (c - b) - (b - a);
    if (std::abs(d) < 1e-300 || !std::isfinite(d)) {
        return c;
    }
    const double lim = c - (c - b) * (c - b) / d;
    return std::isfinite(lim) ? lim : c;
}

namespace
{

std::vector<std::vector<double>> evaluate_bounds(const AuxiliaryFamily& family, const std::vector<SamplePair>& samples)
{
    std::vector<std::vector<double>> Y(samples.size(), std::vector<double>(static_cast<std::size_t>(family.j)));
    for (std::size_t s = 0; s < samples.size(); ++s) {
        for (int i = 0; i < family.j; ++i) {
            Y[s][static_cast<std::size_t>(i)] = family.evalY(i, samples[s].X, samples[s].psi);
        }
    }
    return Y;
}

void check_etas(const std::vector<double>& etas)
{
    if (etas.empty()) {
        throw std::invalid_argument("eta list is empty");
    }
    for (std::size_t i = 0; i < etas.size(); ++i) {
        if (!(etas[i] > 0.0) || (i > 0 && !(etas[i] < etas[i - 1]))) {
            throw std::invalid_argument("eta levels must be positive and strictly decreasing");
        }
    }
}

double psi_radius(const AuxiliaryFamily& family, double r)
{
    return r < 0.0 ? family.mu : r;
}

} // namespace

ChainReport check_nonpositivity_chain(const AuxiliaryFamily& family, const std::vector<SamplePair>& samples,
                                      const std::vector<double>& etas)
{
    check_etas(etas);
    const auto Y = evaluate_bounds(family, samples);
    ChainReport rep;
    rep.etas = etas;
    rep.pass = true;
    for (int k = 0; k < family.j; ++k) {
        ChainStep step;
        step.k = k + 1;
        std::vector<double> plus;
        bool anyMember = false;
        for (double eta : etas) {
            ChainLevel lv;
            lv.eta  = eta;
            lv.supY = -std::numeric_limits<double>::infinity();
            for (const auto& row : Y) {
                bool in = true;
                for (int i = 0; i < k && in; ++i) {
                    in = std::abs(row[static_cast<std::size_t>(i)]) <= eta;
                }
                if (in) {
                    ++lv.members;
                    lv.supY = std::max(lv.supY, row[static_cast<std::size_t>(k)]);
                }
            }
            anyMember = anyMember || lv.members > 0;
            plus.push_back(lv.members > 0 ? std::max(0.0, lv.supY) : 0.0);
            step.levels.push_back(lv);
        }
        step.vacuous = !anyMember;
        step.slack   = plus.back() / etas.back();
        step.limit   = aitken_limit(plus);
        if (plus.back() <= etas.back()) {
            step.pass = true;
        }
        else {
            bool monotone = true;
            for (std::size_t l = 1; l < plus.size(); ++l) {
                monotone = monotone && plus[l] <= plus[l - 1];
            }
            double slope = 0.0;
            if (plus.size() >= 2 && plus[plus.size() - 2] > 0.0) {
                slope = std::log(plus[plus.size() - 2] / plus.back()) /
                        std::log(etas[etas.size() - 2] / etas.back());
            }
            step.rate = slope;
            step.pass = monotone && (step.limit <= 0.5 * plus.back() || slope >= 0.5);
        }
        rep.pass = rep.pass && step.pass;
        rep.steps.push_back(step);
    }
    return rep;
}

ChainReport check_nonpositivity_chain(const AuxiliaryFamily& family, const ChainOptions& o)
{
    const auto samples = sample_pairs(family, o.samples, psi_radius(family, o.psiRadius), o.seed);
    return check_nonpositivity_chain(family, samples, o.etas);
}

ZeroLocusReport check_zero_locus(const AuxiliaryFamily& family, const std::vector<SamplePair>& samples,
                                 const std::vector<double>& etas)
{
    check_etas(etas);
    const auto Y = evaluate_bounds(family, samples);
    ZeroLocusReport rep;
    rep.etas = etas;
    for (double eta : etas) {
        double r          = 0.0;
        std::size_t count = 0;
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const bool in = std::all_of(Y[s].begin(), Y[s].end(), [eta](double y) {
                return std::abs(y) <= eta;
            });
            if (in) {
                ++count;
                r = std::max(r, samples[s].X.norm());
            }
        }
        rep.radius.push_back(r);
        rep.members.push_back(count);
    }
    rep.limit     = aitken_limit(rep.radius);
    bool monotone = true;
    for (std::size_t l = 1; l < rep.radius.size(); ++l) {
        monotone = monotone && rep.radius[l] <= rep.radius[l - 1];
    }
    const double first = rep.radius.front();
    rep.pass           = monotone && (first == 0.0 || rep.radius.back() < first / 3.0);
    return rep;
}

ZeroLocusReport check_zero_locus(const AuxiliaryFamily& family, const ChainOptions& o)
{
    const auto samples = sample_pairs(family, o.samples, psi_radius(family, o.psiRadius), o.seed);
    return check_zero_locus(family, samples, o.etas);
}

} // namespace matrosov
