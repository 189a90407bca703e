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
#include "matrosov/gains.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace matrosov
{

double GainCertificate::Z(const AuxiliaryFamily& family, const Vector& X, const Vector& psi) const
{
    double z = family.evalY(family.j - 1, X, psi);
    for (std::size_t i = 0; i < K.size(); ++i) {
        z += K[i] * family.evalY(static_cast<int>(i), X, psi);
    }
    return z;
}

std::vector<SamplePair> sample_annulus_pairs(const AuxiliaryFamily& family, double delta, int count, double psiRadius,
                                             std::uint64_t seed)
{
    std::vector<SamplePair> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int round = 0; round < 16 && static_cast<int>(out.size()) < count; ++round) {
        for (auto& p : sample_pairs(family, 2 * count, psiRadius, seed + 977 * round)) {
            if (p.X.norm() >= delta && static_cast<int>(out.size()) < count) {
                out.push_back(std::move(p));
            }
        }
    }
    if (out.empty()) {
        throw std::invalid_argument("no samples with |X| >= delta; delta exceeds the region");
    }
    return out;
}

GainCertificate find_matrosov_gains(const AuxiliaryFamily& family, double delta, const std::vector<SamplePair>& samples,
                                    const GainOptions& o)
{
    if (!(delta > 0.0) || !(delta < family.Delta)) {
        throw std::invalid_argument("gain search needs 0 < delta < Delta");
    }
    const int j = family.j;
    const std::size_t N = samples.size();
    std::vector<std::vector<double>> Y(N, std::vector<double>(static_cast<std::size_t>(j)));
    for (std::size_t s = 0; s < N; ++s) {
        for (int i = 0; i < j; ++i) {
            Y[s][static_cast<std::size_t>(i)] = family.evalY(i, samples[s].X, samples[s].psi);
        }
    }
    // first index i with |Y_i| > tol; membership in pred(l) is zeroPrefix >= l - 1
    std::vector<int> zeroPrefix(N, j);
    for (std::size_t s = 0; s < N; ++s) {
        for (int i = 0; i < j; ++i) {
            if (std::abs(Y[s][static_cast<std::size_t>(i)]) > o.predicateTol) {
                zeroPrefix[s] = i;
                break;
            }
        }
    }

    GainCertificate cert;
    cert.delta   = delta;
    cert.Delta   = family.Delta;
    cert.samples = N;

    // epsilon on {Y_i = 0, i < j}
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t worstAt = N;
    for (std::size_t s = 0; s < N; ++s) {
        if (zeroPrefix[s] >= j - 1) {
            const double y = Y[s][static_cast<std::size_t>(j - 1)];
            if (y > worst) {
                worst   = y;
                worstAt = s;
            }
        }
    }
    if (worstAt == N) {
        throw GainSearchError("no sample has Y_1 = ... = Y_(j-1) = 0; epsilon cannot be located", j, SamplePair{});
    }
    if (!(worst < 0.0)) {
        std::ostringstream msg;
        msg << "no epsilon > 0: Y_" << j << " reaches " << worst << " where the preceding bounds vanish";
        throw GainSearchError(msg.str(), j, samples[worstAt]);
    }
    cert.epsilon = -worst;

    std::vector<double> Yt(N);
    for (std::size_t s = 0; s < N; ++s) {
        Yt[s] = Y[s][static_cast<std::size_t>(j - 1)];
    }
    double epsT = cert.epsilon;
    cert.K.assign(static_cast<std::size_t>(std::max(j - 1, 0)), 0.0);
    cert.exponents.assign(cert.K.size(), 0);
    for (int l = j; l >= 2; --l) {
        const auto prev = static_cast<std::size_t>(l - 2); // index of Y_(l-1)
        double lower    = 0.0;
        double upper    = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < N; ++s) {
            if (zeroPrefix[s] < l - 2) {
                continue;
            }
            const double need = Yt[s] + 0.5 * epsT;
            const double y    = Y[s][prev];
            if (y < 0.0) {
                lower = std::max(lower, need / -y);
            }
            else if (y > 0.0) {
                upper = std::min(upper, -need / y);
            }
            else if (need > 0.0) {
                std::ostringstream msg;
                msg << "step " << l << ": Y_" << l - 1 << " vanishes where the running bound is " << Yt[s];
                throw GainSearchError(msg.str(), l, samples[s]);
            }
        }
        int e = 0;
        while (e <= o.maxExponent && std::ldexp(1.0, e) < lower) {
            ++e;
        }
        if (e > o.maxExponent || std::ldexp(1.0, e) > upper) {
            std::ostringstream msg;
            msg << "step " << l << ": no ladder value in [" << lower << ", " << upper << "] for K_" << l - 1;
            throw GainSearchError(msg.str(), l, SamplePair{});
        }
        const double K  = std::ldexp(1.0, e);
        cert.K[prev]         = K;
        cert.exponents[prev] = e;
        for (std::size_t s = 0; s < N; ++s) {
            Yt[s] += K * Y[s][prev];
        }
        epsT *= 0.5;
    }

    double sumK = 0.0;
    for (double k : cert.K) {
        sumK += k;
    }
    cert.eta        = family.mu * (1.0 + sumK);
    cert.Tpredicted = std::ldexp(1.0, j) * cert.eta / cert.epsilon * (1.0 + o.margin);
    return cert;
}

GainCertificate find_matrosov_gains(const AuxiliaryFamily& family, double delta, const GainOptions& o)
{
    const double psiR = o.psiRadius < 0.0 ? family.mu : o.psiRadius;
    auto build        = sample_annulus_pairs(family, delta, o.samples, psiR, o.seed);
    const double base = -1.0 / std::ldexp(1.0, family.j - 1);
    GainCertificate cert;
    for (int round = 1; round <= std::max(o.refineRounds, 1); ++round) {
        cert              = find_matrosov_gains(family, delta, build, o);
        cert.rounds       = round;
        const auto fresh  = sample_annulus_pairs(family, delta, o.samples, psiR,
                                                 o.reverifySeed + static_cast<std::uint64_t>(round - 1));
        const double target = base * cert.epsilon;
        cert.reverifyWorst  = -std::numeric_limits<double>::infinity();
        std::vector<SamplePair> violators;
        for (const auto& p : fresh) {
            const double excess = cert.Z(family, p.X, p.psi) - target;
            cert.reverifyWorst  = std::max(cert.reverifyWorst, excess);
            if (excess > 0.0) {
                violators.push_back(p);
            }
        }
        cert.reverifySamples = fresh.size();
        cert.reverified      = violators.empty();
        if (cert.reverified) {
            break;
        }
        build.insert(build.end(), violators.begin(), violators.end());
    }
    return cert;
}

} // namespace matrosov
