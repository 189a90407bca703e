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
#ifndef MATROSOV_GAINS_HPP
#define MATROSOV_GAINS_HPP

#include "matrosov/checks.hpp"

#include <stdexcept>
#include <vector>

namespace matrosov
{

/**
 * @brief Weights K_1..K_(j-1) with Z = sum K_i Y_i + Y_j <= -epsilon / 2^(j-1)
 * on delta <= |X|, X in the region, |psi| <= mu.
 */
struct GainCertificate {
    std::vector<double> K;
    std::vector<int> exponents; ///< K_i = 2^exponents[i]
    double epsilon    = 0.0;
    double delta      = 0.0;
    double Delta      = 0.0;
    double eta        = 0.0; ///< mu (1 + sum K_i)
    double Tpredicted = 0.0;
    std::size_t samples = 0; ///< samples of the construction set
    bool reverified     = false;
    double reverifyWorst = 0.0; ///< max of Z + epsilon / 2^(j-1) on the fresh samples
    std::size_t reverifySamples = 0;
    int rounds = 1; ///< construction passes; round r re-verifies with reverifySeed + r - 1

    double Z(const AuxiliaryFamily& family, const Vector& X, const Vector& psi) const;
};

/// raised when no certificate exists on the samples; witness is the offending pair
class GainSearchError : public std::runtime_error
{
public:
    GainSearchError(const std::string& what, int step, SamplePair witness)
        : std::runtime_error(what)
        , m_step(step)
        , m_witness(std::move(witness))
    {
    }
    int step() const
    {
        return m_step;
    }
    const SamplePair& witness() const
    {
        return m_witness;
    }

private:
    int m_step;
    SamplePair m_witness;
};

struct GainOptions {
    int samples         = 200000;
    double psiRadius    = -1.0; ///< negative means the family mu
    double predicateTol = 1e-24; ///< |Y_i| <= predicateTol counts as Y_i = 0
    int maxExponent     = 128; ///< ladder 1, 2, 4, ..., 2^maxExponent
    double margin       = 0.01; ///< Tpredicted = 2^j eta / epsilon (1 + margin)
    std::uint64_t seed  = 41;
    std::uint64_t reverifySeed = 4141;
    int refineRounds    = 4; ///< fresh violators join the construction set and the search restarts
};

GainCertificate find_matrosov_gains(const AuxiliaryFamily& family, double delta, const GainOptions& options = {});

/// construction on given samples of the annulus; no fresh re-verification
GainCertificate find_matrosov_gains(const AuxiliaryFamily& family, double delta, const std::vector<SamplePair>& samples,
                                    const GainOptions& options);

/// pairs with |X| >= delta drawn until count are collected
std::vector<SamplePair> sample_annulus_pairs(const AuxiliaryFamily& family, double delta, int count, double psiRadius,
                                             std::uint64_t seed);

} // namespace matrosov

#endif // MATROSOV_GAINS_HPP
