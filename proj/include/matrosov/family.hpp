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
#ifndef MATROSOV_FAMILY_HPP
#define MATROSOV_FAMILY_HPP

#include "matrosov/excitation.hpp"

#include <string>
#include <vector>

namespace matrosov
{

/// Y(X, psi)
using BoundFn = std::function<double(const Vector& X, const Vector& psi)>;

/**
 * @brief One derivative bound written as Y = -negative + nu * positive.
 * positive is empty for bounds without a nu term.
 */
struct BoundTerm {
    BoundFn negative;
    BoundFn positive;
    double nu = 0.0;
    std::string formula;
};

/**
 * @brief Auxiliary functions V_1..V_j with derivative bounds Y_1..Y_j, the
 * time-varying signal phi and the constant mu.
 *
 * X are family coordinates; toFamily / toPlant map between them and the
 * plant state (identity unless the family changes variables).
 */
struct AuxiliaryFamily {
    std::string label;
    int j        = 0;
    int m        = 0;
    int stateDim = 0;
    double Delta = 0.0;
    double mu    = 0.0;

    std::vector<ScalarField> V;
    VectorField phi;
    std::vector<BoundFn> Y;
    std::vector<BoundTerm> terms; ///< same length as Y when the family was built from terms

    TimeVaryingSystem plant;
    VectorField toFamily;
    VectorField toPlant;
    std::vector<int> regionBlocks; ///< the region is a product of Delta-balls over these consecutive blocks of X

    std::vector<PEProfile> profiles; ///< excitation profiles behind the integral-type functions
    std::vector<std::string> notes;

    double evalY(int i, const Vector& X, const Vector& psi) const
    {
        return Y[static_cast<std::size_t>(i)](X, psi);
    }
    std::vector<double> nu() const;
    /// largest block norm of X; X lies in the region iff this is <= Delta
    double regionNorm(const Vector& X) const;
    void validate() const;
};

/// turns terms into Y functions and fills the family's Y list
void attach_bounds(AuxiliaryFamily& family, std::vector<BoundTerm> terms);

struct FamilyOptions {
    double Delta        = 2.0;
    int nuSamples       = 20000;
    int muSamples       = 100000; ///< mu needs no derivatives, so it gets its own larger sample
    double nuInflation  = 1.1;
    double muInflation  = 1.1;
    double timeWindow   = 4.0 * 3.14159265358979323846; ///< t samples for the constants lie in [0, timeWindow]
    double truncation   = 30.0; ///< tail length of the integral-type functions
    int panels          = 60;
    GainMode gainMode   = GainMode::ClosedForm;
    int profileRadii    = 32;
    double profileSmallest = 1e-4;
    double profileHorizon  = 20.0;
    double profileStep     = 1e-2;
    double windowMax       = 2.0 * 3.14159265358979323846;
    double windowStep      = 0.05;
    double fdStep          = 1e-5;
    std::uint64_t seed     = 3;
};

/// chained form with states (x1, x2, x3); heat must have dim 2 and restrictedDim 1
AuxiliaryFamily aux_family_chained3(const HeatFunction& heat, const FamilyOptions& options = {});

/// skew plant with m >= 2; the m = 2 instance has the same shape as the chained3 family
AuxiliaryFamily aux_family_skew(int m, const std::vector<double>& k, const HeatFunction& heat,
                                const FamilyOptions& options = {});

/// channel network in coordinates (x, zeta); needs n >= 3 blocks
AuxiliaryFamily aux_family_channels(const ChannelNetworkConfig& config, const FamilyOptions& options = {});

/**
 * @brief Derivative of V(t, toFamily(t, s)) along the plant, by a centred
 * difference in the direction (1, f(t, s)).
 */
double directional_derivative(const AuxiliaryFamily& family, int i, double t, const Vector& plantState,
                              double step = 1e-5);

/// largest sampled max(|V_i|, |phi|) over [0, tWindow] x region; used to validate mu
double sampled_mu(const AuxiliaryFamily& family, int samples, double tWindow, std::uint64_t seed);

/// family coordinates sampled in the family region (balls per factor for channel families)
std::vector<Vector> sample_family_region(const AuxiliaryFamily& family, int count, std::uint64_t seed,
                                         RadialLaw law = RadialLaw::Radius);

} // namespace matrosov

#endif // MATROSOV_FAMILY_HPP
