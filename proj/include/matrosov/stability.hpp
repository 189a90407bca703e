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
#ifndef MATROSOV_STABILITY_HPP
#define MATROSOV_STABILITY_HPP

#include "matrosov/excitation.hpp"

#include <optional>
#include <string>
#include <vector>

namespace matrosov
{

struct StabilityWitness {
    double t0 = 0.0;
    Vector x0;
    double t = 0.0; ///< time of the event
    double value = 0.0; ///< |x| at the event
    std::string reason;
};

struct EnvelopeEntry {
    double radius = 0.0;
    double bound  = 0.0; ///< max over t0 and batch of sup |x(t)|
    std::vector<double> perT0; ///< sup |x(t)| per t0
    double spread = 0.0; ///< (max - min) / max over t0
};

struct SettlingEntry {
    double radius = 0.0;
    double sigma  = 0.0;
    double t0     = 0.0;
    std::optional<double> T; ///< empty when the batch does not settle within the horizon
};

struct StabilityReport {
    std::vector<EnvelopeEntry> gammaEnvelope;
    std::vector<SettlingEntry> settlingTimes;
    bool uniform  = false;
    bool diverged = false;
    std::optional<double> uniformT; ///< one T valid for every t0 (attractivity only)
    double spread = 0.0; ///< relative spread of T (or of the envelope) across t0
    std::vector<StabilityWitness> witnesses;
    std::uint64_t seed = 0;
};

struct StabilityOptions {
    int icCount        = 27;
    double dt          = 1e-2;
    std::uint64_t seed = 51;
    double blowUp      = 1e9;
    double uniformTol  = 0.05; ///< relative envelope spread accepted as uniform
    std::vector<Vector> ics; ///< explicit unit-ball ICs scaled by the radius; overrides icCount when set
};

/// IC batch of norm <= r: explicit ICs scaled by r, or a seeded ball sample whose first point is on the sphere
std::vector<Vector> ic_batch(int dim, double r, const StabilityOptions& options);

/// envelope of sup-norms per radius; uniform when the spread across t0 is below uniformTol for every radius
StabilityReport verify_ugs(const TimeVaryingSystem& plant, const std::vector<double>& radii,
                           const std::vector<double>& t0grid, double horizon, const StabilityOptions& options = {});

/**
 * @brief Per t0, the first time after which every batch trajectory stays in
 * |x| <= sigma. uniformT is the largest of them when all exist.
 */
StabilityReport verify_uga(const TimeVaryingSystem& plant, double r, double sigma, const std::vector<double>& t0grid,
                           double horizon, const StabilityOptions& options = {});

/// the batch trajectories of one t0, for export
std::vector<Trajectory> simulate_batch(const TimeVaryingSystem& plant, double r, double t0, double horizon,
                                       const StabilityOptions& options = {});

struct NecessityOptions {
    double tBegin   = 0.0;
    double tEnd     = 50.0;
    double tStep    = 1e-2;
    double T        = 2.0 * 3.14159265358979323846;
    double mu       = 1e-3;
    double delta    = 0.0;
    double truncation = 30.0;
    int panels      = 60;
    double fdStep   = 1e-6;
    double identityTol = 1e-9;
};

struct NecessityReport {
    bool pass = false;
    bool udpePass = false;
    bool identityPass = false;
    int block = 0;
    double identityError = 0.0; ///< largest relative error of the factorisation
    std::vector<UdpeVerdict> verdicts; ///< one per point
};

/**
 * @brief Vector field of the channel network in coordinates (zeta, x) on the
 * set zeta = 0, x_(i+1) = ... = x_n = 0: window test of its norm with respect
 * to x_i and the factorisation F = (gTilde_i ... gTilde_(n-1)) R.
 */
NecessityReport check_necessity_vector_field(const ChannelNetworkConfig& config, int block,
                                             const std::vector<Vector>& points, const NecessityOptions& options = {});

/// F(t, s) of the check above, stacked as (zeta part, x part)
Vector channel_field_on_set(const ChannelNetworkConfig& config, const std::vector<SteadyStateGain>& omega, double t,
                            const Vector& x, double fdStep = 1e-6);

} // namespace matrosov

#endif // MATROSOV_STABILITY_HPP
