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
#ifndef MATROSOV_CHECKS_HPP
#define MATROSOV_CHECKS_HPP

#include "matrosov/family.hpp"

#include <string>
#include <vector>

namespace matrosov
{

/// one row of violations.csv
struct Violation {
    std::string stage;
    int index = 0; ///< 1-based function index, 0 when not tied to one
    double t  = 0.0;
    double margin = 0.0;
};

/// writes "stage,index,t,margin"
void write_violations_csv(const std::vector<Violation>& rows, std::ostream& out);

/// (X, psi) pair of family coordinates and signal values
struct SamplePair {
    Vector X;
    Vector psi;
};

/**
 * @brief Samples of region x B(psiRadius). Every second pair has a random
 * subset of X and psi coordinates set to zero, half of those also have a
 * subset shrunk by one log-uniform factor in [1e-8, 1], so that thin level
 * sets of the bounds are visited at every scale.
 */
std::vector<SamplePair> sample_pairs(const AuxiliaryFamily& family, int count, double psiRadius, std::uint64_t seed);

struct DerivativeBoundOptions {
    int trajectories   = 10;
    double dt          = 1e-2;
    double horizon     = 10.0;
    double tol         = -1.0; ///< negative means 10 dt
    double icRadius    = -1.0; ///< negative means Delta / 2
    std::vector<double> t0 = {0.0};
    std::uint64_t seed = 21;
    int maxViolations  = 1000;
};

struct DerivativeBoundReport {
    bool pass = false;
    std::vector<double> worstMargin; ///< max over checked points of Vdot_i - Y_i
    std::size_t checkedPoints = 0;
    int skippedTrajectories   = 0; ///< trajectories truncated when they left the region
    std::vector<Violation> violations;
    std::vector<std::string> notes;
};

/// Vdot_i - Y_i(X, phi) along plant trajectories started in the region
DerivativeBoundReport check_derivative_bounds(const AuxiliaryFamily& family, const DerivativeBoundOptions& options = {});

/// same check along given plant-state trajectories
DerivativeBoundReport check_derivative_bounds(const AuxiliaryFamily& family, const std::vector<Trajectory>& trajectories,
                                              double tol);

struct ChainLevel {
    double eta = 0.0;
    std::size_t members = 0; ///< samples in the predicate set
    double supY = 0.0; ///< largest Y_k on the predicate set, -inf when vacuous
};

struct ChainStep {
    int k = 0;
    std::vector<ChainLevel> levels; ///< in the order of the eta list
    double slack     = 0.0; ///< C with max(0, sup Y_k) = C eta at the smallest eta
    double limit     = 0.0; ///< extrapolated sup Y_k as eta -> 0
    double rate      = 0.0; ///< log-log slope of sup Y_k over the last two levels
    bool vacuous     = false;
    bool pass        = false;
};

struct ChainReport {
    bool pass = false;
    std::vector<double> etas;
    std::vector<ChainStep> steps;
};

struct ChainOptions {
    std::vector<double> etas = {1e-1, 1e-2, 1e-3};
    int samples              = 200000;
    double psiRadius         = -1.0; ///< negative means the family mu
    std::uint64_t seed       = 31;
};

/**
 * @brief Y_k <= eta' on {|Y_i| <= eta for i < k}. A step passes when the
 * positive part of sup Y_k is at most the smallest eta, or when it decreases
 * with eta and either its extrapolated limit is at most half its last value
 * or it falls at least like sqrt(eta) over the last two levels.
 */
ChainReport check_nonpositivity_chain(const AuxiliaryFamily& family, const ChainOptions& options = {});
ChainReport check_nonpositivity_chain(const AuxiliaryFamily& family, const std::vector<SamplePair>& samples,
                                      const std::vector<double>& etas);

struct ZeroLocusReport {
    bool pass = false;
    std::vector<double> etas;
    std::vector<double> radius; ///< largest |X| with all |Y_i| <= eta
    std::vector<std::size_t> members;
    double limit = 0.0; ///< extrapolated radius as eta -> 0
};

/// passes when the radius does not grow as eta shrinks and ends below a third of its first value
ZeroLocusReport check_zero_locus(const AuxiliaryFamily& family, const ChainOptions& options = {});
ZeroLocusReport check_zero_locus(const AuxiliaryFamily& family, const std::vector<SamplePair>& samples,
                                 const std::vector<double>& etas);

/// Aitken extrapolation of the last three entries; the last entry when fewer or degenerate
double aitken_limit(const std::vector<double>& s);

} // namespace matrosov

#endif // MATROSOV_CHECKS_HPP
