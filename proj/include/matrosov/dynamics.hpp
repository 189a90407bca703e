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
#ifndef MATROSOV_DYNAMICS_HPP
#define MATROSOV_DYNAMICS_HPP

#include "matrosov/types.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace matrosov
{

/**
 * @brief Nonautonomous vector field x' = f(t, x) on R^dim.
 */
struct TimeVaryingSystem {
    int dim = 0;
    RhsFn rhs;
    std::string label;

    /// allocating evaluation; throws std::invalid_argument on a dimension mismatch
    Vector eval(double t, const Vector& x) const;
};

/**
 * @brief Uniformly sampled solution. The last sample sits exactly at tEnd,
 * every other sample k at t0 + k*dt.
 */
struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    double tEnd = 0.0;
    std::vector<Vector> states;
    std::string label;

    std::size_t size() const
    {
        return states.size();
    }
    double time(std::size_t k) const;
};

class IntegrationError : public std::runtime_error
{
public:
    enum class Kind
    {
        Divergence,
        NonFinite
    };

    IntegrationError(Kind kind, double lastValidTime, Trajectory partial, const std::string& what);

    Kind kind() const
    {
        return m_kind;
    }
    double lastValidTime() const
    {
        return m_lastValidTime;
    }
    const Trajectory& partial() const
    {
        return m_partial;
    }

private:
    Kind m_kind;
    double m_lastValidTime;
    Trajectory m_partial;
};

struct IntegrateOptions {
    double blowUp     = 1e9; ///< Euclidean norm at which the run counts as divergent
    int recordEvery   = 1; ///< keep every n-th step in the trajectory
};

/**
 * @brief Fixed-step classical RK4 from (t0, x0) to tEnd. The final step is
 * shortened so the run ends exactly at tEnd.
 */
Trajectory integrate(const TimeVaryingSystem& system, double t0, const Vector& x0, double tEnd, double dt,
                     const IntegrateOptions& options = {});

/// same stepping, but hands every accepted state to visit(t, x) instead of storing it
void integrate_visit(const TimeVaryingSystem& system, double t0, const Vector& x0, double tEnd, double dt,
                     const std::function<void(double, const Vector&)>& visit, const IntegrateOptions& options = {});

enum class RegionKind
{
    Ball,
    Annulus
};

/// inner is ignored for balls; annuli are {inner <= |x| <= outer}
struct RegionSpec {
    RegionKind kind = RegionKind::Ball;
    int dim         = 1;
    double inner    = 0.0;
    double outer    = 1.0;

    static RegionSpec ball(int dim, double radius)
    {
        return {RegionKind::Ball, dim, 0.0, radius};
    }
    static RegionSpec annulus(int dim, double inner, double outer)
    {
        return {RegionKind::Annulus, dim, inner, outer};
    }
};

/// uniform in volume, or uniform in the radius (denser near the centre)
enum class RadialLaw
{
    Volume,
    Radius
};

/**
 * @brief Deterministic low-discrepancy points in a ball or annulus.
 *
 * Point 0 lies on the outer sphere, point 1 on the inner sphere of an annulus.
 * The remaining points are a randomly shifted Halton sequence; the shift is
 * drawn from the seed, so equal seeds give identical sets.
 */
std::vector<Vector> sample_region(const RegionSpec& region, int count, std::uint64_t seed,
                                  RadialLaw law = RadialLaw::Volume);

/// Halton points in [0,1)^dim with a seeded Cranley-Patterson rotation
std::vector<Vector> halton_points(int dim, int count, std::uint64_t seed);

} // namespace matrosov

#endif // MATROSOV_DYNAMICS_HPP
