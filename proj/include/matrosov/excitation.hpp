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
#ifndef MATROSOV_EXCITATION_HPP
#define MATROSOV_EXCITATION_HPP

#include "matrosov/plants.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace matrosov
{

/**
 * @brief Signal phi(t, x) examined on [tBegin, tEnd] with grid step tStep.
 * split lists the coordinates of x that must be nonzero (the excited part).
 */
struct ExcitationProbe {
    VectorField phi;
    int dim = 1; ///< dimension of x
    std::vector<int> split; ///< empty means all coordinates
    double tBegin = 0.0;
    double tEnd   = 20.0;
    double tStep  = 1e-2;

    /// wraps a scalar signal; split defaults to every coordinate of a dim-dimensional x
    static ExcitationProbe scalar(ScalarField f, int dim, double tBegin, double tEnd, double tStep = 1e-2);
};

struct UdpeOptions {
    int neighbours     = 16; ///< sampled points of the delta-ball besides x itself
    std::uint64_t seed = 7;
    double massRelTol  = 1e-4; ///< trapezoid allowance: pass when minMass >= mu (1 - massRelTol)
};

struct UdpeVerdict {
    bool pass      = false;
    double minMass = 0.0; ///< smallest window integral found
    double witnessT = 0.0; ///< window start attaining minMass
    Vector witnessZ; ///< point attaining minMass
    double delta = 0.0;
    double T     = 0.0;
    double mu    = 0.0;
};

/**
 * @brief Window test: int_t^{t+T} |phi(s, z)| ds >= mu for all grid t and all
 * sampled z with |z - x| <= delta.
 */
UdpeVerdict check_udpe(const ExcitationProbe& probe, const Vector& x, double delta, double T, double mu,
                       const UdpeOptions& options = {});

enum class WindowSelection
{
    LargestMass, ///< mu at the longest window, theta the shortest window reaching it
    BestDecay ///< window maximising exp(-T) mu(T)^2 / T
};

enum class RadiusSpacing
{
    Linear,
    Geometric
};

struct ProfileOptions {
    double windowMax  = 2.0 * 3.14159265358979323846;
    double windowStep = 0.05;
    int directions    = 8; ///< sampled directions of the excited part
    int otherSamples  = 8; ///< samples of the remaining coordinates in B(Delta)
    WindowSelection selection = WindowSelection::LargestMass;
    RadiusSpacing spacing     = RadiusSpacing::Linear;
    double smallestRatio      = 1e-3; ///< geometric spacing starts at Delta * smallestRatio
    std::uint64_t seed        = 11;
};

/**
 * @brief Per-radius excitation constants. gamma[k] is the window mass mu at
 * radius k and theta[k] the window length; excited[k] is false when no
 * positive mass was found.
 */
struct PEProfile {
    double Delta = 0.0;
    std::vector<double> radii;
    std::vector<double> theta;
    std::vector<double> gamma;
    std::vector<bool> excited;
};

PEProfile estimate_pe_profile(const ExcitationProbe& probe, double Delta, int radiiCount,
                              const ProfileOptions& options = {});

/// rows "radius,theta,gamma"
void write_profile_csv(const PEProfile& profile, std::ostream& out);

/**
 * @brief Continuous nondecreasing lower bound of
 * s -> min{s, exp(-theta) gamma(s)^2 / theta} built from the profile knots.
 * Zero up to the first radius, constant past the last.
 */
class DecayGain
{
public:
    DecayGain() = default;
    explicit DecayGain(const PEProfile& profile);

    double operator()(double s) const;
    const std::vector<double>& knots() const
    {
        return m_radii;
    }
    const std::vector<double>& values() const
    {
        return m_values;
    }

private:
    std::vector<double> m_radii;
    std::vector<double> m_values;
};

enum class GainMode
{
    ClosedForm,
    Quadrature
};

/**
 * @brief Bounded solution w(t, xi) = int_{-inf}^t exp(-(t - s)) psi(s, xi) ds.
 * Quadrature truncates the tail at length `truncation`.
 */
struct SteadyStateGain {
    GainMode mode     = GainMode::ClosedForm;
    double truncation = 30.0;
    ScalarField value;
    VectorField gradient; ///< xi-gradient, may be empty

    /// bound on the discarded tail given sup |psi|
    double truncationBound(double supPsi) const;
};

/// closed form when the heat registers one, otherwise throws; quadrature always works
SteadyStateGain steady_state_gain(const HeatFunction& heat, GainMode mode, double truncation = 30.0,
                                  int panels = 60);

/// quadrature only; gradient from psiGrad when given
SteadyStateGain steady_state_gain(ScalarField psi, double truncation = 30.0, int panels = 60,
                                  VectorField psiGrad = {});

/// composite four-point Gauss-Legendre of f on [a, b]
double gauss_legendre(const std::function<double(double)>& f, double a, double b, int panels);

/**
 * @brief Filters phi through w' = -a w + phi(t, z) from filterInit at tBegin
 * for every sampled z and runs the window test on the filtered signal.
 */
UdpeVerdict filtered_excitation_preserves_pe(const ExcitationProbe& probe, double a, const Vector& filterInit,
                                             const Vector& x, double delta, double T, double mu,
                                             const UdpeOptions& options = {});

struct ProductReport {
    bool productPE = false;
    std::vector<bool> factorPE;
    std::vector<bool> powerPE;
    std::vector<double> factorMass; ///< smallest window mass of each factor
    std::string note;
};

/**
 * @brief Checks |prod_k phi_k| with the window test and, when it passes,
 * each factor and its `power`-th power for some positive window mass.
 */
ProductReport product_factor_check(const std::vector<ExcitationProbe>& factors, const Vector& x, double delta,
                                   double T, double mu, int power = 3, const UdpeOptions& options = {});

} // namespace matrosov

#endif // MATROSOV_EXCITATION_HPP
