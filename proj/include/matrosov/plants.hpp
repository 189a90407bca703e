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
#ifndef MATROSOV_PLANTS_HPP
#define MATROSOV_PLANTS_HPP

#include "matrosov/dynamics.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace matrosov
{

enum class HeatKind
{
    QuadraticSine, ///< kappa |z|^2 sin(omega t)
    Zero,
    Fading ///< kappa |z|^2 / (1 + t^2)
};

struct HeatParams {
    double kappa = 1.0;
    double omega = 1.0;
};

/**
 * @brief Time-varying feedback term h(t, z) with h(t, 0) = 0.
 *
 * Besides h on the full argument z (dimension dim) it carries the restricted
 * version acting on the leading restrictedDim coordinates xi, its time
 * derivative psi and the xi-gradient of psi. When the filtered gain
 * w' = -w + psi has a known bounded solution it is stored in steadyState.
 */
struct HeatFunction {
    HeatKind kind = HeatKind::Zero;
    HeatParams params;
    int dim           = 1;
    int restrictedDim = 1;

    ScalarField h;
    ScalarField hRestricted;
    ScalarField psi;
    VectorField psiGradX;
    std::function<double(double)> boundRho; ///< bounds |h| and its partials up to order two

    ScalarField steadyState; ///< empty when no closed form is registered
    VectorField steadyStateGrad;

    bool hasClosedForm() const
    {
        return static_cast<bool>(steadyState);
    }
};

HeatFunction make_heat(HeatKind kind, HeatParams params, int dim, int restrictedDim);

/// accepts "quadratic_sine", "zero" and "fading"; throws on anything else
HeatKind parse_heat_kind(std::string_view name);
std::string to_string(HeatKind kind);

/// x1' = u, x2' = u x3, x3' = -x3 - u x2 with u = -x1 + h(t, (x2, x3))
TimeVaryingSystem chained3_closed_loop(const HeatFunction& heat);

/**
 * @brief n-dimensional chained form x1' = u, xi' = u x(i+1), xn' = v.
 *
 * u = -k1 x1 + h(t, x2..xn) and v = -sum_i k'_i (u if n-i is odd) x_i.
 * kPrime holds k'_2..k'_n.
 */
TimeVaryingSystem chainedN_closed_loop(int n, double k1, const std::vector<double>& kPrime, const HeatFunction& heat);

/// state (y, z_1..z_m); u = -y + h(t, z), y' = u, z' = A(u) z. k holds k_2..k_m.
TimeVaryingSystem skew_symmetric_plant(int m, const std::vector<double>& k, const HeatFunction& heat);

/// A(u) of the skew plant
Matrix skew_matrix(int m, const std::vector<double>& k, double u);

/// diagonal weights p with d/dt (z' P z) = -2 p_m k_m z_m^2 along the skew plant
std::vector<double> skew_weights(int m, const std::vector<double>& k);

/// cascade x' = -x + c sin(t) z x, z' = -(1 + sin(t) / 2) z; state (x, z)
TimeVaryingSystem cascade_demo_plant(double coupling);

// ---------------------------------------------------------------------------
// channel networks

/**
 * @brief Passive block x' = B(x) u, y = B(x)' grad W(x).
 */
struct BlockModel {
    int stateDim  = 1;
    int outputDim = 1;
    std::function<Matrix(const Vector&)> B;
    std::function<double(const Vector&)> W;
    std::function<Vector(const Vector&)> gradW;
    double c = 1.0; ///< lower bound of the symmetric part of dh/dx B
    std::function<double(double)> kappa; ///< |h(x)| >= kappa(|x|)
    std::string label;

    Vector output(const Vector& x) const
    {
        return B(x).transpose() * gradW(x);
    }
};

/// B = b I, W = a |x|^2 / 2, so y = a b x and c = a b^2
BlockModel make_quadratic_block(int dim, double a, double b);

/// gain of channel i is  -z_i + gA(t, x) + gB(t, x), filter z_i' = -z_i + gA(t, x)
struct ChannelGain {
    HeatFunction gA; ///< dim = restrictedDim = total x dimension
    ScalarField gB;
    std::string gBLabel;
};

struct OutputNonlinearity {
    std::function<Vector(const Vector&)> sigma;
    std::function<double(double)> rho; ///< u' sigma(u) >= rho(|u|)
    std::string label;
};

/// "tanh" or "linear:<gain>"
OutputNonlinearity make_output_nonlinearity(std::string_view name, int outputDim);

struct ChannelNetworkConfig {
    std::vector<BlockModel> blocks; ///< n blocks
    std::vector<ChannelGain> channels; ///< n - 1 channels
    OutputNonlinearity sigma;

    int blockCount() const
    {
        return static_cast<int>(blocks.size());
    }
    int outputDim() const
    {
        return blocks.empty() ? 0 : blocks.front().outputDim;
    }
    int xDim() const;
    std::vector<int> xOffsets() const;
    void validate() const;
};

/// y_1..y_n for the stacked x
std::vector<Vector> channel_outputs(const ChannelNetworkConfig& config, const Vector& x);

/// g_i = prod_{j >= i} gTilde_j for i < n and g_n = 1
std::vector<double> gain_products(const std::vector<double>& gTilde);

/// inputs u_1..u_n from outputs and products g
std::vector<Vector> channel_inputs(const ChannelNetworkConfig& config, const std::vector<Vector>& y,
                                   const std::vector<double>& g);

/// x' for the stacked x given the channel gains gTilde
Vector channel_block_rates(const ChannelNetworkConfig& config, const Vector& x, const std::vector<double>& gTilde);

/// state (x_1..x_n, z_1..z_(n-1))
TimeVaryingSystem channel_network_plant(const ChannelNetworkConfig& config);

/// sum_i W_i(x_i)
double channel_storage(const ChannelNetworkConfig& config, const Vector& x);

struct ChannelConfigReport {
    bool ok = true;
    double worstDissipationMargin = 0.0; ///< min eig(sym(dh/dx B)) - c
    double worstSectorMargin      = 0.0; ///< min u' sigma(u) - rho(|u|)
    double worstStorageMargin     = 0.0; ///< min W(x) - W(0)
    std::vector<std::string> problems;
};

/// samples each block in B(radius) and checks its structural assumptions numerically
ChannelConfigReport check_channel_config(const ChannelNetworkConfig& config, double radius, int samples,
                                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// gain vectors

struct GainVector {
    std::vector<double> gTilde; ///< n - 1 entries
    std::vector<double> g; ///< n entries, g[n-1] = 1
};

GainVector make_gain_vector(const std::vector<double>& gTilde);

struct GainIdentityReport {
    double recursionError     = 0.0; ///< g_i = gTilde_i g_(i+1)
    double factorisationError = 0.0; ///< product-root factorisation of g_i
    double outputNormError    = 0.0; ///< |g_i y_i| through phi_i
    bool ok(double tol = 1e-10) const
    {
        return recursionError <= tol && factorisationError <= tol && outputNormError <= tol;
    }
};

/**
 * @brief Relative errors of the gain identities for positive gTilde.
 * yNorms (size n) defaults to all ones.
 */
GainIdentityReport gain_identities_check(const std::vector<double>& gTilde, const std::vector<double>& yNorms = {});

} // namespace matrosov

#endif // MATROSOV_PLANTS_HPP
