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
#include "matrosov/plants.hpp"

#include <cmath>
#include <sstream>

namespace matrosov
{

namespace
{

double restricted_sq_norm(const Vector& z, int r)
{
    return z.head(r).squaredNorm();
}

} // namespace

HeatKind parse_heat_kind(std::string_view name)
{
    if (name == "quadratic_sine") {
        return HeatKind::QuadraticSine;
    }
    if (name == "zero") {
        return HeatKind::Zero;
    }
    if (name == "fading") {
        return HeatKind::Fading;
    }
    throw std::invalid_argument("unknown heat kind '" + std::string(name) +
                                "' (expected quadratic_sine, zero or fading)");
}

std::string to_string(HeatKind kind)
{
    switch (kind) {
    case HeatKind::QuadraticSine:
        return "quadratic_sine";
    case HeatKind::Zero:
        return "zero";
    case HeatKind::Fading:
        return "fading";
    }
    return "unknown";
}

HeatFunction make_heat(HeatKind kind, HeatParams params, int dim, int restrictedDim)
{
    if (dim < 1 || restrictedDim < 1 || restrictedDim > dim) {
        std::ostringstream msg;
        msg << "heat needs 1 <= restrictedDim <= dim, got dim=" << dim << " restrictedDim=" << restrictedDim;
        throw std::invalid_argument(msg.str());
    }
    if (!std::isfinite(params.kappa) || !std::isfinite(params.omega) || params.omega < 0.0) {
        throw std::invalid_argument("heat parameters must be finite with omega >= 0");
    }
    HeatFunction heat;
    heat.kind          = kind;
    heat.params        = params;
    heat.dim           = dim;
    heat.restrictedDim = restrictedDim;

    const double kappa = params.kappa;
    const double w     = params.omega;
    const int r        = restrictedDim;

    switch (kind) {
    case HeatKind::QuadraticSine: {
        heat.h = [kappa, w](double t, const Vector& z) {
            return kappa * z.squaredNorm() * std::sin(w * t);
        };
        heat.hRestricted = [kappa, w, r](double t, const Vector& xi) {
            return kappa * restricted_sq_norm(xi, r) * std::sin(w * t);
        };
        heat.psi = [kappa, w, r](double t, const Vector& xi) {
            return kappa * w * restricted_sq_norm(xi, r) * std::cos(w * t);
        };
        heat.psiGradX = [kappa, w, r](double t, const Vector& xi) {
            Vector g = Vector::Zero(xi.size());
            g.head(r) = 2.0 * kappa * w * std::cos(w * t) * xi.head(r);
            return g;
        };
        const double s = std::abs(kappa) * (1.0 + w) * (1.0 + w);
        heat.boundRho  = [s](double rad) {
            return s * (rad * rad + 2.0 * rad + 2.0);
        };
        const double c = kappa * w / (1.0 + w * w);
        heat.steadyState = [c, w, r](double t, const Vector& xi) {
            return c * restricted_sq_norm(xi, r) * (std::cos(w * t) + w * std::sin(w * t));
        };
        heat.steadyStateGrad = [c, w, r](double t, const Vector& xi) {
            Vector g = Vector::Zero(xi.size());
            g.head(r) = 2.0 * c * (std::cos(w * t) + w * std::sin(w * t)) * xi.head(r);
            return g;
        };
        break;
    }
    case HeatKind::Zero: {
        heat.h = [](double, const Vector&) {
            return 0.0;
        };
        heat.hRestricted = heat.h;
        heat.psi         = heat.h;
        heat.psiGradX    = [](double, const Vector& xi) {
            return Vector(Vector::Zero(xi.size()));
        };
        heat.boundRho = [](double) {
            return 0.0;
        };
        heat.steadyState     = heat.h;
        heat.steadyStateGrad = heat.psiGradX;
        break;
    }
    case HeatKind::Fading: {
        heat.h = [kappa](double t, const Vector& z) {
            return kappa * z.squaredNorm() / (1.0 + t * t);
        };
        heat.hRestricted = [kappa, r](double t, const Vector& xi) {
            return kappa * restricted_sq_norm(xi, r) / (1.0 + t * t);
        };
        heat.psi = [kappa, r](double t, const Vector& xi) {
            const double d = 1.0 + t * t;
            return -2.0 * kappa * restricted_sq_norm(xi, r) * t / (d * d);
        };
        heat.psiGradX = [kappa, r](double t, const Vector& xi) {
            const double d = 1.0 + t * t;
            Vector g       = Vector::Zero(xi.size());
            g.head(r)      = -4.0 * kappa * t / (d * d) * xi.head(r);
            return g;
        };
        const double s = 2.0 * std::abs(kappa);
        heat.boundRho  = [s](double rad) {
            return s * (rad * rad + 2.0 * rad + 2.0);
        };
        break;
    }
    }
    return heat;
}

} // namespace matrosov
