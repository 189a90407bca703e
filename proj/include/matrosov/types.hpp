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
#ifndef MATROSOV_TYPES_HPP
#define MATROSOV_TYPES_HPP

#include <Eigen/Dense>

#include <functional>

namespace matrosov
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// in-place right-hand side, dx must already have the state dimension
using RhsFn = std::function<void(double t, const Vector& x, Vector& dx)>;

/// (t, x) -> R
using ScalarField = std::function<double(double t, const Vector& x)>;

/// (t, x) -> R^m
using VectorField = std::function<Vector(double t, const Vector& x)>;

} // namespace matrosov

#endif // MATROSOV_TYPES_HPP
