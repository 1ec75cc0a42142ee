// SPDX-License-Identifier: Apache-2.0
//
// fimsense: waveform and surface-shape design for flexible-metasurface MIMO sensing
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include "fimsense/array_model.hpp"

#include <string_view>
#include <utility>
#include <vector>

namespace fimsense
{

struct AscentConfig
{
    double grad_tol = 1e-6;     // zeta
    int max_iters = 1000;       // S
    double armijo_c = 1e-4;
    double shrink = 0.5;
    double initial_step = 0.1;  // largest per-element move of the first trial step, wavelengths
    double min_step = 1e-12;    // line search gives up below this per-element move, wavelengths

    void validate() const;
    bool operator==(const AscentConfig &) const = default;
};

enum class AscentStatus
{
    GradientTolerance, // ||grad|| <= zeta
    Stationary,        // projected gradient vanished on the box boundary
    IterationLimit,    // S iterations done
    LineSearchFailure, // no Armijo step above min_step
};

std::string_view to_string(AscentStatus status);

struct AscentTrace
{
    std::vector<double> objective;      // P_c after each accepted step, [0] is the start
    std::vector<double> step;           // accepted epsilon per step
    std::vector<double> grad_norm;      // ||grad|| at each iterate
    std::vector<double> proj_grad_norm; // norm of the box-projected gradient at each iterate
    int iterations = 0;
    AscentStatus status = AscentStatus::IterationLimit;
};

// Entrywise sgn(x) min(|x|, d_max).
template <typename Real>
BasicSurfaceShape<Real> project_shape(const BasicSurfaceShape<Real> &shape, Real d_max)
{
    return {shape.displacements.cwiseMax(-d_max).cwiseMin(d_max)};
}

// Gradient with components that point out of the box zeroed.
VectorXd projected_gradient(const VectorXd &x, const VectorXd &g, double d_max);

// Projected gradient ascent on P_c for a fixed covariance, with Armijo backtracking.
//
// The first trial step of each iteration moves the most-affected element by
// cfg.initial_step wavelengths. A step is accepted once
//     P_c(x_new) >= P_c(x) + c grad^T (x_new - x),   x_new = proj(x + eps grad),
// which reduces to P_c(x) + c eps ||grad||^2 when no bound is active.
std::pair<SurfaceShape, AscentTrace> ascend_shape(const CMatrixXd &r_x, const ArrayGeometry &geom,
                                                  const TargetSet &targets, const SurfaceShape &shape0,
                                                  const AscentConfig &cfg);

} // namespace fimsense
