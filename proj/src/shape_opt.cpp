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

#include "fimsense/shape_opt.hpp"
#include "fimsense/objective.hpp"

#include <stdexcept>

namespace fimsense
{

void AscentConfig::validate() const
{
    if (!(grad_tol > 0) || max_iters < 1 || !(initial_step > 0) || !(min_step > 0))
        throw std::invalid_argument("ascent config: grad_tol, max_iters, initial_step and min_step must be positive");
    if (!(armijo_c > 0 && armijo_c < 1) || !(shrink > 0 && shrink < 1))
        throw std::invalid_argument("ascent config: armijo_c and shrink must lie in (0, 1)");
}

std::string_view to_string(AscentStatus status)
{
    switch (status)
    {
    case AscentStatus::GradientTolerance:
        return "GradientTolerance";
    case AscentStatus::Stationary:
        return "Stationary";
    case AscentStatus::IterationLimit:
        return "IterationLimit";
    case AscentStatus::LineSearchFailure:
        return "LineSearchFailure";
    }
    return "?";
}

VectorXd projected_gradient(const VectorXd &x, const VectorXd &g, double d_max)
{
    VectorXd pg = g;
    for (Eigen::Index n = 0; n < x.size(); ++n)
    {
        if ((x(n) >= d_max && g(n) > 0) || (x(n) <= -d_max && g(n) < 0))
            pg(n) = 0;
    }
    return pg;
}

std::pair<SurfaceShape, AscentTrace> ascend_shape(const CMatrixXd &r_x, const ArrayGeometry &geom,
                                                  const TargetSet &targets, const SurfaceShape &shape0,
                                                  const AscentConfig &cfg)
{
    cfg.validate();
    geom.validate();
    validate_targets(targets);
    shape0.validate(geom);
    detail::check_covariance_shape(r_x, geom.size(), "ascend_shape");

    const VectorXd s = normal_projections(targets);
    auto value_at = [&](const SurfaceShape &x) {
        return cumulated_power_from_steering(r_x, steering_matrix(geom, targets, x));
    };

    SurfaceShape x = shape0;
    CMatrixXd a = steering_matrix(geom, targets, x);
    double f = cumulated_power_from_steering(r_x, a);
    VectorXd g = gradient_shape_from_steering(r_x, a, s);

    AscentTrace trace;
    trace.objective.push_back(f);

    while (true)
    {
        const double g_norm = g.norm();
        const double pg_norm = projected_gradient(x.displacements, g, geom.d_max).norm();
        trace.grad_norm.push_back(g_norm);
        trace.proj_grad_norm.push_back(pg_norm);

        if (g_norm <= cfg.grad_tol)
        {
            trace.status = AscentStatus::GradientTolerance;
            break;
        }
        if (pg_norm <= cfg.grad_tol)
        {
            trace.status = AscentStatus::Stationary;
            break;
        }
        if (trace.iterations >= cfg.max_iters)
        {
            trace.status = AscentStatus::IterationLimit;
            break;
        }

        const double g_inf = g.cwiseAbs().maxCoeff();
        double eps = cfg.initial_step / g_inf;
        bool accepted = false;
        bool no_move = false;
        SurfaceShape candidate;
        double f_candidate = f;
        while (eps * g_inf >= cfg.min_step)
        {
            candidate = project_shape(SurfaceShape{x.displacements + eps * g}, geom.d_max);
            const VectorXd d = candidate.displacements - x.displacements;
            if (d.cwiseAbs().maxCoeff() == 0.0)
            {
                no_move = true;
                break;
            }
            f_candidate = value_at(candidate);
            if (f_candidate >= f + cfg.armijo_c * g.dot(d))
            {
                accepted = true;
                break;
            }
            eps *= cfg.shrink;
        }

        if (no_move)
        {
            trace.status = AscentStatus::Stationary;
            break;
        }
        if (!accepted)
        {
            trace.status = AscentStatus::LineSearchFailure;
            break;
        }

        x = std::move(candidate);
        a = steering_matrix(geom, targets, x);
        f = f_candidate;
        g = gradient_shape_from_steering(r_x, a, s);
        ++trace.iterations;
        trace.objective.push_back(f);
        trace.step.push_back(eps);
    }
    return {x, trace};
}

} // namespace fimsense
