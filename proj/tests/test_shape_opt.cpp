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

#include "fimsense/cov_solver.hpp"
#include "fimsense/objective.hpp"
#include "fimsense/shape_opt.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace fimsense;

TEST_CASE("projection clamps into the box", "[shape]")
{
    SurfaceShape s{VectorXd(5)};
    s.displacements << -2.0, -0.5, 0.0, 0.3, 7.0;
    const SurfaceShape p = project_shape(s, 0.5);
    VectorXd expect(5);
    expect << -0.5, -0.5, 0.0, 0.3, 0.5;
    CHECK(p.displacements == expect);
    CHECK(project_shape(p, 0.5).displacements == p.displacements);
    CHECK(project_shape(s, 0.0).displacements.isZero());
}

TEST_CASE("projected gradient drops outward components on active bounds", "[shape]")
{
    VectorXd x(4), g(4);
    x << 0.5, -0.5, 0.5, 0.1;
    g << 1.0, -1.0, -1.0, 2.0;
    const VectorXd p = projected_gradient(x, g, 0.5);
    CHECK(p(0) == 0.0);
    CHECK(p(1) == 0.0);
    CHECK(p(2) == -1.0);
    CHECK(p(3) == 2.0);
}

TEST_CASE("ascent is monotone and stays feasible", "[shape]")
{
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 5; ++trial)
    {
        const auto g = oracle::square_geometry(4, 0.25 * (trial + 1));
        const auto targets = oracle::random_targets(3, rng);
        const CMatrixXd r = oracle::random_feasible_covariance(g.size(), 10.0, rng);
        const SurfaceShape start = oracle::random_shape(g.size(), g.d_max, rng);
        const auto [shape, trace] = ascend_shape(r, g, targets, start, AscentConfig{});
        REQUIRE(trace.objective.size() >= 1);
        for (std::size_t i = 1; i < trace.objective.size(); ++i)
            CHECK(trace.objective[i] >= trace.objective[i - 1]);
        CHECK(shape.within(g.d_max));
        CHECK_THAT(trace.objective.back(), Catch::Matchers::WithinRel(cumulated_power(r, g, targets, shape), 1e-12));
        CHECK(trace.iterations <= AscentConfig{}.max_iters);
    }
}

TEST_CASE("zero morphing range leaves the shape alone", "[shape]")
{
    std::mt19937_64 rng(42);
    const auto g = oracle::square_geometry(3, 0.0);
    const auto targets = oracle::random_targets(2, rng);
    const CMatrixXd r = oracle::random_feasible_covariance(g.size(), 1.0, rng);
    const auto [shape, trace] = ascend_shape(r, g, targets, SurfaceShape::zero(g.size()), AscentConfig{});
    CHECK(shape.displacements.isZero());
    CHECK(trace.status != AscentStatus::IterationLimit);
}

TEST_CASE("a stationary start stops at once", "[shape]")
{
    // No target has a component along the surface normal.
    const auto g = oracle::square_geometry(3, 1.0);
    TargetSet targets{{0.7, 0.0, {1, 0}}};
    const CMatrixXd r = CovarianceMatrix::isotropic(g.size(), 1.0).r;
    const auto [shape, trace] = ascend_shape(r, g, targets, SurfaceShape::zero(g.size()), AscentConfig{});
    CHECK(trace.status == AscentStatus::GradientTolerance);
    CHECK(trace.iterations == 0);
}

TEST_CASE("ascent improves the single-target power towards the bound", "[shape]")
{
    // One target, isotropic covariance: P_c = P_t regardless of the shape, and a
    // rank-one covariance steered away from the target gains from morphing.
    const auto g = oracle::square_geometry(3, 1.0);
    TargetSet targets{{1.2, 1.0, {1, 0}}};
    const CVectorXd w = CVectorXd::Constant(g.size(), std::sqrt(1.0 / g.size()));
    const CMatrixXd r = w * w.adjoint();
    const auto [shape, trace] = ascend_shape(r, g, targets, SurfaceShape::zero(g.size()), AscentConfig{});
    CHECK(trace.objective.back() > trace.objective.front());
    CHECK(trace.objective.back() <= 1.0 * g.size() * (1 + 1e-9));
}

TEST_CASE("ascent config validation", "[shape]")
{
    AscentConfig cfg;
    cfg.shrink = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.grad_tol = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
