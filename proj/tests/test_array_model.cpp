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

#include "fimsense/array_model.hpp"
#include "fimsense/cov_solver.hpp"
#include "fimsense/objective.hpp"
#include "oracles.hpp"

#include <catch_amalgamated.hpp>

using namespace fimsense;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("steering vector matches the explicit position sum", "[array]")
{
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial)
    {
        ArrayGeometry g;
        g.n_x = 1 + trial % 5;
        g.n_z = 1 + (trial * 3) % 4;
        g.dx = 0.5 + 0.1 * (trial % 3);
        g.dz = 0.5;
        g.d_max = 0.7;
        const auto targets = oracle::random_targets(3, rng);
        const auto shape = oracle::random_shape(g.size(), g.d_max, rng);
        const CMatrixXd a = steering_matrix(g, targets, shape);
        const CMatrixXd ref = oracle::steering_matrix_from_positions(g, targets, shape);
        REQUIRE((a - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("2x2 array by hand", "[array]")
{
    ArrayGeometry g;
    g.n_x = 2;
    g.n_z = 2;
    g.d_max = 1;
    // theta = phi = 90 degrees: only the y component survives, so the planar phases vanish
    SurfaceShape s{VectorXd(4)};
    s.displacements << 0, 0.25, 0.5, -0.25;
    const double half_pi = std::numbers::pi / 2;
    const CVectorXd a = steering_vector(g, half_pi, half_pi, s);
    CHECK(std::abs(a(0) - std::complex<double>(1, 0)) < 1e-12);
    CHECK(std::abs(a(1) - std::complex<double>(0, -1)) < 1e-12);
    CHECK(std::abs(a(2) - std::complex<double>(-1, 0)) < 1e-12);
    CHECK(std::abs(a(3) - std::complex<double>(0, 1)) < 1e-12);

    // theta = 90, phi = 0 on a flat array: a_x = [1, e^{-j pi}], a_z = [1, 1]
    const CVectorXd b = steering_vector(g, half_pi, 0.0, SurfaceShape::zero(4));
    CHECK(std::abs(b(0) - 1.0) < 1e-12);
    CHECK(std::abs(b(1) + 1.0) < 1e-12);
    CHECK(std::abs(b(2) - 1.0) < 1e-12);
    CHECK(std::abs(b(3) + 1.0) < 1e-12);
}

TEST_CASE("response matrix trace and rank", "[array]")
{
    std::mt19937_64 rng(5);
    for (int k : {1, 3, 5})
        for (int side : {2, 4, 6})
        {
            const auto g = oracle::square_geometry(side, 1.0);
            const auto targets = oracle::random_targets(k, rng);
            const auto shape = oracle::random_shape(g.size(), g.d_max, rng);
            const ResponseMatrix rm = response_matrix(g, targets, shape);
            CHECK(is_hermitian(rm.b));
            CHECK_THAT(rm.b.trace().real(), WithinRel(double(k * g.size()), 1e-10));
            const RankProfile p = rank_profile(rm.b, k);
            CHECK(numerical_rank(p.eigenvalues) <= k);
            CHECK(p.eigenvalues.minCoeff() >= 0);
        }
}

TEST_CASE("shape validation", "[array]")
{
    const auto g = oracle::square_geometry(2, 0.5);
    SurfaceShape ok{VectorXd::Constant(4, 0.5)};
    CHECK_NOTHROW(ok.validate(g));
    SurfaceShape too_far{VectorXd::Constant(4, 0.51)};
    CHECK_THROWS_AS(too_far.validate(g), std::invalid_argument);
    SurfaceShape wrong_len{VectorXd::Zero(3)};
    CHECK_THROWS_AS(wrong_len.validate(g), std::invalid_argument);
    SurfaceShape nan{VectorXd::Constant(4, std::nan(""))};
    CHECK_THROWS_AS(nan.validate(g), std::invalid_argument);
    CHECK_THROWS_AS(steering_vector(g, -0.1, 0.0, SurfaceShape::zero(4)), std::invalid_argument);
}

TEST_CASE("single precision instantiation agrees with double", "[array]")
{
    BasicArrayGeometry<float> gf;
    gf.n_x = 3;
    gf.n_z = 2;
    gf.d_max = 1;
    BasicSurfaceShape<float> sf{Vector<float>::LinSpaced(6, -0.5f, 0.5f)};
    const auto af = steering_vector(gf, 0.7f, 1.1f, sf);

    ArrayGeometry gd;
    gd.n_x = 3;
    gd.n_z = 2;
    gd.d_max = 1;
    SurfaceShape sd{VectorXd::LinSpaced(6, -0.5, 0.5)};
    const auto ad = steering_vector(gd, 0.7, 1.1, sd);
    CHECK((af.cast<std::complex<double>>() - ad).cwiseAbs().maxCoeff() < 1e-5);
}
