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

#include "fimsense/beampattern.hpp"
#include "fimsense/objective.hpp"
#include "fimsense/parallel.hpp"
#include "fimsense/units.hpp"

#include <numbers>
#include <stdexcept>

namespace fimsense
{

namespace
{

void check_axis(const VectorXd &axis, const char *name)
{
    if (axis.size() == 0)
        throw std::invalid_argument(std::string("beampattern: empty ") + name + " axis");
    for (Eigen::Index i = 0; i < axis.size(); ++i)
    {
        if (!(axis(i) >= 0.0 && axis(i) <= std::numbers::pi))
            throw std::invalid_argument(std::string("beampattern: ") + name + " axis leaves [0, pi]");
        if (i > 0 && !(axis(i) > axis(i - 1)))
            throw std::invalid_argument(std::string("beampattern: ") + name + " axis is not strictly increasing");
    }
}

} // namespace

void BeampatternGrid::validate() const
{
    check_axis(theta_axis, "theta");
    check_axis(phi_axis, "phi");
    if (power_dbm.rows() != theta_axis.size() || power_dbm.cols() != phi_axis.size())
        throw std::invalid_argument("beampattern: grid does not match its axes");
    if (!power_dbm.allFinite())
        throw std::invalid_argument("beampattern: non-finite power");
}

VectorXd angle_axis(Eigen::Index n)
{
    if (n < 2)
        throw std::invalid_argument("angle axis needs at least two points");
    return VectorXd::LinSpaced(n, 0.0, std::numbers::pi);
}

BeampatternGrid evaluate_beampattern(const CMatrixXd &r_x, const ArrayGeometry &geom, const SurfaceShape &shape,
                                     const VectorXd &theta_axis, const VectorXd &phi_axis, int threads)
{
    geom.validate();
    if (shape.size() != geom.size())
        throw std::invalid_argument("beampattern: shape length does not match the array");
    detail::check_covariance_shape(r_x, geom.size(), "evaluate_beampattern");
    check_axis(theta_axis, "theta");
    check_axis(phi_axis, "phi");

    BeampatternGrid grid{theta_axis, phi_axis, Eigen::MatrixXd(theta_axis.size(), phi_axis.size())};
    parallel_for(static_cast<std::size_t>(theta_axis.size()), threads, [&](std::size_t ii) {
        const auto i = static_cast<Eigen::Index>(ii);
        for (Eigen::Index j = 0; j < phi_axis.size(); ++j)
        {
            const CVectorXd a = steering_vector(geom, theta_axis(i), phi_axis(j), shape);
            grid.power_dbm(i, j) = mw_to_dbm(a.dot(r_x * a).real());
        }
    });
    return grid;
}

TargetPowers target_powers(const CMatrixXd &r_x, const ArrayGeometry &geom, const TargetSet &targets,
                           const SurfaceShape &shape)
{
    const ResponseMatrix rm = response_matrix(geom, targets, shape);
    detail::check_covariance_shape(r_x, geom.size(), "target_powers");

    TargetPowers out;
    const CMatrixXd ra = r_x * rm.a;
    out.per_target_mw = rm.a.conjugate().cwiseProduct(ra).colwise().sum().real().transpose();
    out.per_target_dbm = out.per_target_mw.unaryExpr([](double p) { return mw_to_dbm(p); });
    out.cumulated_mw = cumulated_power(r_x, rm);
    out.min_dbm = out.per_target_dbm.minCoeff();
    return out;
}

} // namespace fimsense
