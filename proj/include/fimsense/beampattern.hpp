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

namespace fimsense
{

// Transmit power a^H R a over a (theta, phi) grid, in dBm.
struct BeampatternGrid
{
    VectorXd theta_axis; // rad
    VectorXd phi_axis;   // rad
    Eigen::MatrixXd power_dbm; // theta along rows, phi along columns

    void validate() const;
};

// n points evenly spaced over [0, pi], endpoints included.
VectorXd angle_axis(Eigen::Index n);

BeampatternGrid evaluate_beampattern(const CMatrixXd &r_x, const ArrayGeometry &geom, const SurfaceShape &shape,
                                     const VectorXd &theta_axis, const VectorXd &phi_axis, int threads = 1);

struct TargetPowers
{
    VectorXd per_target_mw;
    VectorXd per_target_dbm;
    double cumulated_mw = 0;
    double min_dbm = 0;
};

TargetPowers target_powers(const CMatrixXd &r_x, const ArrayGeometry &geom, const TargetSet &targets,
                           const SurfaceShape &shape);

} // namespace fimsense
