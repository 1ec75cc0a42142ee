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

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace fimsense
{

template <typename Real>
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

template <typename Real>
using CVector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <typename Real>
using CMatrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using CVectorXd = CVector<double>;
using CMatrixXd = CMatrix<double>;

// Uniform planar array in the xz plane whose elements may move along y.
//
// Spacings and the morphing limit are in wavelengths; the wavelength itself
// is in meters. Element n sits at column i_x = n % n_x and row i_z = n / n_x,
// which matches the Kronecker order a_z (x) a_x.
template <typename Real>
struct BasicArrayGeometry
{
    Eigen::Index n_x = 1;
    Eigen::Index n_z = 1;
    Real dx = Real(0.5);
    Real dz = Real(0.5);
    Real wavelength = Real(1);
    Real d_max = Real(0);

    Eigen::Index size() const { return n_x * n_z; }

    // rad/m
    Real wavenumber() const { return Real(2) * std::numbers::pi_v<Real> / wavelength; }

    Real meters_to_wavelengths(Real meters) const { return meters / wavelength; }
    Real wavelengths_to_meters(Real wl) const { return wl * wavelength; }

    void validate() const
    {
        if (n_x < 1 || n_z < 1)
            throw std::invalid_argument("array geometry: n_x and n_z must be >= 1");
        if (!(dx > 0) || !(dz > 0))
            throw std::invalid_argument("array geometry: element spacings must be positive");
        if (!(wavelength > 0))
            throw std::invalid_argument("array geometry: wavelength must be positive");
        if (!(d_max >= 0))
            throw std::invalid_argument("array geometry: d_max must be non-negative");
    }
};

// Out-of-plane displacement per element, in wavelengths.
template <typename Real>
struct BasicSurfaceShape
{
    Vector<Real> displacements;

    static BasicSurfaceShape zero(Eigen::Index n) { return {Vector<Real>::Zero(n)}; }

    Eigen::Index size() const { return displacements.size(); }

    bool within(Real d_max, Real slack = Real(0)) const
    {
        return displacements.size() == 0 || displacements.cwiseAbs().maxCoeff() <= d_max + slack;
    }

    void validate(const BasicArrayGeometry<Real> &geom) const
    {
        if (displacements.size() != geom.size())
            throw std::invalid_argument("surface shape: length " + std::to_string(displacements.size()) +
                                        " does not match N_t = " + std::to_string(geom.size()));
        if (!displacements.allFinite())
            throw std::invalid_argument("surface shape: non-finite displacement");
        if (!within(geom.d_max))
            throw std::invalid_argument("surface shape: displacement exceeds d_max");
    }
};

template <typename Real>
struct BasicTarget
{
    Real theta = 0; // elevation, rad, [0, pi]
    Real phi = 0;   // azimuth, rad, [0, pi]
    std::complex<Real> rcs{1, 0};
};

template <typename Real>
using BasicTargetSet = std::vector<BasicTarget<Real>>;

template <typename Real>
void validate_angles(Real theta, Real phi)
{
    const Real pi = std::numbers::pi_v<Real>;
    if (!(theta >= 0 && theta <= pi) || !(phi >= 0 && phi <= pi))
        throw std::invalid_argument("target angles must lie in [0, pi]");
}

template <typename Real>
void validate_targets(const BasicTargetSet<Real> &targets)
{
    if (targets.empty())
        throw std::invalid_argument("target set must contain at least one target");
    for (const auto &t : targets)
        validate_angles(t.theta, t.phi);
}

// Steering vectors of all targets as columns, plus the cached correlation B = A A^H.
template <typename Real>
struct BasicResponseMatrix
{
    CMatrix<Real> a;
    CMatrix<Real> b;

    Eigen::Index elements() const { return a.rows(); }
    Eigen::Index targets() const { return a.cols(); }
};

using ArrayGeometry = BasicArrayGeometry<double>;
using SurfaceShape = BasicSurfaceShape<double>;
using Target = BasicTarget<double>;
using TargetSet = BasicTargetSet<double>;
using ResponseMatrix = BasicResponseMatrix<double>;

// sin(theta) sin(phi): the projection of the direction onto the surface normal.
template <typename Real>
Real normal_projection(Real theta, Real phi)
{
    return std::sin(theta) * std::sin(phi);
}

// Unit-modulus phase progression [1, e^{-j 2 pi v}, ..., e^{-j 2 pi (n-1) v}], v in wavelengths.
template <typename Real>
CVector<Real> linear_phase(Eigen::Index n, Real v)
{
    const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
    CVector<Real> out(n);
    for (Eigen::Index i = 0; i < n; ++i)
        out(i) = std::polar(Real(1), -two_pi * Real(i) * v);
    return out;
}

template <typename Real>
CVector<Real> steering_vector(const BasicArrayGeometry<Real> &geom, Real theta, Real phi,
                              const BasicSurfaceShape<Real> &shape)
{
    if (shape.size() != geom.size())
        throw std::invalid_argument("steering_vector: shape length does not match the array");
    validate_angles(theta, phi);

    const CVector<Real> a_x = linear_phase(geom.n_x, geom.dx * std::sin(theta) * std::cos(phi));
    const CVector<Real> a_z = linear_phase(geom.n_z, geom.dz * std::cos(theta));

    // a_z (x) a_x
    CVector<Real> a(geom.size());
    for (Eigen::Index iz = 0; iz < geom.n_z; ++iz)
        a.segment(iz * geom.n_x, geom.n_x) = a_z(iz) * a_x;

    const Real s = normal_projection(theta, phi);
    if (s != Real(0))
    {
        const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
        for (Eigen::Index n = 0; n < a.size(); ++n)
            a(n) *= std::polar(Real(1), -two_pi * shape.displacements(n) * s);
    }
    return a;
}

template <typename Real>
CMatrix<Real> steering_matrix(const BasicArrayGeometry<Real> &geom, const BasicTargetSet<Real> &targets,
                              const BasicSurfaceShape<Real> &shape)
{
    CMatrix<Real> a(geom.size(), static_cast<Eigen::Index>(targets.size()));
    for (std::size_t k = 0; k < targets.size(); ++k)
        a.col(static_cast<Eigen::Index>(k)) = steering_vector(geom, targets[k].theta, targets[k].phi, shape);
    return a;
}

template <typename Real>
BasicResponseMatrix<Real> response_matrix(const BasicArrayGeometry<Real> &geom,
                                          const BasicTargetSet<Real> &targets,
                                          const BasicSurfaceShape<Real> &shape)
{
    geom.validate();
    validate_targets(targets);
    shape.validate(geom);

    BasicResponseMatrix<Real> rm;
    rm.a = steering_matrix(geom, targets, shape);
    rm.b = rm.a * rm.a.adjoint();
    return rm;
}

// Per-target s_k = sin(theta_k) sin(phi_k).
template <typename Real>
Vector<Real> normal_projections(const BasicTargetSet<Real> &targets)
{
    Vector<Real> s(static_cast<Eigen::Index>(targets.size()));
    for (std::size_t k = 0; k < targets.size(); ++k)
        s(static_cast<Eigen::Index>(k)) = normal_projection(targets[k].theta, targets[k].phi);
    return s;
}

} // namespace fimsense
