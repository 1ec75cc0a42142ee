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

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace fimsense
{

// Relative Hermitian test: max |M - M^H| <= tol * max(1, max |M|).
template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived> &m, double tol = 1e-10)
{
    if (m.rows() != m.cols())
        return false;
    if (m.size() == 0)
        return true;
    const double scale = std::max(1.0, static_cast<double>(m.cwiseAbs().maxCoeff()));
    return static_cast<double>((m - m.adjoint()).cwiseAbs().maxCoeff()) <= tol * scale;
}

namespace detail
{

template <typename Real>
void check_covariance_shape(const CMatrix<Real> &r_x, Eigen::Index n, const char *who)
{
    if (r_x.rows() != n || r_x.cols() != n)
        throw std::invalid_argument(std::string(who) + ": covariance is " + std::to_string(r_x.rows()) + "x" +
                                    std::to_string(r_x.cols()) + ", expected " + std::to_string(n) + "x" +
                                    std::to_string(n));
    if (!is_hermitian(r_x))
        throw std::invalid_argument(std::string(who) + ": covariance is not Hermitian");
}

} // namespace detail

template <typename Real>
struct BasicObjectiveEval
{
    Real value = 0; // mW
    std::optional<Vector<Real>> gradient; // mW per wavelength of displacement
};

using ObjectiveEval = BasicObjectiveEval<double>;

// P_c = tr(R_X B).
template <typename Real>
Real cumulated_power(const CMatrix<Real> &r_x, const BasicResponseMatrix<Real> &rm)
{
    detail::check_covariance_shape(r_x, rm.b.rows(), "cumulated_power");
    // tr(R B) = sum_ij R_ij B_ji
    const std::complex<Real> tr = r_x.cwiseProduct(rm.b.transpose()).sum();
    return tr.real();
}

// P_c = sum_k a_k^H R_X a_k, without forming B. Used on hot paths.
template <typename Real>
Real cumulated_power_from_steering(const CMatrix<Real> &r_x, const CMatrix<Real> &a)
{
    const CMatrix<Real> ra = r_x * a;
    return a.conjugate().cwiseProduct(ra).sum().real();
}

template <typename Real>
Real cumulated_power(const CMatrix<Real> &r_x, const BasicArrayGeometry<Real> &geom,
                     const BasicTargetSet<Real> &targets, const BasicSurfaceShape<Real> &shape)
{
    detail::check_covariance_shape(r_x, geom.size(), "cumulated_power");
    return cumulated_power_from_steering(r_x, steering_matrix(geom, targets, shape));
}

// Gradient of P_c with respect to the displacements, in mW per wavelength.
//
// dA/dd_n is zero except in row n, where it equals -j 2 pi A(n, :) diag(s). Entry n of the
// gradient is tr(R dA A^H) + tr(R A dA^H), and each trace only touches row n of R A,
// so the whole gradient costs one N x N x K product plus O(N K).
template <typename Real>
Vector<Real> gradient_shape_from_steering(const CMatrix<Real> &r_x, const CMatrix<Real> &a,
                                          const Vector<Real> &s)
{
    const Real two_pi = Real(2) * std::numbers::pi_v<Real>;
    const std::complex<Real> minus_j_kc(0, -two_pi);
    const CMatrix<Real> ra = r_x * a;

    Vector<Real> g(a.rows());
    for (Eigen::Index n = 0; n < a.rows(); ++n)
    {
        std::complex<Real> first(0), second(0);
        for (Eigen::Index k = 0; k < a.cols(); ++k)
        {
            const std::complex<Real> da = minus_j_kc * s(k) * a(n, k);
            first += std::conj(ra(n, k)) * da;  // tr(R dA A^H) term, (A^H R)_{k,n} dA_{n,k}
            second += std::conj(da) * ra(n, k); // tr(R A dA^H) term
        }
        const std::complex<Real> total = first + second;
        const Real tol = Real(1e-10) * std::max(Real(1), std::abs(total.real()));
        if (std::abs(total.imag()) > tol)
            throw std::logic_error("gradient_shape: trace has a non-negligible imaginary part");
        g(n) = total.real();
    }
    return g;
}

template <typename Real>
Vector<Real> gradient_shape(const CMatrix<Real> &r_x, const BasicArrayGeometry<Real> &geom,
                            const BasicTargetSet<Real> &targets, const BasicSurfaceShape<Real> &shape)
{
    detail::check_covariance_shape(r_x, geom.size(), "gradient_shape");
    if (shape.size() != geom.size())
        throw std::invalid_argument("gradient_shape: shape length does not match the array");
    return gradient_shape_from_steering(r_x, steering_matrix(geom, targets, shape), normal_projections(targets));
}

template <typename Real>
BasicObjectiveEval<Real> evaluate_objective(const CMatrix<Real> &r_x, const BasicArrayGeometry<Real> &geom,
                                            const BasicTargetSet<Real> &targets,
                                            const BasicSurfaceShape<Real> &shape, bool with_gradient)
{
    detail::check_covariance_shape(r_x, geom.size(), "evaluate_objective");
    const CMatrix<Real> a = steering_matrix(geom, targets, shape);
    BasicObjectiveEval<Real> out;
    out.value = cumulated_power_from_steering(r_x, a);
    if (with_gradient)
        out.gradient = gradient_shape_from_steering(r_x, a, normal_projections(targets));
    return out;
}

// Central differences of cumulated_power, one coordinate at a time. h in wavelengths.
template <typename Real>
Vector<Real> finite_difference_gradient(const CMatrix<Real> &r_x, const BasicArrayGeometry<Real> &geom,
                                        const BasicTargetSet<Real> &targets,
                                        const BasicSurfaceShape<Real> &shape, Real h = Real(1e-6))
{
    if (!(h > 0))
        throw std::invalid_argument("finite_difference_gradient: h must be positive");
    detail::check_covariance_shape(r_x, geom.size(), "finite_difference_gradient");

    Vector<Real> g(shape.size());
    BasicSurfaceShape<Real> probe = shape;
    for (Eigen::Index n = 0; n < shape.size(); ++n)
    {
        const Real x = shape.displacements(n);
        probe.displacements(n) = x + h;
        const Real up = cumulated_power_from_steering(r_x, steering_matrix(geom, targets, probe));
        probe.displacements(n) = x - h;
        const Real down = cumulated_power_from_steering(r_x, steering_matrix(geom, targets, probe));
        probe.displacements(n) = x;
        g(n) = (up - down) / (Real(2) * h);
    }
    return g;
}

} // namespace fimsense
