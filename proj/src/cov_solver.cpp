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

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace fimsense
{

std::string_view to_string(ConstraintKind kind)
{
    switch (kind)
    {
    case ConstraintKind::PerAntenna:
        return "PerAntenna";
    case ConstraintKind::TotalPower:
        return "TotalPower";
    }
    return "?";
}

std::string_view to_string(SolveStatus status)
{
    switch (status)
    {
    case SolveStatus::Converged:
        return "Converged";
    case SolveStatus::IterationLimit:
        return "IterationLimit";
    case SolveStatus::NumericalFailure:
        return "NumericalFailure";
    }
    return "?";
}

CovarianceMatrix CovarianceMatrix::isotropic(Eigen::Index n, double p_t, ConstraintKind kind)
{
    CovarianceMatrix c;
    c.r = CMatrixXd::Identity(n, n) * (p_t / static_cast<double>(n));
    c.power_budget = p_t;
    c.constraint_kind = kind;
    return c;
}

CovarianceMatrix CovarianceMatrix::from_weights(const CVectorXd &w, double p_t)
{
    CovarianceMatrix c;
    c.r = w * w.adjoint();
    c.power_budget = p_t;
    c.constraint_kind = ConstraintKind::PerAntenna;
    return c;
}

void CovarianceMatrix::validate(double tol) const
{
    const Eigen::Index n = r.rows();
    if (n == 0 || r.cols() != n)
        throw std::invalid_argument("covariance: matrix must be square and non-empty");
    if (!(power_budget > 0))
        throw std::invalid_argument("covariance: power budget must be positive");
    if ((r - r.adjoint()).cwiseAbs().maxCoeff() >= 1e-10 * std::max(1.0, r.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("covariance: matrix is not Hermitian");

    Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(r, Eigen::EigenvaluesOnly);
    const VectorXd &lambda = eig.eigenvalues();
    if (lambda(0) < -tol * std::max(std::abs(lambda(n - 1)), std::numeric_limits<double>::min()))
        throw std::invalid_argument("covariance: matrix is not positive semidefinite");

    if (constraint_kind == ConstraintKind::PerAntenna)
    {
        const double target = power_budget / static_cast<double>(n);
        const double dev = (r.diagonal().real().array() - target).abs().maxCoeff();
        if (dev > tol * target)
            throw std::invalid_argument("covariance: per-antenna power constraint violated");
    }
    else
    {
        const double dev = std::abs(r.trace().real() - power_budget);
        if (dev > tol * power_budget)
            throw std::invalid_argument("covariance: total power constraint violated");
    }
}

void validate_correlation(const CMatrixXd &b)
{
    if (b.rows() == 0 || b.rows() != b.cols())
        throw std::invalid_argument("correlation matrix must be square and non-empty");
    if (!b.allFinite())
        throw std::invalid_argument("correlation matrix has non-finite entries");
    if (!is_hermitian(b))
        throw std::invalid_argument("correlation matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(b, Eigen::EigenvaluesOnly);
    const VectorXd &lambda = eig.eigenvalues();
    if (lambda(0) < -1e-8 * std::max(std::abs(lambda(lambda.size() - 1)), 1e-300))
        throw std::invalid_argument("correlation matrix is not positive semidefinite");
}

namespace
{

CMatrixXd hermitian_part(const CMatrixXd &m) { return ((m + m.adjoint()) * 0.5).eval(); }

// Largest alpha in (0, inf] with base + alpha * step still PSD, given the Cholesky factor of base.
double max_psd_step(const Eigen::LLT<CMatrixXd> &base_llt, const CMatrixXd &step)
{
    const auto &l = base_llt.matrixL();
    CMatrixXd tmp = l.solve(step);
    CMatrixXd scaled = l.solve(tmp.adjoint()); // L^{-1} step L^{-H}
    scaled = hermitian_part(scaled);
    Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(scaled, Eigen::EigenvaluesOnly);
    const double lambda_min = eig.eigenvalues()(0);
    if (lambda_min >= 0)
        return std::numeric_limits<double>::infinity();
    return -1.0 / lambda_min;
}

double max_psd_step_diag(const Eigen::LLT<CMatrixXd> &base_llt, const VectorXd &dy)
{
    const CMatrixXd step = dy.cast<std::complex<double>>().asDiagonal();
    return max_psd_step(base_llt, step);
}

} // namespace

std::pair<CovarianceMatrix, SolveReport> solve_per_antenna_sdp(const CMatrixXd &b, double p_t,
                                                              const SdpOptions &options)
{
    validate_correlation(b);
    if (!(p_t > 0))
        throw std::invalid_argument("solve_per_antenna_sdp: p_t must be positive");
    if (!(options.tol > 0) || options.max_iters < 1)
        throw std::invalid_argument("solve_per_antenna_sdp: tol and max_iters must be positive");

    const Eigen::Index n = b.rows();
    const double per_antenna = p_t / static_cast<double>(n);

    CovarianceMatrix out;
    out.power_budget = p_t;
    out.constraint_kind = ConstraintKind::PerAntenna;
    SolveReport report;

    const double scale = b.diagonal().real().maxCoeff();
    if (!(scale > 0))
    {
        // B = 0: every feasible point is optimal.
        out = CovarianceMatrix::isotropic(n, p_t);
        report.dual_bound = 0.0;
        return {out, report};
    }

    // Work on diag(X) = 1 with B scaled to unit max diagonal.
    const CMatrixXd bn = b / scale;
    CMatrixXd x = CMatrixXd::Identity(n, n);
    VectorXd y = bn.cwiseAbs().rowwise().sum() + VectorXd::Ones(n); // Gershgorin: Diag(y) - B > 0

    auto dual_slack = [&](const VectorXd &yy) -> CMatrixXd {
        CMatrixXd z = -bn;
        z.diagonal() += yy.cast<std::complex<double>>();
        return z;
    };

    double sigma = 0.1;
    report.status = SolveStatus::IterationLimit;
    CMatrixXd best_x = x;
    VectorXd best_y = y;

    for (int it = 0; it < options.max_iters; ++it)
    {
        report.iterations = it;
        const CMatrixXd z = dual_slack(y);
        Eigen::LLT<CMatrixXd> z_llt(z);
        Eigen::LLT<CMatrixXd> x_llt(x);
        if (z_llt.info() != Eigen::Success || x_llt.info() != Eigen::Success)
        {
            report.status = SolveStatus::NumericalFailure;
            break;
        }
        best_x = x;
        best_y = y;

        const double primal = bn.cwiseProduct(x.transpose()).sum().real();
        const double dual = y.sum();
        const double gap = dual - primal;
        if (gap <= options.tol * std::abs(dual))
        {
            report.status = SolveStatus::Converged;
            break;
        }

        const double mu = sigma * gap / static_cast<double>(n);
        const CMatrixXd z_inv = z_llt.solve(CMatrixXd::Identity(n, n));

        // Schur complement: Re(X o conj(Z^-1)) dy = mu diag(Z^-1) - 1
        const Eigen::MatrixXd schur = x.cwiseProduct(z_inv.conjugate()).real();
        const VectorXd rhs = mu * z_inv.diagonal().real() - VectorXd::Ones(n);
        Eigen::LLT<Eigen::MatrixXd> schur_llt(schur);
        if (schur_llt.info() != Eigen::Success)
        {
            report.status = SolveStatus::NumericalFailure;
            break;
        }
        const VectorXd dy = schur_llt.solve(rhs);

        CMatrixXd dx = mu * z_inv - x - x * dy.cast<std::complex<double>>().asDiagonal() * z_inv;
        dx = hermitian_part(dx);

        const double alpha_p = std::min(1.0, 0.95 * max_psd_step(x_llt, dx));
        const double alpha_d = std::min(1.0, 0.95 * max_psd_step_diag(z_llt, dy));
        if (!(alpha_p > 1e-14) || !(alpha_d > 1e-14))
        {
            report.status = SolveStatus::NumericalFailure;
            break;
        }

        x += alpha_p * dx;
        x = hermitian_part(x);
        y += alpha_d * dy;

        const double alpha = std::min(alpha_p, alpha_d);
        sigma = std::clamp((1.0 - alpha) * (1.0 - alpha), 0.02, 0.5);
        report.iterations = it + 1;
    }

    // Restore diag(X) = 1 exactly by congruence with D^{-1/2}; keeps X PSD.
    const VectorXd d_inv_sqrt = best_x.diagonal().real().cwiseSqrt().cwiseInverse();
    CMatrixXd xn = d_inv_sqrt.cast<std::complex<double>>().asDiagonal() * best_x *
                   d_inv_sqrt.cast<std::complex<double>>().asDiagonal();
    xn = hermitian_part(xn);
    xn.diagonal().setOnes();

    out.r = per_antenna * xn;
    report.objective = cumulated_power(out.r, ResponseMatrix{CMatrixXd(), b});

    // Certificate: shift y until Diag(y) - B is PSD (a no-op for strictly feasible iterates).
    Eigen::SelfAdjointEigenSolver<CMatrixXd> zeig(dual_slack(best_y), Eigen::EigenvaluesOnly);
    const double z_min = zeig.eigenvalues()(0);
    const double shift = z_min < 0 ? -z_min : 0.0;
    const double bound = per_antenna * scale * (best_y.sum() + shift * static_cast<double>(n));
    report.dual_bound = bound;
    report.dual_residual = shift * static_cast<double>(n) / std::max(best_y.sum(), 1e-300);
    report.relative_gap = (bound - report.objective) / std::abs(bound);
    report.primal_residual = (out.r.diagonal().real().array() - per_antenna).abs().maxCoeff() / per_antenna;
    if (report.status == SolveStatus::NumericalFailure && report.relative_gap <= options.tol)
        report.status = SolveStatus::Converged;
    return {out, report};
}

std::pair<CovarianceMatrix, double> closed_form_total_power(const CMatrixXd &b, double p_t)
{
    validate_correlation(b);
    if (!(p_t > 0))
        throw std::invalid_argument("closed_form_total_power: p_t must be positive");
    Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(b);
    const Eigen::Index top = b.rows() - 1;
    const CVectorXd u = eig.eigenvectors().col(top).normalized();

    CovarianceMatrix out;
    out.r = p_t * (u * u.adjoint());
    out.power_budget = p_t;
    out.constraint_kind = ConstraintKind::TotalPower;
    return {out, p_t * eig.eigenvalues()(top)};
}

Rank1Solution randomize_rank1(const CovarianceMatrix &r, const CMatrixXd &b, double p_t, int n_samples,
                              std::uint64_t seed)
{
    const Eigen::Index n = r.size();
    if (n_samples < 1)
        throw std::invalid_argument("randomize_rank1: n_samples must be >= 1");
    if (b.rows() != n || b.cols() != n)
        throw std::invalid_argument("randomize_rank1: dimension mismatch");
    if (!(p_t > 0))
        throw std::invalid_argument("randomize_rank1: p_t must be positive");
    if (!(r.r.trace().real() > 1e-12 * p_t))
        throw std::invalid_argument("randomize_rank1: covariance is numerically zero");

    // R = L L^H via the eigendecomposition; R may be rank deficient.
    Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(hermitian_part(r.r));
    const VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const CMatrixXd l = eig.eigenvectors() * root.cast<std::complex<double>>().asDiagonal();

    const double amplitude = std::sqrt(p_t / static_cast<double>(n));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));

    Rank1Solution best;
    best.seed = seed;
    best.n_samples = n_samples;
    best.value = -std::numeric_limits<double>::infinity();

    CVectorXd z(n), w(n);
    for (int s = 0; s < n_samples; ++s)
    {
        for (Eigen::Index i = 0; i < n; ++i)
        {
            const double re = normal(rng);
            const double im = normal(rng);
            z(i) = {re, im};
        }
        const CVectorXd xi = l * z;
        for (Eigen::Index i = 0; i < n; ++i)
            w(i) = std::polar(amplitude, std::abs(xi(i)) > 0 ? std::arg(xi(i)) : 0.0);
        const double value = w.dot(b * w).real();
        if (value > best.value)
        {
            best.value = value;
            best.weights = w;
            best.best_index = s;
        }
    }
    return best;
}

RankProfile rank_profile(const CMatrixXd &b, Eigen::Index n_targets)
{
    validate_correlation(b);
    Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(b, Eigen::EigenvaluesOnly);
    RankProfile out;
    out.eigenvalues = eig.eigenvalues().reverse().cwiseMax(0.0);
    out.trace_check = std::abs(out.eigenvalues.sum() - static_cast<double>(n_targets * b.rows()));
    return out;
}

Eigen::Index numerical_rank(const VectorXd &eigenvalues, double rel_cutoff)
{
    if (eigenvalues.size() == 0)
        return 0;
    const double top = eigenvalues.maxCoeff();
    if (!(top > 0))
        return 0;
    return (eigenvalues.array() > rel_cutoff * top).count();
}

} // namespace fimsense
