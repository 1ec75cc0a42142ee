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

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>

namespace fimsense
{

enum class ConstraintKind
{
    PerAntenna, // diag(R) = P_t / N_t
    TotalPower, // tr(R) = P_t
};

std::string_view to_string(ConstraintKind kind);

// Hermitian PSD transmit covariance together with the power constraint it satisfies.
struct CovarianceMatrix
{
    CMatrixXd r;
    double power_budget = 0; // mW
    ConstraintKind constraint_kind = ConstraintKind::PerAntenna;

    Eigen::Index size() const { return r.rows(); }

    // (P_t / N_t) I, feasible for both constraint kinds.
    static CovarianceMatrix isotropic(Eigen::Index n, double p_t, ConstraintKind kind = ConstraintKind::PerAntenna);

    // w w^H for a phased-array weight vector.
    static CovarianceMatrix from_weights(const CVectorXd &w, double p_t);

    // Throws std::invalid_argument if the Hermitian, PSD or power invariants are violated.
    void validate(double tol = 1e-8) const;
};

enum class SolveStatus
{
    Converged,
    IterationLimit,
    NumericalFailure,
};

std::string_view to_string(SolveStatus status);

struct SolveReport
{
    double objective = 0; // mW
    int iterations = 0;
    double primal_residual = 0;       // max |diag(R) - P_t/N_t| / (P_t/N_t)
    double dual_residual = 0;         // max(0, -lambda_min(Diag(y) - B)) relative to the bound
    double relative_gap = 0;          // (bound - objective) / bound
    std::optional<double> dual_bound; // mW, valid upper bound on the optimum
    SolveStatus status = SolveStatus::Converged;
};

struct SdpOptions
{
    double tol = 1e-6; // relative duality gap
    int max_iters = 500;
};

// Maximise tr(R B) subject to diag(R) = P_t / N_t and R PSD.
//
// Primal-dual path following on the pair
//   max tr(B X)  s.t. diag(X) = 1, X >= 0
//   min 1^T y    s.t. Diag(y) - B >= 0
// with the HKM search direction. Dual iterates stay strictly feasible, so
// (P_t / N_t) 1^T y is an upper bound on the optimum at every step and is
// reported as the certificate.
std::pair<CovarianceMatrix, SolveReport> solve_per_antenna_sdp(const CMatrixXd &b, double p_t,
                                                              const SdpOptions &options = {});

// R = P_t u u^H with u the principal eigenvector of B; the attained power is P_t lambda_max(B).
std::pair<CovarianceMatrix, double> closed_form_total_power(const CMatrixXd &b, double p_t);

struct Rank1Solution
{
    CVectorXd weights; // |w_n| = sqrt(P_t / N_t)
    double value = 0;  // w^H B w, mW
    std::uint64_t seed = 0;
    int n_samples = 0;
    int best_index = 0; // sample that produced the returned weights
};

// Gaussian randomisation: draw xi ~ CN(0, R), keep the phases, rescale every entry to the
// per-antenna amplitude and return the best candidate by w^H B w. Samples come from one
// sequential stream, so a run with more samples sees a superset of a shorter run.
Rank1Solution randomize_rank1(const CovarianceMatrix &r, const CMatrixXd &b, double p_t, int n_samples,
                              std::uint64_t seed);

struct RankProfile
{
    VectorXd eigenvalues; // descending
    double trace_check = 0; // |sum(lambda) - K N_t|
};

RankProfile rank_profile(const CMatrixXd &b, Eigen::Index n_targets);

// Number of eigenvalues above rel_cutoff * lambda_max.
Eigen::Index numerical_rank(const VectorXd &eigenvalues, double rel_cutoff = 1e-8);

// Throws std::invalid_argument unless b is square, Hermitian and PSD up to -1e-8 lambda_max.
void validate_correlation(const CMatrixXd &b);

} // namespace fimsense
