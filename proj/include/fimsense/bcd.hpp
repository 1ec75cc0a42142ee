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
#include "fimsense/cov_solver.hpp"
#include "fimsense/shape_opt.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace fimsense
{

enum class InitScheme
{
    Zero,       // the rigid start only
    UniformBox, // rigid start plus uniform draws in [-d_max, d_max]^N
    Provided,   // rigid start, the provided shape, then uniform draws
};

enum class Scheme
{
    RaaPa,   // rigid phased array
    FimPa,   // flexible phased array
    RaaMimo, // rigid MIMO
    FimMimo, // flexible MIMO
};

// Covariance that drives the shape gradient in the flexible phased-array scheme.
enum class PaShapeObjective
{
    RankOne, // w w^H of the current phased-array weights
    Relaxed, // the relaxed (MIMO) covariance the weights are drawn from
};

enum class TerminationReason
{
    Threshold,  // fractional increase fell below the threshold
    MaxIters,   // outer iteration cap
    Stationary, // the objective did not move at all
};

std::string_view to_string(InitScheme v);
std::string_view to_string(Scheme v);
std::string_view to_string(TerminationReason v);
std::string_view to_string(PaShapeObjective v);
PaShapeObjective pa_shape_objective_from_string(std::string_view s);
InitScheme init_scheme_from_string(std::string_view s);
Scheme scheme_from_string(std::string_view s);

inline constexpr Scheme all_schemes[] = {Scheme::RaaPa, Scheme::FimPa, Scheme::RaaMimo, Scheme::FimMimo};

struct BcdConfig
{
    int max_outer_iters = 50;
    double rel_increase_threshold_db = -30.0;
    AscentConfig ascent;
    int n_starts = 4;
    std::uint64_t rng_seed = 0;
    InitScheme init_scheme = InitScheme::UniformBox;

    // Used with InitScheme::Provided. A covariance paired with the shape is kept as the
    // incumbent of that start, so a warm start can never fall below its seed.
    std::optional<SurfaceShape> initial_shape;
    std::optional<CovarianceMatrix> initial_covariance;

    SdpOptions sdp{1e-9, 500};
    int n_rand_samples = 1000;
    PaShapeObjective pa_shape_objective = PaShapeObjective::RankOne;
    int threads = 1;

    double rel_increase_threshold() const;
    void validate() const;
};

struct OuterRecord
{
    int outer = 0;
    double objective_mw = 0;   // P_c after the shape block
    int inner_iterations = 0;
    double elapsed_s = 0;
    SolveStatus sdp_status = SolveStatus::Converged;
    AscentStatus ascent_status = AscentStatus::IterationLimit;
    bool kept_incumbent = false; // the SDP answer did not beat the previous covariance
    double rank1_mw = 0;         // best phased-array value so far, PA runs only
};

struct OptimizationTrace
{
    std::vector<OuterRecord> records;
    TerminationReason termination_reason = TerminationReason::MaxIters;
    int start_index = 0;
    std::vector<double> start_objectives; // final objective of every start

    int outer_iterations() const { return static_cast<int>(records.size()); }
};

struct BcdResult
{
    CovarianceMatrix covariance;
    SurfaceShape shape;
    double objective_mw = 0;
    OptimizationTrace trace;
};

// Alternating covariance / shape optimisation, best over all starts. The rigid start is
// always included so the result dominates the rigid design.
BcdResult bcd_optimize(const ArrayGeometry &geom, const TargetSet &targets, double p_t, const BcdConfig &cfg);

struct BenchmarkResult
{
    Scheme scheme = Scheme::FimMimo;
    // For PA schemes this is w w^H of the reported phased-array weights.
    CovarianceMatrix covariance;
    SurfaceShape shape;
    double objective_mw = 0;
    // Relaxed (MIMO) objective the PA weights were randomised from; equals objective_mw for MIMO.
    double sdr_objective_mw = 0;
    std::optional<CVectorXd> weights;
    std::optional<SolveReport> sdp_report;
    OptimizationTrace trace;
};

BenchmarkResult solve_benchmark(Scheme scheme, const ArrayGeometry &geom, const TargetSet &targets, double p_t,
                                const BcdConfig &cfg);

// Starting shapes for the configuration, start 0 always rigid.
std::vector<SurfaceShape> make_starts(const ArrayGeometry &geom, const BcdConfig &cfg);

} // namespace fimsense
