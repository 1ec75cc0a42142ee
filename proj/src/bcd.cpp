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

#include "fimsense/bcd.hpp"
#include "fimsense/objective.hpp"
#include "fimsense/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

namespace fimsense
{

std::string_view to_string(InitScheme v)
{
    switch (v)
    {
    case InitScheme::Zero:
        return "Zero";
    case InitScheme::UniformBox:
        return "UniformBox";
    case InitScheme::Provided:
        return "Provided";
    }
    return "?";
}

std::string_view to_string(Scheme v)
{
    switch (v)
    {
    case Scheme::RaaPa:
        return "RaaPa";
    case Scheme::FimPa:
        return "FimPa";
    case Scheme::RaaMimo:
        return "RaaMimo";
    case Scheme::FimMimo:
        return "FimMimo";
    }
    return "?";
}

std::string_view to_string(TerminationReason v)
{
    switch (v)
    {
    case TerminationReason::Threshold:
        return "Threshold";
    case TerminationReason::MaxIters:
        return "MaxIters";
    case TerminationReason::Stationary:
        return "Stationary";
    }
    return "?";
}

std::string_view to_string(PaShapeObjective v)
{
    switch (v)
    {
    case PaShapeObjective::RankOne:
        return "RankOne";
    case PaShapeObjective::Relaxed:
        return "Relaxed";
    }
    return "?";
}

PaShapeObjective pa_shape_objective_from_string(std::string_view s)
{
    for (auto v : {PaShapeObjective::RankOne, PaShapeObjective::Relaxed})
        if (to_string(v) == s)
            return v;
    throw std::invalid_argument("unknown phased-array shape objective '" + std::string(s) + "'");
}

InitScheme init_scheme_from_string(std::string_view s)
{
    for (auto v : {InitScheme::Zero, InitScheme::UniformBox, InitScheme::Provided})
        if (to_string(v) == s)
            return v;
    throw std::invalid_argument("unknown init scheme '" + std::string(s) + "'");
}

Scheme scheme_from_string(std::string_view s)
{
    for (auto v : all_schemes)
        if (to_string(v) == s)
            return v;
    throw std::invalid_argument("unknown scheme '" + std::string(s) + "'");
}

double BcdConfig::rel_increase_threshold() const { return std::pow(10.0, rel_increase_threshold_db / 10.0); }

void BcdConfig::validate() const
{
    if (max_outer_iters < 1)
        throw std::invalid_argument("bcd config: max_outer_iters must be >= 1");
    if (n_starts < 1)
        throw std::invalid_argument("bcd config: n_starts must be >= 1");
    if (n_rand_samples < 1)
        throw std::invalid_argument("bcd config: n_rand_samples must be >= 1");
    if (!std::isfinite(rel_increase_threshold_db))
        throw std::invalid_argument("bcd config: threshold must be finite");
    if (init_scheme == InitScheme::Provided && !initial_shape)
        throw std::invalid_argument("bcd config: Provided init scheme needs an initial shape");
    if (initial_covariance && !initial_shape)
        throw std::invalid_argument("bcd config: an initial covariance needs its initial shape");
    ascent.validate();
}

std::vector<SurfaceShape> make_starts(const ArrayGeometry &geom, const BcdConfig &cfg)
{
    const Eigen::Index n = geom.size();
    std::vector<SurfaceShape> starts;
    starts.push_back(SurfaceShape::zero(n));
    if (cfg.init_scheme == InitScheme::Zero)
        return starts;
    if (cfg.init_scheme == InitScheme::Provided)
    {
        cfg.initial_shape->validate(geom);
        starts.push_back(*cfg.initial_shape);
    }
    while (static_cast<int>(starts.size()) < cfg.n_starts)
    {
        const auto index = static_cast<std::uint32_t>(starts.size());
        std::seed_seq seq{static_cast<std::uint32_t>(cfg.rng_seed), static_cast<std::uint32_t>(cfg.rng_seed >> 32),
                          index};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> uniform(-geom.d_max, geom.d_max);
        SurfaceShape s = SurfaceShape::zero(n);
        if (geom.d_max > 0)
            for (Eigen::Index i = 0; i < n; ++i)
                s.displacements(i) = uniform(rng);
        starts.push_back(std::move(s));
    }
    return starts;
}

namespace
{

struct StartOutcome
{
    CovarianceMatrix covariance;
    SurfaceShape shape;
    double objective = -std::numeric_limits<double>::infinity();
    OptimizationTrace trace;

    // Phased-array bookkeeping.
    CVectorXd pa_weights;
    SurfaceShape pa_shape;
    double pa_value = -std::numeric_limits<double>::infinity();
    double pa_sdr_value = 0;
};

double rank1_power(const CVectorXd &w, const CMatrixXd &a)
{
    return (a.adjoint() * w).squaredNorm();
}

enum class Mode
{
    Mimo,
    PaRelaxed,
    PaRankOne,
};

StartOutcome run_start(const ArrayGeometry &geom, const TargetSet &targets, double p_t, const BcdConfig &cfg,
                       const SurfaceShape &start, const std::optional<CovarianceMatrix> &incumbent, Mode mode)
{
    using clock = std::chrono::steady_clock;
    const bool phased = mode != Mode::Mimo;
    StartOutcome out;
    out.shape = start;
    std::optional<CovarianceMatrix> current = incumbent;
    double previous = std::numeric_limits<double>::quiet_NaN();
    out.trace.termination_reason = TerminationReason::MaxIters;

    for (int t = 1; t <= cfg.max_outer_iters; ++t)
    {
        const auto t0 = clock::now();
        OuterRecord rec;
        rec.outer = t;

        const ResponseMatrix rm = response_matrix(geom, targets, out.shape);
        auto [sdp_cov, report] = solve_per_antenna_sdp(rm.b, p_t, cfg.sdp);
        rec.sdp_status = report.status;
        if (current && cumulated_power(current->r, rm) > report.objective)
            rec.kept_incumbent = true;
        else
            current = std::move(sdp_cov);

        if (phased)
        {
            const Rank1Solution r1 = randomize_rank1(*current, rm.b, p_t, cfg.n_rand_samples, cfg.rng_seed);
            const double held = out.pa_weights.size() ? rank1_power(out.pa_weights, rm.a)
                                                      : -std::numeric_limits<double>::infinity();
            if (mode == Mode::PaRankOne)
            {
                // Weights only change when the new draw beats the current ones at this shape.
                if (r1.value > held)
                    out.pa_weights = r1.weights;
                out.pa_value = std::max(r1.value, held);
                out.pa_shape = out.shape;
                out.pa_sdr_value = cumulated_power(current->r, rm);
            }
            else if (r1.value > out.pa_value)
            {
                out.pa_value = r1.value;
                out.pa_weights = r1.weights;
                out.pa_shape = out.shape;
                out.pa_sdr_value = cumulated_power(current->r, rm);
            }
        }

        const CMatrixXd drive = mode == Mode::PaRankOne ? CMatrixXd(out.pa_weights * out.pa_weights.adjoint())
                                                        : current->r;
        auto [next_shape, inner] = ascend_shape(drive, geom, targets, out.shape, cfg.ascent);
        out.shape = std::move(next_shape);
        rec.inner_iterations = inner.iterations;
        rec.ascent_status = inner.status;
        rec.objective_mw = inner.objective.back();

        if (mode == Mode::PaRankOne)
        {
            out.pa_value = rec.objective_mw;
            out.pa_shape = out.shape;
            out.pa_sdr_value = cumulated_power_from_steering(current->r, steering_matrix(geom, targets, out.shape));
            rec.rank1_mw = out.pa_value;
        }
        else if (mode == Mode::PaRelaxed)
        {
            // The weights drawn at the old shape are still feasible at the new one.
            const double moved = rank1_power(out.pa_weights, steering_matrix(geom, targets, out.shape));
            if (moved > out.pa_value)
            {
                out.pa_value = moved;
                out.pa_shape = out.shape;
                out.pa_sdr_value = rec.objective_mw;
            }
            rec.rank1_mw = out.pa_value;
        }

        rec.elapsed_s = std::chrono::duration<double>(clock::now() - t0).count();
        out.trace.records.push_back(rec);

        if (!std::isnan(previous))
        {
            const double increase = rec.objective_mw - previous;
            if (increase == 0.0)
            {
                out.trace.termination_reason = TerminationReason::Stationary;
                break;
            }
            if (increase / previous < cfg.rel_increase_threshold())
            {
                out.trace.termination_reason = TerminationReason::Threshold;
                break;
            }
        }
        previous = rec.objective_mw;
    }

    out.covariance = *current;
    out.objective = out.trace.records.back().objective_mw;
    return out;
}

std::vector<StartOutcome> run_all_starts(const ArrayGeometry &geom, const TargetSet &targets, double p_t,
                                         const BcdConfig &cfg, Mode mode)
{
    const std::vector<SurfaceShape> starts = make_starts(geom, cfg);
    std::vector<StartOutcome> outcomes(starts.size());
    parallel_for(starts.size(), cfg.threads, [&](std::size_t i) {
        std::optional<CovarianceMatrix> incumbent;
        if (cfg.init_scheme == InitScheme::Provided && i == 1)
            incumbent = cfg.initial_covariance;
        outcomes[i] = run_start(geom, targets, p_t, cfg, starts[i], incumbent, mode);
        outcomes[i].trace.start_index = static_cast<int>(i);
    });
    return outcomes;
}

void check_inputs(const ArrayGeometry &geom, const TargetSet &targets, double p_t, const BcdConfig &cfg)
{
    geom.validate();
    validate_targets(targets);
    if (!(p_t > 0))
        throw std::invalid_argument("transmit power must be positive");
    cfg.validate();
}

} // namespace

BcdResult bcd_optimize(const ArrayGeometry &geom, const TargetSet &targets, double p_t, const BcdConfig &cfg)
{
    check_inputs(geom, targets, p_t, cfg);
    std::vector<StartOutcome> outcomes = run_all_starts(geom, targets, p_t, cfg, Mode::Mimo);

    std::size_t best = 0;
    std::vector<double> objectives;
    for (std::size_t i = 0; i < outcomes.size(); ++i)
    {
        objectives.push_back(outcomes[i].objective);
        if (outcomes[i].objective > outcomes[best].objective)
            best = i;
    }
    BcdResult result{outcomes[best].covariance, outcomes[best].shape, outcomes[best].objective,
                     std::move(outcomes[best].trace)};
    result.trace.start_objectives = std::move(objectives);
    return result;
}

BenchmarkResult solve_benchmark(Scheme scheme, const ArrayGeometry &geom, const TargetSet &targets, double p_t,
                                const BcdConfig &cfg)
{
    check_inputs(geom, targets, p_t, cfg);
    BenchmarkResult out;
    out.scheme = scheme;

    if (scheme == Scheme::RaaMimo || scheme == Scheme::RaaPa)
    {
        out.shape = SurfaceShape::zero(geom.size());
        const ResponseMatrix rm = response_matrix(geom, targets, out.shape);
        auto [cov, report] = solve_per_antenna_sdp(rm.b, p_t, cfg.sdp);
        out.sdp_report = report;
        out.sdr_objective_mw = report.objective;
        OuterRecord rec;
        rec.outer = 1;
        rec.sdp_status = report.status;
        rec.objective_mw = report.objective;
        if (scheme == Scheme::RaaMimo)
        {
            out.covariance = std::move(cov);
            out.objective_mw = report.objective;
        }
        else
        {
            const Rank1Solution r1 = randomize_rank1(cov, rm.b, p_t, cfg.n_rand_samples, cfg.rng_seed);
            out.weights = r1.weights;
            out.covariance = CovarianceMatrix::from_weights(r1.weights, p_t);
            out.objective_mw = r1.value;
            rec.rank1_mw = r1.value;
        }
        out.trace.records.push_back(rec);
        out.trace.termination_reason = TerminationReason::MaxIters;
        out.trace.start_objectives = {out.objective_mw};
        return out;
    }

    if (scheme == Scheme::FimMimo)
    {
        BcdResult r = bcd_optimize(geom, targets, p_t, cfg);
        out.covariance = std::move(r.covariance);
        out.shape = std::move(r.shape);
        out.objective_mw = r.objective_mw;
        out.sdr_objective_mw = r.objective_mw;
        out.trace = std::move(r.trace);
        return out;
    }

    // FimPa: BCD on the relaxation, randomised to rank one at every outer step.
    std::vector<StartOutcome> outcomes = run_all_starts(geom, targets, p_t, cfg,
                                                   cfg.pa_shape_objective == PaShapeObjective::RankOne
                                                       ? Mode::PaRankOne
                                                       : Mode::PaRelaxed);
    std::size_t best = 0;
    std::vector<double> objectives;
    for (std::size_t i = 0; i < outcomes.size(); ++i)
    {
        objectives.push_back(outcomes[i].pa_value);
        if (outcomes[i].pa_value > outcomes[best].pa_value)
            best = i;
    }
    StartOutcome &b = outcomes[best];
    out.weights = b.pa_weights;
    out.covariance = CovarianceMatrix::from_weights(b.pa_weights, p_t);
    out.shape = std::move(b.pa_shape);
    out.objective_mw = b.pa_value;
    out.sdr_objective_mw = b.pa_sdr_value;
    out.trace = std::move(b.trace);
    out.trace.start_objectives = std::move(objectives);
    return out;
}

} // namespace fimsense
