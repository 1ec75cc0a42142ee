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

#include "fimsense/bcd.hpp"
#include "fimsense/beampattern.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fimsense
{

inline constexpr const char *artifact_version = "0.1.0";

// Error classes map onto CLI exit codes 2, 3 and 4.
struct ConfigError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

struct GeometryBlock
{
    int n_x = 10;
    int n_z = 10;
    double dx_wavelengths = 0.5;
    double dz_wavelengths = 0.5;
    double frequency_hz = 28e9;
    double d_max_wavelengths = 1.0;

    bool operator==(const GeometryBlock &) const = default;
};

struct TargetSpec
{
    double theta_deg = 0;
    double phi_deg = 0;
    double rcs_re = 1;
    double rcs_im = 0;

    bool operator==(const TargetSpec &) const = default;
};

struct AlgorithmBlock
{
    Scheme scheme = Scheme::FimMimo;
    int max_outer_iters = 50;
    double rel_increase_threshold_db = -30.0;
    int n_starts = 4;
    InitScheme init_scheme = InitScheme::UniformBox;
    // At most one of these; meters are converted with the carrier wavelength.
    std::optional<std::vector<double>> initial_shape_wavelengths;
    std::optional<std::vector<double>> initial_shape_m;
    AscentConfig ascent;
    double sdp_tol = 1e-9;
    int sdp_max_iters = 500;
    int n_rand_samples = 1000;
    PaShapeObjective pa_shape_objective = PaShapeObjective::RankOne;

    bool operator==(const AlgorithmBlock &) const = default;
};

struct OutputBlock
{
    std::string dir = "out";
    int grid_theta_points = 181;
    int grid_phi_points = 181;

    bool operator==(const OutputBlock &) const = default;
};

struct ExperimentConfig
{
    GeometryBlock geometry;
    std::vector<TargetSpec> targets;
    double p_t_dbm = 10.0;
    AlgorithmBlock algorithm;
    OutputBlock output;
    std::uint64_t seed = 1;

    bool operator==(const ExperimentConfig &) const = default;

    ArrayGeometry array_geometry() const;
    TargetSet target_set() const;
    double p_t_mw() const;
    BcdConfig bcd_config(int threads = 1) const;

    // Throws ConfigError.
    void validate() const;
};

// The 10 x 10, 28 GHz, three-target setup at P_t = 10 dBm and d_max = 1 wavelength.
ExperimentConfig reference_config();

ExperimentConfig config_from_json(const nlohmann::json &j);
nlohmann::json to_json(const ExperimentConfig &cfg);
ExperimentConfig load_config(const std::filesystem::path &path);

// Hex FNV-1a 64 of the canonical JSON dump.
std::string digest(const nlohmann::json &j);

struct ResultRecord
{
    std::string config_digest;
    std::string scheme;
    double objective_mw = 0;
    double objective_dbm = 0;
    double sdr_objective_mw = 0;
    std::vector<double> per_target_dbm;
    int outer_iterations = 0;
    std::string termination_reason;
    std::vector<double> start_objectives_mw;
    std::optional<double> sdp_dual_bound_mw;
    int n_rand_samples = 0;
    double wall_time_s = 0;
    std::uint64_t seed = 0;
    std::string artifact_version = fimsense::artifact_version;

    bool operator==(const ResultRecord &) const = default;
};

nlohmann::json to_json(const ResultRecord &r);
ResultRecord record_from_json(const nlohmann::json &j);
// Digest over every field except wall time.
std::string record_digest(const ResultRecord &r);

ResultRecord make_record(const ExperimentConfig &cfg, const BenchmarkResult &result, double wall_time_s);

struct OptimizeOutcome
{
    BenchmarkResult result;
    ResultRecord record;
};

OptimizeOutcome run_scheme(const ExperimentConfig &cfg, Scheme scheme, int threads = 1);

// result.json, covariance.csv and shape.csv under dir.
void write_optimize_outputs(const std::filesystem::path &dir, const ExperimentConfig &cfg,
                            const OptimizeOutcome &outcome);

struct SweepPowerRow
{
    double p_t_dbm = 0;
    Scheme scheme = Scheme::FimMimo;
    double cumulated_mw = 0;
};

std::vector<SweepPowerRow> sweep_power(const ExperimentConfig &cfg, const std::vector<double> &p_t_dbm,
                                       int threads = 1);

struct SweepRangeRow
{
    double d_max_wavelengths = 0;
    int n_x = 0;
    int n_z = 0;
    double cumulated_mw = 0;
};

// FimMimo over increasing d_max per array size; each run is seeded with the previous optimum.
std::vector<SweepRangeRow> sweep_range(const ExperimentConfig &cfg, std::vector<double> d_max_wavelengths,
                                       const std::vector<std::pair<int, int>> &array_sizes, int threads = 1);

// ---- flat-file formats ----

void write_covariance_csv(const std::filesystem::path &path, const CMatrixXd &r);
CMatrixXd read_covariance_csv(const std::filesystem::path &path);
void write_shape_csv(const std::filesystem::path &path, const ArrayGeometry &geom, const SurfaceShape &shape);
SurfaceShape read_shape_csv(const std::filesystem::path &path);
void write_beampattern_csv(const std::filesystem::path &path, const BeampatternGrid &grid);
BeampatternGrid read_beampattern_csv(const std::filesystem::path &path);
void write_sweep_power_csv(const std::filesystem::path &path, const std::vector<SweepPowerRow> &rows);
void write_sweep_range_csv(const std::filesystem::path &path, const std::vector<SweepRangeRow> &rows);
void write_json(const std::filesystem::path &path, const nlohmann::json &j);
nlohmann::json read_json(const std::filesystem::path &path);

// Header plus rows of fields; no quoting, which none of the formats above need.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path &path);

} // namespace fimsense
