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

#include "fimsense/experiment.hpp"
#include "fimsense/objective.hpp"
#include "fimsense/parallel.hpp"
#include "fimsense/units.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace fimsense
{

using nlohmann::json;

// ---------------------------------------------------------------- config

ArrayGeometry ExperimentConfig::array_geometry() const
{
    ArrayGeometry g;
    g.n_x = geometry.n_x;
    g.n_z = geometry.n_z;
    g.dx = geometry.dx_wavelengths;
    g.dz = geometry.dz_wavelengths;
    g.wavelength = wavelength_from_frequency(geometry.frequency_hz);
    g.d_max = geometry.d_max_wavelengths;
    return g;
}

TargetSet ExperimentConfig::target_set() const
{
    TargetSet out;
    for (const auto &t : targets)
        out.push_back({deg_to_rad(t.theta_deg), deg_to_rad(t.phi_deg), {t.rcs_re, t.rcs_im}});
    return out;
}

double ExperimentConfig::p_t_mw() const { return dbm_to_mw(p_t_dbm); }

BcdConfig ExperimentConfig::bcd_config(int threads) const
{
    BcdConfig c;
    c.max_outer_iters = algorithm.max_outer_iters;
    c.rel_increase_threshold_db = algorithm.rel_increase_threshold_db;
    c.ascent = algorithm.ascent;
    c.n_starts = algorithm.n_starts;
    c.rng_seed = seed;
    c.init_scheme = algorithm.init_scheme;
    if (algorithm.initial_shape_wavelengths)
        c.initial_shape = SurfaceShape{Eigen::Map<const VectorXd>(algorithm.initial_shape_wavelengths->data(),
                                                                  algorithm.initial_shape_wavelengths->size())};
    else if (algorithm.initial_shape_m)
    {
        const ArrayGeometry g = array_geometry();
        VectorXd d = Eigen::Map<const VectorXd>(algorithm.initial_shape_m->data(), algorithm.initial_shape_m->size());
        c.initial_shape = SurfaceShape{d / g.wavelength};
    }
    c.sdp = {algorithm.sdp_tol, algorithm.sdp_max_iters};
    c.n_rand_samples = algorithm.n_rand_samples;
    c.pa_shape_objective = algorithm.pa_shape_objective;
    c.threads = threads;
    return c;
}

void ExperimentConfig::validate() const
{
    try
    {
        if (!(geometry.frequency_hz > 0) || !std::isfinite(geometry.frequency_hz))
            throw std::invalid_argument("geometry.frequency_hz must be positive");
        const ArrayGeometry g = array_geometry();
        g.validate();
        if (targets.empty())
            throw std::invalid_argument("targets must not be empty");
        for (const auto &t : targets)
            if (!(t.theta_deg >= 0 && t.theta_deg <= 180) || !(t.phi_deg >= 0 && t.phi_deg <= 180))
                throw std::invalid_argument("target angles must lie in [0, 180] degrees");
        if (!std::isfinite(p_t_dbm))
            throw std::invalid_argument("power.p_t_dbm must be finite");
        if (algorithm.initial_shape_wavelengths && algorithm.initial_shape_m)
            throw std::invalid_argument("give initial_shape_wavelengths or initial_shape_m, not both");
        if (algorithm.sdp_max_iters < 1 || !(algorithm.sdp_tol > 0))
            throw std::invalid_argument("sdp_tol and sdp_max_iters must be positive");
        const BcdConfig c = bcd_config();
        if (algorithm.init_scheme == InitScheme::Provided && !c.initial_shape)
            throw std::invalid_argument("init_scheme Provided needs an initial shape");
        if (c.initial_shape)
            c.initial_shape->validate(g);
        c.validate();
        if (output.grid_theta_points < 2 || output.grid_phi_points < 2)
            throw std::invalid_argument("beampattern grids need at least two points per axis");
        if (output.dir.empty())
            throw std::invalid_argument("output.dir must not be empty");
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(e.what());
    }
}

ExperimentConfig reference_config()
{
    ExperimentConfig c;
    c.targets = {{30, 60, 1, 0}, {30, 120, 1, 0}, {135, 90, 1, 0}};
    return c;
}

namespace
{

// Rejects keys outside `allowed`.
void check_keys(const json &j, const std::set<std::string> &allowed, const std::string &where)
{
    if (!j.is_object())
        throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.contains(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
void read_opt(const json &j, const char *key, T &dst, const std::string &where)
{
    if (!j.contains(key))
        return;
    try
    {
        dst = j.at(key).get<T>();
    }
    catch (const json::exception &)
    {
        throw ConfigError(where + "." + key + " has the wrong type");
    }
}

template <typename T>
void read_req(const json &j, const char *key, T &dst, const std::string &where)
{
    if (!j.contains(key))
        throw ConfigError("missing " + where + "." + key);
    read_opt(j, key, dst, where);
}

} // namespace

ExperimentConfig config_from_json(const json &j)
{
    ExperimentConfig c;
    check_keys(j, {"geometry", "targets", "power", "algorithm", "output", "seed"}, "config");

    if (!j.contains("geometry") || !j.contains("targets") || !j.contains("power"))
        throw ConfigError("config needs geometry, targets and power blocks");

    const json &g = j.at("geometry");
    check_keys(g, {"n_x", "n_z", "dx_wavelengths", "dz_wavelengths", "frequency_hz", "d_max_wavelengths"},
               "geometry");
    read_req(g, "n_x", c.geometry.n_x, "geometry");
    read_req(g, "n_z", c.geometry.n_z, "geometry");
    read_opt(g, "dx_wavelengths", c.geometry.dx_wavelengths, "geometry");
    read_opt(g, "dz_wavelengths", c.geometry.dz_wavelengths, "geometry");
    read_opt(g, "frequency_hz", c.geometry.frequency_hz, "geometry");
    read_req(g, "d_max_wavelengths", c.geometry.d_max_wavelengths, "geometry");

    const json &ts = j.at("targets");
    if (!ts.is_array())
        throw ConfigError("targets must be an array");
    for (const json &t : ts)
    {
        check_keys(t, {"theta_deg", "phi_deg", "rcs_re", "rcs_im"}, "targets[]");
        TargetSpec spec;
        read_req(t, "theta_deg", spec.theta_deg, "targets[]");
        read_req(t, "phi_deg", spec.phi_deg, "targets[]");
        read_opt(t, "rcs_re", spec.rcs_re, "targets[]");
        read_opt(t, "rcs_im", spec.rcs_im, "targets[]");
        c.targets.push_back(spec);
    }

    const json &p = j.at("power");
    check_keys(p, {"p_t_dbm"}, "power");
    read_req(p, "p_t_dbm", c.p_t_dbm, "power");

    if (j.contains("algorithm"))
    {
        const json &a = j.at("algorithm");
        check_keys(a,
                   {"scheme", "max_outer_iters", "rel_increase_threshold_db", "n_starts", "init_scheme",
                    "initial_shape_wavelengths", "initial_shape_m", "ascent", "sdp_tol", "sdp_max_iters",
                    "n_rand_samples", "pa_shape_objective"},
                   "algorithm");
        AlgorithmBlock &alg = c.algorithm;
        try
        {
            if (a.contains("scheme"))
                alg.scheme = scheme_from_string(a.at("scheme").get<std::string>());
            if (a.contains("init_scheme"))
                alg.init_scheme = init_scheme_from_string(a.at("init_scheme").get<std::string>());
            if (a.contains("pa_shape_objective"))
                alg.pa_shape_objective = pa_shape_objective_from_string(a.at("pa_shape_objective").get<std::string>());
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(e.what());
        }
        catch (const json::exception &)
        {
            throw ConfigError("algorithm enums must be strings");
        }
        read_opt(a, "max_outer_iters", alg.max_outer_iters, "algorithm");
        read_opt(a, "rel_increase_threshold_db", alg.rel_increase_threshold_db, "algorithm");
        read_opt(a, "n_starts", alg.n_starts, "algorithm");
        if (a.contains("initial_shape_wavelengths"))
        {
            std::vector<double> v;
            read_opt(a, "initial_shape_wavelengths", v, "algorithm");
            alg.initial_shape_wavelengths = std::move(v);
        }
        if (a.contains("initial_shape_m"))
        {
            std::vector<double> v;
            read_opt(a, "initial_shape_m", v, "algorithm");
            alg.initial_shape_m = std::move(v);
        }
        read_opt(a, "sdp_tol", alg.sdp_tol, "algorithm");
        read_opt(a, "sdp_max_iters", alg.sdp_max_iters, "algorithm");
        read_opt(a, "n_rand_samples", alg.n_rand_samples, "algorithm");
        if (a.contains("ascent"))
        {
            const json &as = a.at("ascent");
            check_keys(as, {"grad_tol", "max_iters", "armijo_c", "shrink", "initial_step_wavelengths",
                            "min_step_wavelengths"},
                       "algorithm.ascent");
            read_opt(as, "grad_tol", alg.ascent.grad_tol, "algorithm.ascent");
            read_opt(as, "max_iters", alg.ascent.max_iters, "algorithm.ascent");
            read_opt(as, "armijo_c", alg.ascent.armijo_c, "algorithm.ascent");
            read_opt(as, "shrink", alg.ascent.shrink, "algorithm.ascent");
            read_opt(as, "initial_step_wavelengths", alg.ascent.initial_step, "algorithm.ascent");
            read_opt(as, "min_step_wavelengths", alg.ascent.min_step, "algorithm.ascent");
        }
    }

    if (j.contains("output"))
    {
        const json &o = j.at("output");
        check_keys(o, {"dir", "grid_theta_points", "grid_phi_points"}, "output");
        read_opt(o, "dir", c.output.dir, "output");
        read_opt(o, "grid_theta_points", c.output.grid_theta_points, "output");
        read_opt(o, "grid_phi_points", c.output.grid_phi_points, "output");
    }

    read_opt(j, "seed", c.seed, "config");
    c.validate();
    return c;
}

json to_json(const ExperimentConfig &c)
{
    json targets = json::array();
    for (const auto &t : c.targets)
        targets.push_back({{"theta_deg", t.theta_deg}, {"phi_deg", t.phi_deg}, {"rcs_re", t.rcs_re}, {"rcs_im", t.rcs_im}});

    const AlgorithmBlock &a = c.algorithm;
    json alg = {
        {"scheme", std::string(to_string(a.scheme))},
        {"max_outer_iters", a.max_outer_iters},
        {"rel_increase_threshold_db", a.rel_increase_threshold_db},
        {"n_starts", a.n_starts},
        {"init_scheme", std::string(to_string(a.init_scheme))},
        {"ascent",
         {{"grad_tol", a.ascent.grad_tol},
          {"max_iters", a.ascent.max_iters},
          {"armijo_c", a.ascent.armijo_c},
          {"shrink", a.ascent.shrink},
          {"initial_step_wavelengths", a.ascent.initial_step},
          {"min_step_wavelengths", a.ascent.min_step}}},
        {"sdp_tol", a.sdp_tol},
        {"sdp_max_iters", a.sdp_max_iters},
        {"n_rand_samples", a.n_rand_samples},
        {"pa_shape_objective", std::string(to_string(a.pa_shape_objective))},
    };
    if (a.initial_shape_wavelengths)
        alg["initial_shape_wavelengths"] = *a.initial_shape_wavelengths;
    if (a.initial_shape_m)
        alg["initial_shape_m"] = *a.initial_shape_m;

    return {
        {"geometry",
         {{"n_x", c.geometry.n_x},
          {"n_z", c.geometry.n_z},
          {"dx_wavelengths", c.geometry.dx_wavelengths},
          {"dz_wavelengths", c.geometry.dz_wavelengths},
          {"frequency_hz", c.geometry.frequency_hz},
          {"d_max_wavelengths", c.geometry.d_max_wavelengths}}},
        {"targets", targets},
        {"power", {{"p_t_dbm", c.p_t_dbm}}},
        {"algorithm", alg},
        {"output",
         {{"dir", c.output.dir},
          {"grid_theta_points", c.output.grid_theta_points},
          {"grid_phi_points", c.output.grid_phi_points}}},
        {"seed", c.seed},
    };
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open config " + path.string());
    json j;
    try
    {
        in >> j;
    }
    catch (const json::parse_error &e)
    {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return config_from_json(j);
}

std::string digest(const json &j)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : j.dump())
    {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

// ---------------------------------------------------------------- records

json to_json(const ResultRecord &r)
{
    json j = {
        {"config_digest", r.config_digest},
        {"scheme", r.scheme},
        {"objective_mw", r.objective_mw},
        {"objective_dbm", r.objective_dbm},
        {"sdr_objective_mw", r.sdr_objective_mw},
        {"per_target_dbm", r.per_target_dbm},
        {"outer_iterations", r.outer_iterations},
        {"termination_reason", r.termination_reason},
        {"start_objectives_mw", r.start_objectives_mw},
        {"n_rand_samples", r.n_rand_samples},
        {"wall_time_s", r.wall_time_s},
        {"seed", r.seed},
        {"artifact_version", r.artifact_version},
    };
    j["sdp_dual_bound_mw"] = r.sdp_dual_bound_mw ? json(*r.sdp_dual_bound_mw) : json(nullptr);
    return j;
}

ResultRecord record_from_json(const json &j)
{
    ResultRecord r;
    try
    {
        r.config_digest = j.at("config_digest").get<std::string>();
        r.scheme = j.at("scheme").get<std::string>();
        r.objective_mw = j.at("objective_mw").get<double>();
        r.objective_dbm = j.at("objective_dbm").get<double>();
        r.sdr_objective_mw = j.at("sdr_objective_mw").get<double>();
        r.per_target_dbm = j.at("per_target_dbm").get<std::vector<double>>();
        r.outer_iterations = j.at("outer_iterations").get<int>();
        r.termination_reason = j.at("termination_reason").get<std::string>();
        r.start_objectives_mw = j.at("start_objectives_mw").get<std::vector<double>>();
        r.n_rand_samples = j.at("n_rand_samples").get<int>();
        r.wall_time_s = j.at("wall_time_s").get<double>();
        r.seed = j.at("seed").get<std::uint64_t>();
        r.artifact_version = j.at("artifact_version").get<std::string>();
        if (!j.at("sdp_dual_bound_mw").is_null())
            r.sdp_dual_bound_mw = j.at("sdp_dual_bound_mw").get<double>();
    }
    catch (const json::exception &e)
    {
        throw IoError(std::string("malformed result record: ") + e.what());
    }
    return r;
}

std::string record_digest(const ResultRecord &r)
{
    json j = to_json(r);
    j.erase("wall_time_s");
    return digest(j);
}

ResultRecord make_record(const ExperimentConfig &cfg, const BenchmarkResult &result, double wall_time_s)
{
    ResultRecord r;
    // Where the results go is not part of the experiment's identity.
    json identity = to_json(cfg);
    identity["output"].erase("dir");
    r.config_digest = digest(identity);
    r.scheme = std::string(to_string(result.scheme));
    r.objective_mw = result.objective_mw;
    r.objective_dbm = mw_to_dbm(result.objective_mw);
    r.sdr_objective_mw = result.sdr_objective_mw;
    const TargetPowers tp =
        target_powers(result.covariance.r, cfg.array_geometry(), cfg.target_set(), result.shape);
    r.per_target_dbm.assign(tp.per_target_dbm.data(), tp.per_target_dbm.data() + tp.per_target_dbm.size());
    r.outer_iterations = result.trace.outer_iterations();
    r.termination_reason = std::string(to_string(result.trace.termination_reason));
    r.start_objectives_mw = result.trace.start_objectives;
    if (result.sdp_report)
        r.sdp_dual_bound_mw = result.sdp_report->dual_bound;
    r.n_rand_samples = (result.scheme == Scheme::RaaPa || result.scheme == Scheme::FimPa)
                           ? cfg.algorithm.n_rand_samples
                           : 0;
    r.wall_time_s = wall_time_s;
    r.seed = cfg.seed;
    return r;
}

// ---------------------------------------------------------------- runners

OptimizeOutcome run_scheme(const ExperimentConfig &cfg, Scheme scheme, int threads)
{
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    BenchmarkResult result;
    try
    {
        result = solve_benchmark(scheme, cfg.array_geometry(), cfg.target_set(), cfg.p_t_mw(),
                                 cfg.bcd_config(threads));
    }
    catch (const std::exception &e)
    {
        throw SolverError(std::string(to_string(scheme)) + ": " + e.what());
    }
    if (!std::isfinite(result.objective_mw))
        throw SolverError(std::string(to_string(scheme)) + ": non-finite objective");
    if (result.sdp_report && result.sdp_report->status == SolveStatus::NumericalFailure)
        throw SolverError(std::string(to_string(scheme)) + ": covariance solver broke down");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ResultRecord record = make_record(cfg, result, wall);
    return {std::move(result), std::move(record)};
}

void write_optimize_outputs(const std::filesystem::path &dir, const ExperimentConfig &cfg,
                            const OptimizeOutcome &outcome)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    write_json(dir / "result.json", to_json(outcome.record));
    write_covariance_csv(dir / "covariance.csv", outcome.result.covariance.r);
    write_shape_csv(dir / "shape.csv", cfg.array_geometry(), outcome.result.shape);
}

std::vector<SweepPowerRow> sweep_power(const ExperimentConfig &cfg, const std::vector<double> &p_t_dbm, int threads)
{
    std::vector<SweepPowerRow> rows;
    for (double p : p_t_dbm)
        for (Scheme s : all_schemes)
            rows.push_back({p, s, 0.0});

    parallel_for(rows.size(), threads, [&](std::size_t i) {
        ExperimentConfig point = cfg;
        point.p_t_dbm = rows[i].p_t_dbm;
        rows[i].cumulated_mw = run_scheme(point, rows[i].scheme, 1).result.objective_mw;
    });
    return rows;
}

std::vector<SweepRangeRow> sweep_range(const ExperimentConfig &cfg, std::vector<double> d_max_wavelengths,
                                       const std::vector<std::pair<int, int>> &array_sizes, int threads)
{
    std::sort(d_max_wavelengths.begin(), d_max_wavelengths.end());
    std::vector<std::vector<SweepRangeRow>> per_size(array_sizes.size());

    parallel_for(array_sizes.size(), threads, [&](std::size_t i) {
        ExperimentConfig point = cfg;
        point.geometry.n_x = array_sizes[i].first;
        point.geometry.n_z = array_sizes[i].second;
        point.algorithm.initial_shape_m.reset();
        point.algorithm.initial_shape_wavelengths.reset();
        if (point.algorithm.init_scheme == InitScheme::Provided)
            point.algorithm.init_scheme = InitScheme::UniformBox;

        std::optional<BenchmarkResult> previous;
        for (double d_max : d_max_wavelengths)
        {
            point.geometry.d_max_wavelengths = d_max;
            point.validate();
            BcdConfig bcd = point.bcd_config(1);
            if (previous)
            {
                bcd.init_scheme = InitScheme::Provided;
                bcd.initial_shape = previous->shape;
                bcd.initial_covariance = previous->covariance;
                bcd.n_starts = std::max(bcd.n_starts, 2);
            }
            BenchmarkResult r = solve_benchmark(Scheme::FimMimo, point.array_geometry(), point.target_set(),
                                                point.p_t_mw(), bcd);
            per_size[i].push_back({d_max, point.geometry.n_x, point.geometry.n_z, r.objective_mw});
            previous = std::move(r);
        }
    });

    std::vector<SweepRangeRow> rows;
    for (auto &v : per_size)
        rows.insert(rows.end(), v.begin(), v.end());
    return rows;
}

// ---------------------------------------------------------------- files

namespace
{

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::filesystem::path &path)
{
    if (path.has_parent_path())
    {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out)
        throw IoError("cannot write " + path.string());
    return out;
}

void close_out(std::ofstream &out, const std::filesystem::path &path)
{
    out.close();
    if (!out)
        throw IoError("failed writing " + path.string());
}

double to_double(const std::string &s, const std::filesystem::path &path)
{
    try
    {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size())
            throw std::invalid_argument(s);
        return v;
    }
    catch (const std::exception &)
    {
        throw IoError("bad number '" + s + "' in " + path.string());
    }
}

void expect_header(const CsvTable &t, const std::vector<std::string> &header, const std::filesystem::path &path)
{
    if (t.header != header)
        throw IoError("unexpected CSV header in " + path.string());
}

} // namespace

CsvTable read_csv(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    auto split = [](const std::string &line) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ','))
            fields.push_back(f);
        return fields;
    };
    CsvTable t;
    std::string line;
    if (!std::getline(in, line))
        throw IoError("empty CSV " + path.string());
    t.header = split(line);
    while (std::getline(in, line))
    {
        if (line.empty())
            continue;
        auto fields = split(line);
        if (fields.size() != t.header.size())
            throw IoError("ragged CSV row in " + path.string());
        t.rows.push_back(std::move(fields));
    }
    return t;
}

void write_covariance_csv(const std::filesystem::path &path, const CMatrixXd &r)
{
    auto out = open_out(path);
    out << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < r.rows(); ++i)
        for (Eigen::Index j = 0; j < r.cols(); ++j)
            out << i << ',' << j << ',' << num(r(i, j).real()) << ',' << num(r(i, j).imag()) << '\n';
    close_out(out, path);
}

CMatrixXd read_covariance_csv(const std::filesystem::path &path)
{
    const CsvTable t = read_csv(path);
    expect_header(t, {"row", "col", "re", "im"}, path);
    const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(t.rows.size()))));
    if (n * n != static_cast<Eigen::Index>(t.rows.size()) || n == 0)
        throw IoError("covariance CSV is not square: " + path.string());
    CMatrixXd r(n, n);
    for (const auto &row : t.rows)
    {
        const auto i = static_cast<Eigen::Index>(to_double(row[0], path));
        const auto j = static_cast<Eigen::Index>(to_double(row[1], path));
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw IoError("covariance index out of range in " + path.string());
        r(i, j) = {to_double(row[2], path), to_double(row[3], path)};
    }
    return r;
}

void write_shape_csv(const std::filesystem::path &path, const ArrayGeometry &geom, const SurfaceShape &shape)
{
    auto out = open_out(path);
    out << "index,i_x,i_z,displacement_wavelengths\n";
    for (Eigen::Index n = 0; n < shape.size(); ++n)
        out << n << ',' << n % geom.n_x << ',' << n / geom.n_x << ',' << num(shape.displacements(n)) << '\n';
    close_out(out, path);
}

SurfaceShape read_shape_csv(const std::filesystem::path &path)
{
    const CsvTable t = read_csv(path);
    expect_header(t, {"index", "i_x", "i_z", "displacement_wavelengths"}, path);
    SurfaceShape s = SurfaceShape::zero(static_cast<Eigen::Index>(t.rows.size()));
    for (const auto &row : t.rows)
    {
        const auto n = static_cast<Eigen::Index>(to_double(row[0], path));
        if (n < 0 || n >= s.size())
            throw IoError("shape index out of range in " + path.string());
        s.displacements(n) = to_double(row[3], path);
    }
    return s;
}

void write_beampattern_csv(const std::filesystem::path &path, const BeampatternGrid &grid)
{
    auto out = open_out(path);
    out << "theta_deg,phi_deg,power_dbm\n";
    for (Eigen::Index i = 0; i < grid.theta_axis.size(); ++i)
        for (Eigen::Index j = 0; j < grid.phi_axis.size(); ++j)
            out << num(rad_to_deg(grid.theta_axis(i))) << ',' << num(rad_to_deg(grid.phi_axis(j))) << ','
                << num(grid.power_dbm(i, j)) << '\n';
    close_out(out, path);
}

BeampatternGrid read_beampattern_csv(const std::filesystem::path &path)
{
    const CsvTable t = read_csv(path);
    expect_header(t, {"theta_deg", "phi_deg", "power_dbm"}, path);
    std::vector<double> thetas, phis;
    for (const auto &row : t.rows)
    {
        const double th = to_double(row[0], path);
        const double ph = to_double(row[1], path);
        if (thetas.empty() || thetas.back() != th)
            thetas.push_back(th);
        if (thetas.size() == 1)
            phis.push_back(ph);
    }
    if (thetas.size() * phis.size() != t.rows.size())
        throw IoError("beampattern CSV is not a full row-major grid: " + path.string());

    BeampatternGrid g;
    g.theta_axis.resize(static_cast<Eigen::Index>(thetas.size()));
    g.phi_axis.resize(static_cast<Eigen::Index>(phis.size()));
    for (std::size_t i = 0; i < thetas.size(); ++i)
        g.theta_axis(static_cast<Eigen::Index>(i)) = deg_to_rad(thetas[i]);
    for (std::size_t j = 0; j < phis.size(); ++j)
        g.phi_axis(static_cast<Eigen::Index>(j)) = deg_to_rad(phis[j]);
    g.power_dbm.resize(g.theta_axis.size(), g.phi_axis.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        g.power_dbm(static_cast<Eigen::Index>(r / phis.size()), static_cast<Eigen::Index>(r % phis.size())) =
            to_double(t.rows[r][2], path);
    return g;
}

void write_sweep_power_csv(const std::filesystem::path &path, const std::vector<SweepPowerRow> &rows)
{
    auto out = open_out(path);
    out << "p_t_dbm,scheme,cumulated_mw,cumulated_dbm\n";
    for (const auto &r : rows)
        out << num(r.p_t_dbm) << ',' << to_string(r.scheme) << ',' << num(r.cumulated_mw) << ','
            << num(mw_to_dbm(r.cumulated_mw)) << '\n';
    close_out(out, path);
}

void write_sweep_range_csv(const std::filesystem::path &path, const std::vector<SweepRangeRow> &rows)
{
    auto out = open_out(path);
    out << "d_max_wavelengths,n_x,n_z,cumulated_mw\n";
    for (const auto &r : rows)
        out << num(r.d_max_wavelengths) << ',' << r.n_x << ',' << r.n_z << ',' << num(r.cumulated_mw) << '\n';
    close_out(out, path);
}

void write_json(const std::filesystem::path &path, const json &j)
{
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    close_out(out, path);
}

json read_json(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot open " + path.string());
    try
    {
        json j;
        in >> j;
        return j;
    }
    catch (const json::parse_error &e)
    {
        throw IoError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

} // namespace fimsense
