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

// Command-line harness: optimize, beampattern, sweep-power, sweep-range, compare-schemes.
// Log level comes from FIMSENSE_LOG_LEVEL (trace, debug, info, warn, error, off).

#include "fimsense/experiment.hpp"
#include "fimsense/units.hpp"

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>

namespace fs = std::filesystem;
using namespace fimsense;

namespace
{

enum ExitCode
{
    exit_ok = 0,
    exit_config = 2,
    exit_solver = 3,
    exit_io = 4,
};

struct CommonArgs
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    int threads = 1;
};

void add_common(CLI::App *cmd, CommonArgs &args, bool config_required = true)
{
    auto *opt = cmd->add_option("--config", args.config, "experiment config (JSON)");
    if (config_required)
        opt->required();
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--out", args.out, "output directory, overrides output.dir");
    cmd->add_option("--threads", args.threads, "worker threads")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve_config(const CommonArgs &args)
{
    ExperimentConfig cfg = load_config(args.config);
    if (args.seed)
        cfg.seed = *args.seed;
    if (!args.out.empty())
        cfg.output.dir = args.out;
    cfg.validate();
    return cfg;
}

void log_record(const ResultRecord &r)
{
    std::string per_target;
    for (double p : r.per_target_dbm)
        per_target += fmt::format(" {:.2f}", p);
    spdlog::info("{}: {:.4f} mW ({:.2f} dBm), per-target dBm:{}, {} outer iterations ({}), {:.1f} s", r.scheme,
                 r.objective_mw, r.objective_dbm, per_target, r.outer_iterations, r.termination_reason,
                 r.wall_time_s);
}

BeampatternGrid grid_for(const ExperimentConfig &cfg, const CMatrixXd &r, const SurfaceShape &shape, int threads)
{
    return evaluate_beampattern(r, cfg.array_geometry(), shape, angle_axis(cfg.output.grid_theta_points),
                                angle_axis(cfg.output.grid_phi_points), threads);
}

int cmd_optimize(const CommonArgs &args, const std::optional<std::string> &scheme_name)
{
    ExperimentConfig cfg = resolve_config(args);
    if (scheme_name)
    {
        try
        {
            cfg.algorithm.scheme = scheme_from_string(*scheme_name);
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(e.what());
        }
    }
    spdlog::info("optimize {} on {}x{}, d_max {} wavelengths, P_t {} dBm, seed {}", to_string(cfg.algorithm.scheme),
                 cfg.geometry.n_x, cfg.geometry.n_z, cfg.geometry.d_max_wavelengths, cfg.p_t_dbm, cfg.seed);
    const OptimizeOutcome outcome = run_scheme(cfg, cfg.algorithm.scheme, args.threads);
    log_record(outcome.record);
    write_optimize_outputs(cfg.output.dir, cfg, outcome);
    write_json(fs::path(cfg.output.dir) / "config.json", to_json(cfg));
    spdlog::info("wrote {}", cfg.output.dir);
    return exit_ok;
}

int cmd_beampattern(const CommonArgs &args, const std::string &result_dir)
{
    const ExperimentConfig cfg = resolve_config(args);
    const fs::path src = result_dir.empty() ? fs::path(cfg.output.dir) : fs::path(result_dir);
    const fs::path cov_path = src / "covariance.csv";
    const fs::path shape_path = src / "shape.csv";
    if (!fs::exists(cov_path) || !fs::exists(shape_path))
        throw IoError("missing optimize outputs in " + src.string());

    const CMatrixXd r = read_covariance_csv(cov_path);
    const SurfaceShape shape = read_shape_csv(shape_path);
    const ArrayGeometry geom = cfg.array_geometry();
    if (r.rows() != geom.size() || shape.size() != geom.size())
        throw IoError("optimize outputs in " + src.string() + " do not match the configured array");

    const BeampatternGrid grid = grid_for(cfg, r, shape, args.threads);
    const fs::path out = fs::path(args.out.empty() ? src : fs::path(cfg.output.dir)) / "beampattern.csv";
    write_beampattern_csv(out, grid);
    spdlog::info("wrote {}", out.string());
    return exit_ok;
}

int cmd_sweep_power(const CommonArgs &args, const std::vector<double> &p_t_dbm)
{
    const ExperimentConfig cfg = resolve_config(args);
    for (double p : p_t_dbm)
        if (!std::isfinite(p))
            throw ConfigError("--p-t-dbm values must be finite");
    spdlog::info("sweep-power over {} points x 4 schemes, {} threads", p_t_dbm.size(), args.threads);
    const auto rows = sweep_power(cfg, p_t_dbm, args.threads);
    const fs::path out = fs::path(cfg.output.dir) / "sweep_power.csv";
    write_sweep_power_csv(out, rows);
    spdlog::info("wrote {}", out.string());
    return exit_ok;
}

std::pair<int, int> parse_size(const std::string &s)
{
    static const std::regex re(R"((\d+)x(\d+))");
    std::smatch m;
    if (!std::regex_match(s, m, re))
        throw ConfigError("array size '" + s + "' is not of the form NXxNZ");
    return {std::stoi(m[1]), std::stoi(m[2])};
}

int cmd_sweep_range(const CommonArgs &args, const std::vector<double> &d_max,
                    const std::vector<std::string> &sizes)
{
    const ExperimentConfig cfg = resolve_config(args);
    std::vector<std::pair<int, int>> array_sizes;
    for (const auto &s : sizes)
        array_sizes.push_back(parse_size(s));
    for (double d : d_max)
        if (!(d >= 0) || !std::isfinite(d))
            throw ConfigError("--d-max values must be finite and non-negative");
    spdlog::info("sweep-range over {} ranges x {} array sizes", d_max.size(), array_sizes.size());
    const auto rows = sweep_range(cfg, d_max, array_sizes, args.threads);
    const fs::path out = fs::path(cfg.output.dir) / "sweep_range.csv";
    write_sweep_range_csv(out, rows);
    spdlog::info("wrote {}", out.string());
    return exit_ok;
}

int cmd_compare(const CommonArgs &args, bool beampatterns)
{
    const ExperimentConfig cfg = resolve_config(args);
    const fs::path root = cfg.output.dir;
    std::ofstream summary;
    std::vector<OptimizeOutcome> outcomes;
    for (Scheme s : all_schemes)
    {
        spdlog::info("compare-schemes: {}", to_string(s));
        OptimizeOutcome o = run_scheme(cfg, s, args.threads);
        log_record(o.record);
        const fs::path dir = root / std::string(to_string(s));
        write_optimize_outputs(dir, cfg, o);
        if (beampatterns)
            write_beampattern_csv(dir / "beampattern.csv", grid_for(cfg, o.result.covariance.r, o.result.shape,
                                                                    args.threads));
        outcomes.push_back(std::move(o));
    }

    const fs::path path = root / "compare_schemes.csv";
    summary.open(path);
    if (!summary)
        throw IoError("cannot write " + path.string());
    summary << "scheme,cumulated_mw,cumulated_dbm,min_target_dbm\n";
    for (const auto &o : outcomes)
    {
        const auto &pt = o.record.per_target_dbm;
        summary << o.record.scheme << ',' << fmt::format("{:.17g}", o.record.objective_mw) << ','
                << fmt::format("{:.17g}", o.record.objective_dbm) << ','
                << fmt::format("{:.17g}", *std::min_element(pt.begin(), pt.end())) << '\n';
    }
    summary.close();
    if (!summary)
        throw IoError("failed writing " + path.string());
    write_json(root / "config.json", to_json(cfg));
    spdlog::info("wrote {}", root.string());
    return exit_ok;
}

void setup_logging()
{
    auto logger = spdlog::stderr_color_mt("fimsense");
    logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::info);
    if (const char *lvl = std::getenv("FIMSENSE_LOG_LEVEL"))
        spdlog::cfg::helpers::load_levels(lvl);
}

} // namespace

int main(int argc, char **argv)
{
    setup_logging();

    CLI::App app{"Covariance and surface-shape design for flexible-metasurface MIMO sensing"};
    app.require_subcommand(1);

    CommonArgs args;

    auto *optimize = app.add_subcommand("optimize", "run one scheme and save record, covariance and shape");
    add_common(optimize, args);
    std::optional<std::string> scheme;
    optimize->add_option("--scheme", scheme, "RaaPa, FimPa, RaaMimo or FimMimo; overrides the config");

    auto *beampattern = app.add_subcommand("beampattern", "evaluate the beampattern of saved optimize outputs");
    add_common(beampattern, args);
    std::string result_dir;
    beampattern->add_option("--result", result_dir, "directory holding covariance.csv and shape.csv");

    auto *sweep_pow = app.add_subcommand("sweep-power", "all four schemes over a transmit-power list");
    add_common(sweep_pow, args);
    std::vector<double> p_t_list{0, 5, 10, 15, 20};
    sweep_pow->add_option("--p-t-dbm", p_t_list, "transmit powers in dBm")->delimiter(',');

    auto *sweep_rng = app.add_subcommand("sweep-range", "flexible MIMO over morphing ranges and array sizes");
    add_common(sweep_rng, args);
    std::vector<double> d_max_list{0, 0.25, 0.5, 0.75, 1.0};
    std::vector<std::string> size_list{"10x10"};
    sweep_rng->add_option("--d-max", d_max_list, "morphing ranges in wavelengths")->delimiter(',');
    sweep_rng->add_option("--array-sizes", size_list, "array sizes as NXxNZ")->delimiter(',');

    auto *compare = app.add_subcommand("compare-schemes", "run all four schemes on one config");
    add_common(compare, args);
    bool with_beampatterns = false;
    compare->add_flag("--beampatterns", with_beampatterns, "also write a beampattern per scheme");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return exit_config;
    }

    try
    {
        if (optimize->parsed())
            return cmd_optimize(args, scheme);
        if (beampattern->parsed())
            return cmd_beampattern(args, result_dir);
        if (sweep_pow->parsed())
            return cmd_sweep_power(args, p_t_list);
        if (sweep_rng->parsed())
            return cmd_sweep_range(args, d_max_list, size_list);
        if (compare->parsed())
            return cmd_compare(args, with_beampatterns);
    }
    catch (const ConfigError &e)
    {
        spdlog::error("invalid config: {}", e.what());
        return exit_config;
    }
    catch (const IoError &e)
    {
        spdlog::error("i/o failure: {}", e.what());
        return exit_io;
    }
    catch (const SolverError &e)
    {
        spdlog::error("solver failure: {}", e.what());
        return exit_solver;
    }
    catch (const std::exception &e)
    {
        spdlog::error("solver failure: {}", e.what());
        return exit_solver;
    }
    return exit_config;
}
