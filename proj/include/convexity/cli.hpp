// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "convexity/builtins.hpp"
#include "convexity/errors.hpp"
#include "convexity/io.hpp"
#include "convexity/quadrature.hpp"
#include "convexity/verify.hpp"

namespace convexity::cli {

namespace detail {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::vector<double> parse_double_list(const std::string& text, const char* flag) {
    std::vector<double> values;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        try {
            std::size_t used = 0;
            const std::string cell = text.substr(pos, comma - pos);
            values.push_back(std::stod(cell, &used));
            if (used != cell.size()) throw std::invalid_argument(cell);
        } catch (const std::exception&) {
            throw UsageError(std::string(flag) + ": malformed number in '" + text + "'");
        }
        pos = comma + 1;
        if (comma == text.size()) break;
    }
    if (values.empty()) throw UsageError(std::string(flag) + ": empty list");
    return values;
}

/// Field source flags shared by every field-driven subcommand.
struct FieldOpts {
    std::string fn;
    std::string builtin_name;
    double beta = 0.0;
    bool has_beta = false;
    double p = 0.99;
    double alpha = 0.25;
    std::string weights = "0.5,0.5";
    double delta = 1e-4;
};

inline void add_field_options(CLI::App* sub, FieldOpts& o) {
    sub->add_option("--fn", o.fn, "expression, e.g. \"-cos(x)-cos(y)\"");
    sub->add_option("--builtin", o.builtin_name,
                    "built-in field: h_cos, g_risk, h_beta, cubic_1d, neg_cos_1d");
    sub->add_option("--beta", o.beta, "h_beta exponent");
    sub->add_option("--p", o.p, "line quantile level")->capture_default_str();
    sub->add_option("--alpha", o.alpha, "power-penalty exponent")->capture_default_str();
    sub->add_option("--weights", o.weights, "line weights, comma-separated")->capture_default_str();
    sub->add_option("--delta", o.delta, "domain floor for h_beta / g_risk")->capture_default_str();
}

inline ScalarField make_field(const FieldOpts& o, std::size_t dimension) {
    const bool has_fn = !o.fn.empty();
    const bool has_builtin = !o.builtin_name.empty();
    if (has_fn == has_builtin)
        throw UsageError("exactly one of --fn and --builtin is required");
    if (has_fn) return from_expression(o.fn, dimension);
    BuiltinParams params;
    if (o.has_beta) params.beta = o.beta;
    params.p = o.p;
    params.alpha = o.alpha;
    params.weights = parse_double_list(o.weights, "--weights");
    params.domain_floor = o.delta;
    ScalarField f = builtin(o.builtin_name, params);
    if (f.dimension() != dimension)
        throw UsageError("--builtin " + o.builtin_name + " is " +
                         std::to_string(f.dimension()) + "-dimensional, but the command needs " +
                         std::to_string(dimension) + " dimensions");
    return f;
}

inline void describe_field(const FieldOpts& o, ConfigEcho& echo) {
    if (!o.fn.empty()) {
        echo.emplace_back("fn", o.fn);
        return;
    }
    echo.emplace_back("builtin", o.builtin_name);
    if (o.has_beta) echo.emplace_back("beta", format_double(o.beta));
    if (o.builtin_name == "h_beta" || o.builtin_name == "g_risk") {
        echo.emplace_back("p", format_double(o.p));
        echo.emplace_back("alpha", format_double(o.alpha));
        if (o.builtin_name == "h_beta") echo.emplace_back("weights", o.weights);
        echo.emplace_back("delta", format_double(o.delta));
    }
}

struct NumericsOpts {
    int grid = 201;
    double fd_step = 1e-4;
    bool fd_absolute = false;
    unsigned threads = 0;
    std::uint64_t seed = 42;
    std::string out_path;
    std::string format;  // per-command default
};

inline void add_numerics_options(CLI::App* sub, NumericsOpts& o, int default_grid,
                                 const std::string& default_format) {
    o.grid = default_grid;
    o.format = default_format;
    sub->add_option("--grid", o.grid, "lattice nodes per axis")->capture_default_str();
    sub->add_option("--fd-step", o.fd_step, "finite-difference base step")->capture_default_str();
    sub->add_flag("--fd-absolute", o.fd_absolute, "disable relative step scaling");
    sub->add_option("--threads", o.threads, "worker threads (0 = auto)")->capture_default_str();
    sub->add_option("--seed", o.seed, "seed for randomized commands")->capture_default_str();
    sub->add_option("--out", o.out_path, "output path (default: stdout)");
    sub->add_option("--format", o.format, "output format: csv or json")
        ->capture_default_str()
        ->check(CLI::IsMember({"csv", "json"}));
}

inline FdConfig fd_config(const NumericsOpts& o) {
    FdConfig cfg;
    cfg.base_step = o.fd_step;
    cfg.relative_scaling = !o.fd_absolute;
    return cfg;
}

inline void base_echo(const NumericsOpts& o, ConfigEcho& echo) {
    echo.emplace_back("grid", std::to_string(o.grid));
    echo.emplace_back("fd-step", format_double(o.fd_step));
    echo.emplace_back("fd-scaling", o.fd_absolute ? "absolute" : "relative");
    echo.emplace_back("seed", std::to_string(o.seed));
}

inline void emit(const NumericsOpts& o, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& writer) {
    if (o.out_path.empty()) {
        writer(fallback);
        return;
    }
    std::ofstream file(o.out_path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open output file '" + o.out_path + "'");
    writer(file);
}

} // namespace detail

/// Parses argv (without the program name) and runs one subcommand.
/// Exit codes: 0 success, 1 usage error, 2 domain or numeric error.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    using namespace detail;

    CLI::App app{"Convexity indices of scalar fields via the canonical Hessian decomposition"};
    app.require_subcommand(1);

    // --- pointwise ---------------------------------------------------------
    auto* pointwise = app.add_subcommand("pointwise", "pointwise indices at one point");
    FieldOpts pw_field;
    NumericsOpts pw_num;
    std::string pw_at;
    add_field_options(pointwise, pw_field);
    add_numerics_options(pointwise, pw_num, 201, "json");
    pointwise->add_option("--at", pw_at, "evaluation point, comma-separated")->required();

    // --- increase ----------------------------------------------------------
    auto* increase = app.add_subcommand("increase", "1-D index of increase of h'");
    FieldOpts inc_field;
    NumericsOpts inc_num;
    std::string inc_interval;
    add_field_options(increase, inc_field);
    add_numerics_options(increase, inc_num, 1001, "csv");
    increase->add_option("--interval", inc_interval, "integration interval a,b")->required();

    // --- global ------------------------------------------------------------
    auto* global = app.add_subcommand("global", "global convexity index over a box");
    FieldOpts gl_field;
    NumericsOpts gl_num;
    std::string gl_lo, gl_hi, gl_center;
    double gl_a = 0.0;
    add_field_options(global, gl_field);
    add_numerics_options(global, gl_num, 201, "csv");
    global->add_option("--lo", gl_lo, "lower bounds, comma-separated");
    global->add_option("--hi", gl_hi, "upper bounds, comma-separated");
    global->add_option("--center", gl_center, "square center x0,y0");
    global->add_option("--a", gl_a, "square half-width");

    // --- sweep -------------------------------------------------------------
    auto* sweep = app.add_subcommand("sweep", "CONV(a) over expanding squares");
    FieldOpts sw_field;
    NumericsOpts sw_num;
    std::string sw_center;
    double sw_amax = 0.0;
    int sw_steps = 20;
    add_field_options(sweep, sw_field);
    add_numerics_options(sweep, sw_num, 201, "csv");
    sweep->add_option("--center", sw_center, "square center x0,y0")->required();
    sweep->add_option("--amax", sw_amax, "largest half-width")->required();
    sweep->add_option("--steps", sw_steps, "number of half-width steps")->capture_default_str();

    // --- map ---------------------------------------------------------------
    auto* map_cmd = app.add_subcommand("map", "pointwise indices over a lattice");
    FieldOpts mp_field;
    NumericsOpts mp_num;
    std::string mp_lo, mp_hi;
    add_field_options(map_cmd, mp_field);
    add_numerics_options(map_cmd, mp_num, 201, "csv");
    map_cmd->add_option("--lo", mp_lo, "lower bounds, comma-separated")->required();
    map_cmd->add_option("--hi", mp_hi, "upper bounds, comma-separated")->required();

    // --- psd ---------------------------------------------------------------
    auto* psd = app.add_subcommand("psd", "positive-semidefiniteness indices of a matrix");
    NumericsOpts psd_num;
    std::string psd_matrix;
    double psd_zero_tol = 0.0;
    add_numerics_options(psd, psd_num, 201, "json");
    psd->add_option("--matrix", psd_matrix, "CSV matrix file")
        ->required()
        ->check(CLI::ExistingFile);
    psd->add_option("--zero-tol", psd_zero_tol, "eigenvalues with |l| <= tol count as zero")->capture_default_str();

    // --- verify ------------------------------------------------------------
    auto* verify = app.add_subcommand("verify", "randomized distance-oracle and trace-bound checks");
    NumericsOpts vf_num;
    int vf_trials = 100;
    std::size_t vf_dim = 2;
    add_numerics_options(verify, vf_num, 201, "csv");
    verify->add_option("--trials", vf_trials, "trials per suite")->capture_default_str();
    verify->add_option("--dim", vf_dim, "matrix dimension (2 or 3)")->capture_default_str();

    // --- risk-demo ---------------------------------------------------------
    auto* risk_demo = app.add_subcommand("risk-demo", "sweep CONV(a) on the aggregate loss surface");
    NumericsOpts rd_num;
    double rd_beta = 0.0;
    double rd_p = 0.99, rd_alpha = 0.25, rd_delta = 1e-4;
    std::string rd_weights = "0.5,0.5";
    std::string rd_center;
    double rd_amax = 0.0;
    int rd_steps = 20;
    add_numerics_options(risk_demo, rd_num, 201, "csv");
    risk_demo->add_option("--beta", rd_beta, "generalized-mean exponent")->required();
    risk_demo->add_option("--p", rd_p, "line quantile level")->capture_default_str();
    risk_demo->add_option("--alpha", rd_alpha, "power-penalty exponent")->capture_default_str();
    risk_demo->add_option("--weights", rd_weights, "line weights, comma-separated")->capture_default_str();
    risk_demo->add_option("--delta", rd_delta, "domain floor")->capture_default_str();
    risk_demo->add_option("--center", rd_center, "square center x0,y0")->required();
    risk_demo->add_option("--amax", rd_amax, "largest half-width")->required();
    risk_demo->add_option("--steps", rd_steps, "number of half-width steps")->capture_default_str();

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("convexity");
    for (std::string& a : args) argv_storage.push_back(std::move(a));
    std::vector<const char*> argv;
    argv.reserve(argv_storage.size());
    for (const std::string& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    }

    pw_field.has_beta = pointwise->count("--beta") > 0;
    inc_field.has_beta = increase->count("--beta") > 0;
    gl_field.has_beta = global->count("--beta") > 0;
    sw_field.has_beta = sweep->count("--beta") > 0;
    mp_field.has_beta = map_cmd->count("--beta") > 0;

    try {
        if (app.got_subcommand(pointwise)) {
            const std::vector<double> at = parse_double_list(pw_at, "--at");
            const ScalarField f = make_field(pw_field, at.size());
            const ConvexityReport report = pointwise_indices(f, at, fd_config(pw_num));
            ConfigEcho echo;
            echo.emplace_back("command", "pointwise");
            describe_field(pw_field, echo);
            echo.emplace_back("at", pw_at);
            base_echo(pw_num, echo);
            emit(pw_num, out, [&](std::ostream& os) {
                if (pw_num.format == "json")
                    write_pointwise_json(os, report);
                else
                    write_pointwise_csv(os, report, echo);
            });
        } else if (app.got_subcommand(increase)) {
            const std::vector<double> iv = parse_double_list(inc_interval, "--interval");
            if (iv.size() != 2) throw UsageError("--interval needs exactly two numbers a,b");
            if (inc_num.grid < 3 || inc_num.grid % 2 == 0)
                throw UsageError("--grid must be odd and >= 3");
            const ScalarField f = make_field(inc_field, 1);
            const IncreaseResult r =
                index_of_increase_1d(f, iv[0], iv[1], inc_num.grid, fd_config(inc_num));
            ConfigEcho echo;
            echo.emplace_back("command", "increase");
            describe_field(inc_field, echo);
            echo.emplace_back("interval", inc_interval);
            base_echo(inc_num, echo);
            emit(inc_num, out, [&](std::ostream& os) {
                if (inc_num.format == "json")
                    write_increase_json(os, r, echo);
                else
                    write_increase_csv(os, r, echo);
            });
        } else if (app.got_subcommand(global)) {
            const bool box = !gl_lo.empty() || !gl_hi.empty();
            const bool square = !gl_center.empty() || global->count("--a") > 0;
            if (box == square)
                throw UsageError("give either --lo/--hi or --center/--a, not both");
            std::optional<HyperRect> region;
            if (box) {
                if (gl_lo.empty() || gl_hi.empty())
                    throw UsageError("--lo and --hi must be given together");
                region.emplace(parse_double_list(gl_lo, "--lo"), parse_double_list(gl_hi, "--hi"));
            } else {
                const std::vector<double> c = parse_double_list(gl_center, "--center");
                if (c.size() != 2) throw UsageError("--center needs exactly two numbers x0,y0");
                if (!(gl_a > 0.0)) throw UsageError("--a must be positive");
                region.emplace(Square{c[0], c[1], gl_a}.rect());
            }
            if (gl_num.grid < 3 || gl_num.grid % 2 == 0)
                throw UsageError("--grid must be odd and >= 3");
            const ScalarField f = make_field(gl_field, region->dim());
            const GlobalIndex g =
                global_convexity_index(f, *region, gl_num.grid, fd_config(gl_num), gl_num.threads);
            ConfigEcho echo;
            echo.emplace_back("command", "global");
            describe_field(gl_field, echo);
            if (box) {
                echo.emplace_back("lo", gl_lo);
                echo.emplace_back("hi", gl_hi);
            } else {
                echo.emplace_back("center", gl_center);
                echo.emplace_back("a", format_double(gl_a));
            }
            base_echo(gl_num, echo);
            emit(gl_num, out, [&](std::ostream& os) {
                if (gl_num.format == "json")
                    write_global_json(os, g, echo);
                else
                    write_global_csv(os, g, echo);
            });
        } else if (app.got_subcommand(sweep)) {
            const std::vector<double> c = parse_double_list(sw_center, "--center");
            if (c.size() != 2) throw UsageError("--center needs exactly two numbers x0,y0");
            if (sw_num.grid < 3 || sw_num.grid % 2 == 0)
                throw UsageError("--grid must be odd and >= 3");
            if (sw_steps < 1) throw UsageError("--steps must be >= 1");
            const ScalarField f = make_field(sw_field, 2);
            const SweepResult r = sweep_conv_a(f, c[0], c[1], sw_amax, sw_steps, sw_num.grid,
                                               fd_config(sw_num), sw_num.threads);
            ConfigEcho echo;
            echo.emplace_back("command", "sweep");
            describe_field(sw_field, echo);
            echo.emplace_back("center", sw_center);
            echo.emplace_back("amax", format_double(sw_amax));
            echo.emplace_back("steps", std::to_string(sw_steps));
            base_echo(sw_num, echo);
            emit(sw_num, out, [&](std::ostream& os) {
                if (sw_num.format == "json")
                    write_sweep_json(os, r, echo);
                else
                    write_sweep_csv(os, r, echo);
            });
        } else if (app.got_subcommand(map_cmd)) {
            HyperRect region(parse_double_list(mp_lo, "--lo"), parse_double_list(mp_hi, "--hi"));
            if (mp_num.grid < 2) throw UsageError("--grid must be >= 2");
            const ScalarField f = make_field(mp_field, region.dim());
            const RegionMap m =
                region_map(f, region, mp_num.grid, fd_config(mp_num), mp_num.threads);
            ConfigEcho echo;
            echo.emplace_back("command", "map");
            describe_field(mp_field, echo);
            echo.emplace_back("lo", mp_lo);
            echo.emplace_back("hi", mp_hi);
            base_echo(mp_num, echo);
            emit(mp_num, out, [&](std::ostream& os) {
                if (mp_num.format == "json")
                    write_map_json(os, m, echo);
                else
                    write_map_csv(os, m, echo);
            });
        } else if (app.got_subcommand(psd)) {
            const LoadedMatrix loaded = load_symmetric_matrix_csv_file(psd_matrix);
            if (loaded.max_asymmetry > 1e-8)
                err << "warning: matrix asymmetry " << format_double(loaded.max_asymmetry)
                    << " exceeds 1e-8; symmetrized as (A + A^T)/2\n";
            if (psd_zero_tol < 0.0) throw UsageError("--zero-tol must be non-negative");
            const PsdIndexReport report = psd_indices(loaded.matrix, psd_zero_tol);
            ConfigEcho echo;
            echo.emplace_back("command", "psd");
            echo.emplace_back("matrix", psd_matrix);
            echo.emplace_back("zero-tol", format_double(psd_zero_tol));
            echo.emplace_back("seed", std::to_string(psd_num.seed));
            emit(psd_num, out, [&](std::ostream& os) {
                if (psd_num.format == "json")
                    write_psd_json(os, report);
                else
                    write_psd_csv(os, report, echo);
            });
        } else if (app.got_subcommand(verify)) {
            if (vf_dim != 2 && vf_dim != 3) throw UsageError("--dim must be 2 or 3");
            if (vf_trials < 1) throw UsageError("--trials must be >= 1");
            VerifyOptions opt;
            opt.trials = vf_trials;
            opt.seed = vf_num.seed;
            opt.dim = vf_dim;
            const VerifyReport report = run_verification(opt);
            emit(vf_num, out, [&](std::ostream& os) {
                os << "# command=verify trials=" << vf_trials << " seed=" << vf_num.seed
                   << " dim=" << vf_dim << "\n";
                os << "distance_oracle: " << report.oracle_pass << "/" << report.oracle_trials
                   << " pass (worst |oracle - lops| = " << format_double(report.oracle_worst_gap)
                   << ")\n";
                os << "trace_bound: " << report.trace_pass << "/" << report.trace_trials
                   << " pass\n";
            });
            if (!report.all_pass()) return 2;
        } else if (app.got_subcommand(risk_demo)) {
            const std::vector<double> c = parse_double_list(rd_center, "--center");
            if (c.size() != 2) throw UsageError("--center needs exactly two numbers x0,y0");
            if (rd_num.grid < 3 || rd_num.grid % 2 == 0)
                throw UsageError("--grid must be odd and >= 3");
            if (rd_steps < 1) throw UsageError("--steps must be >= 1");
            BuiltinParams params;
            params.beta = rd_beta;
            params.p = rd_p;
            params.alpha = rd_alpha;
            params.weights = parse_double_list(rd_weights, "--weights");
            params.domain_floor = rd_delta;
            const ScalarField f = builtin("h_beta", params);
            if (f.dimension() != 2)
                throw UsageError("risk-demo sweeps need exactly two lines (two weights)");
            const SweepResult r = sweep_conv_a(f, c[0], c[1], rd_amax, rd_steps, rd_num.grid,
                                               fd_config(rd_num), rd_num.threads);
            ConfigEcho echo;
            echo.emplace_back("command", "risk-demo");
            echo.emplace_back("beta", format_double(rd_beta));
            echo.emplace_back("p", format_double(rd_p));
            echo.emplace_back("alpha", format_double(rd_alpha));
            echo.emplace_back("weights", rd_weights);
            echo.emplace_back("delta", format_double(rd_delta));
            echo.emplace_back("center", rd_center);
            echo.emplace_back("amax", format_double(rd_amax));
            echo.emplace_back("steps", std::to_string(rd_steps));
            base_echo(rd_num, echo);
            emit(rd_num, out, [&](std::ostream& os) {
                if (rd_num.format == "json")
                    write_sweep_json(os, r, echo);
                else
                    write_sweep_csv(os, r, echo);
            });
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const parse_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const precondition_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace convexity::cli
