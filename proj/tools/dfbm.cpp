// Command-line front end: simulate, estimate, study, diagnose, landscape.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dfbm/aam.hpp"
#include "dfbm/errors.hpp"
#include "dfbm/io.hpp"
#include "dfbm/likelihood.hpp"
#include "dfbm/process.hpp"
#include "dfbm/rng.hpp"
#include "dfbm/study.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumeric = 3;

/// Input problems detected by the tool itself (files, flag combinations).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string out;
    std::string format = "csv";

    dfbm::OutputFormat output_format() const {
        return format == "json" ? dfbm::OutputFormat::json : dfbm::OutputFormat::csv;
    }
    std::string extension() const { return format == "json" ? ".jsonl" : ".csv"; }
};

struct AamFlags {
    double rho = 0.2;
    std::size_t n_scales = 15;
    std::string kernel = "epanechnikov";
    std::optional<double> bandwidth;
    std::optional<double> step;

    dfbm::AamConfig config() const {
        dfbm::AamConfig c;
        c.rho = rho;
        c.n_scales = n_scales;
        static const std::map<std::string, dfbm::KernelFamily> families{
            {"epanechnikov", dfbm::KernelFamily::epanechnikov},
            {"gaussian", dfbm::KernelFamily::truncated_gaussian},
            {"box", dfbm::KernelFamily::box}};
        c.kernel.family = families.at(kernel);
        c.kernel.bandwidth = bandwidth;
        c.step = step;
        return c;
    }
};

struct SimplexFlags {
    std::string constraints = "transform";
    bool multi_start = false;

    dfbm::SimplexOptions options() const {
        dfbm::SimplexOptions o;
        o.constraints = constraints == "box" ? dfbm::ConstraintMode::box : dfbm::ConstraintMode::transform;
        o.multi_start = multi_start;
        return o;
    }
};

void add_common(CLI::App* cmd, Common& c, const char* out_help) {
    cmd->add_option("--out", c.out, out_help);
    cmd->add_option("--format", c.format, "csv or json (JSON lines)")
        ->check(CLI::IsMember({"csv", "json"}));
}

void add_aam(CLI::App* cmd, AamFlags& a) {
    cmd->add_option("--rho", a.rho, "largest scale as a fraction of the sample")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--n-scales", a.n_scales, "number of moment scales")->check(CLI::PositiveNumber);
    cmd->add_option("--kernel", a.kernel, "epanechnikov, gaussian or box")
        ->check(CLI::IsMember({"epanechnikov", "gaussian", "box"}));
    cmd->add_option("--bandwidth", a.bandwidth, "fixed kernel bandwidth (default: per-scale automatic)");
}

void add_simplex(CLI::App* cmd, SimplexFlags& s) {
    cmd->add_option("--constraints", s.constraints, "transform or box")->check(CLI::IsMember({"transform", "box"}));
    cmd->add_flag("--multi-start", s.multi_start, "restart the simplex from low and high corners");
}

std::string read_file(const std::string& path) {
    if (path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin), {});
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot open '" + path + "'");
    }
    return std::string(std::istreambuf_iterator<char>(in), {});
}

dfbm::TimeSeries parse_series(const std::string& bytes, const std::string& path) {
    std::istringstream in(bytes);
    try {
        return dfbm::read_series_csv(in);
    } catch (const dfbm::ParseError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

void write_to(const std::string& path, const dfbm::Table& table, dfbm::OutputFormat format) {
    if (path.empty() || path == "-") {
        dfbm::write_table(std::cout, table, format);
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw UsageError("cannot write '" + path + "'");
    }
    dfbm::write_table(out, table, format);
    if (!out) {
        throw UsageError("write failed for '" + path + "'");
    }
}

/// "a:b:step" or a comma-separated list.
std::vector<double> parse_grid(const std::string& text, const char* name) {
    std::vector<double> v;
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) {
            throw UsageError(std::string("bad ") + name + " grid '" + text + "'");
        }
        return x;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ':');) {
            parts.push_back(p);
        }
        if (parts.size() != 3) {
            throw UsageError(std::string("bad ") + name + " grid '" + text + "', expected start:stop:step");
        }
        const double a = number(parts[0]);
        const double b = number(parts[1]);
        const double h = number(parts[2]);
        if (!(h > 0.0) || b < a) {
            throw UsageError(std::string("bad ") + name + " grid '" + text + "'");
        }
        const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
        for (long i = 0; i < count; ++i) {
            v.push_back(a + static_cast<double>(i) * h);
        }
    } else {
        std::stringstream ss(text);
        for (std::string p; std::getline(ss, p, ',');) {
            v.push_back(number(p));
        }
    }
    if (v.empty()) {
        throw UsageError(std::string("empty ") + name + " grid");
    }
    return v;
}

std::vector<dfbm::Method> parse_methods(const std::string& m) {
    if (m == "ml") {
        return {dfbm::Method::ml};
    }
    if (m == "aam") {
        return {dfbm::Method::aam};
    }
    return {dfbm::Method::ml, dfbm::Method::aam};
}

std::string numbered(const std::string& out, std::size_t r) {
    const std::filesystem::path p(out);
    char suffix[32];
    std::snprintf(suffix, sizeof suffix, "_%04zu", r);
    return (p.parent_path() / (p.stem().string() + suffix + p.extension().string())).string();
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    Common common;
    dfbm::ModelParams params{0.65, 30.0, 1.0, 0.0};
    std::size_t n_obs = 200;
    double step = 0.001;
    double noise_sd = 0.0;
    std::uint64_t seed = 1;
    std::size_t replications = 1;
    std::string model = "delampertized";
};

void run_simulate(const SimulateArgs& a) {
    a.params.validate();
    if (a.n_obs < 1) {
        throw UsageError("--n-obs must be at least 1");
    }
    if (a.replications > 1 && (a.common.out.empty() || a.common.out == "-")) {
        throw UsageError("--replications > 1 needs --out");
    }
    const dfbm::TimeGrid grid = dfbm::TimeGrid::equispaced(a.n_obs, a.step, a.step);
    const dfbm::PathSampler sampler(grid, a.params,
                                    a.model == "fbm" ? dfbm::Model::fbm : dfbm::Model::delampertized);
    for (std::size_t r = 0; r < a.replications; ++r) {
        const std::uint64_t seed = dfbm::stream_seed(a.seed, r);
        dfbm::TimeSeries path = sampler.sample(seed);
        path = dfbm::add_white_noise(path, a.noise_sd, dfbm::stream_seed(seed, 1));
        const std::string out = a.replications > 1 ? numbered(a.common.out, r) : a.common.out;
        write_to(out, dfbm::series_table(path), a.common.output_format());
    }
}

struct EstimateArgs {
    Common common;
    AamFlags aam;
    SimplexFlags simplex;
    std::string input;
    std::string method = "both";
};

dfbm::Cell opt(const std::optional<double>& v) {
    return v ? dfbm::Cell{*v} : dfbm::Cell{};
}

void run_estimate(const EstimateArgs& a) {
    const std::string bytes = read_file(a.input);
    const dfbm::TimeSeries series = parse_series(bytes, a.input);
    const std::string hash = dfbm::fnv1a_hex(bytes);
    const dfbm::AamConfig cfg = a.aam.config();
    const dfbm::SimplexOptions opts = a.simplex.options();
    dfbm::Table t{{"input_hash", "method", "H_hat", "theta_hat", "objective", "h_slope", "alpha", "iterations",
                   "evaluations", "converged", "wall_seconds"},
                  {}};
    for (dfbm::Method m : parse_methods(a.method)) {
        const dfbm::EstimationResult r =
            m == dfbm::Method::ml ? dfbm::fit_ml(series, opts) : dfbm::fit_aam(series, cfg, opts);
        t.add_row({hash, std::string(dfbm::method_name(m)), r.hurst, r.theta, r.objective, opt(r.h_slope),
                   opt(r.alpha), static_cast<std::uint64_t>(r.iterations),
                   static_cast<std::uint64_t>(r.evaluations), r.converged, r.wall_seconds});
    }
    write_to(a.common.out, t, a.common.output_format());
}

struct StudyArgs {
    Common common;
    AamFlags aam;
    SimplexFlags simplex;
    std::string table = "t1";
    std::optional<std::size_t> replications;
    std::optional<std::size_t> n_obs;
    std::optional<double> hurst;
    std::optional<double> theta;
    std::optional<std::string> grid;
    std::optional<std::string> method;
    double step = 0.001;
    double noise_sd = 0.4;
    std::uint64_t seed = 20240601;
    bool serial = false;
};

void run_study(const StudyArgs& a) {
    dfbm::StudyConfig c;
    c.table = *dfbm::parse_study_table(a.table);
    c.replications = a.replications;
    c.n_obs = a.n_obs;
    c.step = a.step;
    c.noise_sd = a.noise_sd;
    c.seed = a.seed;
    c.aam = a.aam.config();
    c.simplex = a.simplex.options();
    c.parallel = !a.serial;
    if (a.grid) {
        c.grid = parse_grid(*a.grid, "study");
    }
    dfbm::StudyConfig resolved = dfbm::study_defaults(c);
    if (a.hurst || a.theta) {
        dfbm::ModelParams truth = *resolved.truth;
        truth.hurst = a.hurst.value_or(truth.hurst);
        truth.theta = a.theta.value_or(truth.theta);
        c.truth = truth;
    }
    if (a.method) {
        c.methods = parse_methods(*a.method);
    } else {
        c.methods = resolved.methods;
    }
    const dfbm::StudyReport rep = dfbm::run_study(c);
    const std::string prefix = a.common.out;
    const std::string ext = a.common.extension();
    const auto fmt = a.common.output_format();
    if (rep.landscape) {
        write_to(prefix + "_landscape" + ext, dfbm::landscape_table(*rep.landscape), fmt);
        return;
    }
    write_to(prefix + "_replications" + ext, dfbm::replication_table(rep), fmt);
    write_to(prefix + "_aggregate" + ext, dfbm::aggregate_table(rep), fmt);
    write_to(prefix + "_table" + ext, dfbm::summary_table(rep), fmt);
    write_to(prefix + "_timing" + ext, dfbm::timing_table(rep), fmt);
    write_to(prefix + "_timing_table" + ext, dfbm::timing_summary_table(rep), fmt);
}

struct DiagnoseArgs {
    Common common;
    AamFlags aam;
    SimplexFlags simplex;
    std::string input;
    std::optional<double> hurst;
    std::optional<double> theta;
    bool from_ml = false;
};

void run_diagnose(const DiagnoseArgs& a) {
    if (a.from_ml == (a.hurst.has_value() || a.theta.has_value())) {
        throw UsageError("give either --from-ml or both --H and --theta");
    }
    if (!a.from_ml && !(a.hurst && a.theta)) {
        throw UsageError("--H and --theta must be given together");
    }
    const std::string bytes = read_file(a.input);
    const dfbm::TimeSeries series = parse_series(bytes, a.input);
    dfbm::DiagnoseOptions o;
    o.aam = a.aam.config();
    o.simplex = a.simplex.options();
    if (!a.from_ml) {
        o.params = dfbm::ParamPoint{*a.hurst, *a.theta};
    }
    const dfbm::Diagnosis d = dfbm::diagnose(series, o);

    dfbm::Table summary{{"input_hash", "source", "H_prime", "theta_prime", "h_slope", "alpha", "score",
                         "log_likelihood"},
                        {}};
    summary.add_row({dfbm::fnv1a_hex(bytes), std::string(d.ml ? "ml" : "given"), d.params.hurst,
                     d.params.theta, d.transformed.fit.h_slope, d.transformed.fit.alpha, d.score,
                     d.ml ? dfbm::Cell{d.ml->objective} : dfbm::Cell{}});
    const auto fmt = a.common.output_format();
    dfbm::write_table(std::cout, summary, fmt);
    if (!a.common.out.empty()) {
        dfbm::Table plot{{"plot", "ln_tau", "ln_moment", "total_weight"}, {}};
        auto append = [&](const char* name, const dfbm::LogLogPlot& p) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                plot.add_row({std::string(name), p.ln_tau[i], p.ln_moment[i], p.total_weight[i]});
            }
        };
        append("transformed", d.transformed.plot);
        append("raw", d.raw);
        write_to(a.common.out, plot, fmt);
    }
}

struct LandscapeArgs {
    Common common;
    AamFlags aam;
    std::string input;
    std::string h_grid = "0.05:0.95:0.05";
    std::string theta_grid = "5:100:5";
};

void run_landscape(const LandscapeArgs& a) {
    const std::string bytes = read_file(a.input);
    const dfbm::TimeSeries series = parse_series(bytes, a.input);
    const auto rep = dfbm::evaluate_landscape(series, parse_grid(a.h_grid, "H"), parse_grid(a.theta_grid, "theta"),
                                              a.aam.config());
    write_to(a.common.out, dfbm::landscape_table(rep), a.common.output_format());
    if (rep.best) {
        const auto& b = rep.cells[*rep.best];
        std::fprintf(stderr, "ridge row H=%g, best theta=%g, log-likelihood range across theta %.6g, across H %.6g\n",
                     b.hurst, b.theta, rep.range_across_theta, rep.range_across_hurst);
    } else {
        std::fprintf(stderr, "no finite log-likelihood on the grid\n");
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delampertized fBm: simulation and (H, theta) estimation"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "write seeded sample paths as time,value CSV");
    c_sim->add_option("--H", sim.params.hurst, "Hurst exponent");
    c_sim->add_option("--theta", sim.params.theta, "time contraction");
    c_sim->add_option("--sigma", sim.params.sigma, "scale");
    c_sim->add_option("--mu", sim.params.mu, "level");
    c_sim->add_option("--n-obs", sim.n_obs, "observations per path");
    c_sim->add_option("--step", sim.step, "time step; times are step, 2 step, ...");
    c_sim->add_option("--noise-sd", sim.noise_sd, "sd of additive white noise");
    c_sim->add_option("--seed", sim.seed, "base seed");
    c_sim->add_option("--replications", sim.replications, "number of paths (files <out>_NNNN)")
        ->check(CLI::PositiveNumber);
    c_sim->add_option("--model", sim.model, "delampertized or fbm")
        ->check(CLI::IsMember({"delampertized", "fbm"}));
    add_common(c_sim, sim.common, "output file (default stdout)");

    EstimateArgs est;
    auto* c_est = app.add_subcommand("estimate", "fit (H, theta) to a series");
    c_est->add_option("input", est.input, "series CSV ('-' for stdin)")->required();
    c_est->add_option("--method", est.method, "ml, aam or both")->check(CLI::IsMember({"ml", "aam", "both"}));
    c_est->add_option("--step", est.aam.step, "sampling step used by AAM (default: first gap)");
    add_aam(c_est, est.aam);
    add_simplex(c_est, est.simplex);
    add_common(c_est, est.common, "output file (default stdout)");

    StudyArgs st;
    auto* c_st = app.add_subcommand("study", "run a replicated simulation study");
    c_st->add_option("--table", st.table, "t1, t2, t3, timing, t_aam_long, misspec or landscape")
        ->check(CLI::IsMember({"t1", "t2", "t3", "timing", "t_aam_long", "misspec", "landscape"}));
    c_st->add_option("--replications", st.replications, "replications per cell");
    c_st->add_option("--n-obs", st.n_obs, "observations per path");
    c_st->add_option("--H", st.hurst, "true Hurst exponent (where not varied)");
    c_st->add_option("--theta", st.theta, "true theta (where not varied)");
    c_st->add_option("--grid", st.grid, "values of the varied parameter, list or start:stop:step");
    c_st->add_option("--method", st.method, "ml, aam or both")->check(CLI::IsMember({"ml", "aam", "both"}));
    c_st->add_option("--step", st.step, "time step");
    c_st->add_option("--noise-sd", st.noise_sd, "noise sd of the misspec study");
    c_st->add_option("--seed", st.seed, "base seed");
    c_st->add_flag("--serial", st.serial, "run replications on one thread");
    add_aam(c_st, st.aam);
    add_simplex(c_st, st.simplex);
    add_common(c_st, st.common, "output prefix");
    c_st->get_option("--out")->required();

    DiagnoseArgs dg;
    auto* c_dg = app.add_subcommand("diagnose", "log-log diagnostic of a fitted or given (H', theta')");
    c_dg->add_option("input", dg.input, "series CSV ('-' for stdin)")->required();
    c_dg->add_option("--H", dg.hurst, "H' to transform with");
    c_dg->add_option("--theta", dg.theta, "theta' to transform with");
    c_dg->add_flag("--from-ml", dg.from_ml, "fit (H', theta') by maximum likelihood first");
    c_dg->add_option("--step", dg.aam.step, "sampling step (default: first gap)");
    add_aam(c_dg, dg.aam);
    add_simplex(c_dg, dg.simplex);
    add_common(c_dg, dg.common, "file for the transformed and raw log-log plots");

    LandscapeArgs ls;
    auto* c_ls = app.add_subcommand("landscape", "log-likelihood and f_S on an (H, theta) grid");
    c_ls->add_option("input", ls.input, "series CSV ('-' for stdin)")->required();
    c_ls->add_option("--h-grid", ls.h_grid, "H values, list or start:stop:step");
    c_ls->add_option("--theta-grid", ls.theta_grid, "theta values, list or start:stop:step");
    c_ls->add_option("--step", ls.aam.step, "sampling step (default: first gap)");
    add_aam(c_ls, ls.aam);
    add_common(c_ls, ls.common, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*c_sim) {
            run_simulate(sim);
        } else if (*c_est) {
            run_estimate(est);
        } else if (*c_st) {
            run_study(st);
        } else if (*c_dg) {
            run_diagnose(dg);
        } else if (*c_ls) {
            run_landscape(ls);
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const dfbm::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const dfbm::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const dfbm::GridError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const dfbm::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumeric;
    }
    return 0;
}
