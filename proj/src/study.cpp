#include "dfbm/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <tuple>

#include "dfbm/errors.hpp"
#include "dfbm/likelihood.hpp"
#include "dfbm/process.hpp"
#include "dfbm/rng.hpp"

namespace dfbm {

LogLogPlot raw_loglog_plot(const TimeSeries& series, std::size_t max_lag, std::size_t n_points) {
    const std::size_t n = series.size();
    if (n < 4) {
        throw EstimationError("raw log-log plot needs at least 4 observations");
    }
    if (max_lag < 3 || max_lag >= n) {
        throw DomainError("max_lag must lie in [3, N - 1], got " + std::to_string(max_lag));
    }
    if (n_points < 3) {
        throw DomainError("raw log-log plot needs at least 3 lags");
    }
    const double step = series.grid[1] - series.grid[0];
    std::vector<std::size_t> lags;
    const double top = std::log(static_cast<double>(max_lag));
    for (std::size_t i = 0; i < n_points; ++i) {
        const double frac = static_cast<double>(i) / static_cast<double>(n_points - 1);
        const auto lag = static_cast<std::size_t>(std::lround(std::exp(frac * top)));
        if (lags.empty() || lag > lags.back()) {
            lags.push_back(lag);
        }
    }
    if (lags.size() < 3) {
        throw EstimationError("fewer than 3 distinct lags");
    }
    LogLogPlot plot;
    for (std::size_t lag : lags) {
        double sum = 0.0;
        for (std::size_t i = lag; i < n; ++i) {
            const double d = series.values[i] - series.values[i - lag];
            sum += d * d;
        }
        const double count = static_cast<double>(n - lag);
        plot.ln_tau.push_back(std::log(static_cast<double>(lag) * step));
        plot.ln_moment.push_back(std::log(sum / count));
        plot.total_weight.push_back(count);
        plot.bandwidth.push_back(0.0);
    }
    return plot;
}

Diagnosis diagnose(const TimeSeries& series, const DiagnoseOptions& options) {
    Diagnosis d;
    if (options.params) {
        require_hurst(options.params->hurst);
        require_theta(options.params->theta);
        d.params = *options.params;
    } else {
        d.ml = fit_ml(series, options.simplex);
        d.params = {d.ml->hurst, d.ml->theta};
    }
    d.transformed = aam_evaluate(series, d.params.hurst, d.params.theta, options.aam);
    d.score = std::abs(d.transformed.fit.h_slope - d.params.hurst);
    const auto max_lag = std::max<std::size_t>(
        3, static_cast<std::size_t>(std::floor(options.aam.rho * static_cast<double>(series.size()))));
    d.raw = raw_loglog_plot(series, std::min(max_lag, series.size() - 1), options.aam.n_scales);
    return d;
}

// ---------------------------------------------------------------------------

LandscapeReport evaluate_landscape(const TimeSeries& series, const std::vector<double>& hurst,
                                   const std::vector<double>& theta, const AamConfig& aam) {
    if (hurst.empty() || theta.empty()) {
        throw DomainError("landscape grid must be non-empty in both directions");
    }
    for (double h : hurst) {
        require_hurst(h);
    }
    for (double t : theta) {
        require_theta(t);
    }
    LandscapeReport rep;
    rep.hurst = hurst;
    rep.theta = theta;
    rep.cells.resize(hurst.size() * theta.size());
    const auto total = static_cast<std::ptrdiff_t>(rep.cells.size());

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t c = 0; c < total; ++c) {
        auto& cell = rep.cells[static_cast<std::size_t>(c)];
        cell.hurst = hurst[static_cast<std::size_t>(c) / theta.size()];
        cell.theta = theta[static_cast<std::size_t>(c) % theta.size()];
        try {
            const double ll = log_likelihood(series, cell.hurst, cell.theta).value;
            if (std::isfinite(ll)) {
                cell.log_likelihood = ll;
            }
        } catch (const Error&) {
        }
        const double f = aam_objective(series, cell.hurst, cell.theta, aam);
        if (std::isfinite(f)) {
            cell.objective = f;
        }
    }

    for (std::size_t c = 0; c < rep.cells.size(); ++c) {
        const auto& ll = rep.cells[c].log_likelihood;
        if (ll && (!rep.best || *ll > *rep.cells[*rep.best].log_likelihood)) {
            rep.best = c;
        }
    }
    if (rep.best) {
        const std::size_t bh = *rep.best / theta.size();
        const std::size_t bt = *rep.best % theta.size();
        auto range = [](const std::vector<double>& v) {
            if (v.empty()) {
                return 0.0;
            }
            const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
            return *hi - *lo;
        };
        std::vector<double> row;
        std::vector<double> col;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            if (const auto& ll = rep.at(bh, j).log_likelihood) {
                row.push_back(*ll);
            }
        }
        for (std::size_t i = 0; i < hurst.size(); ++i) {
            if (const auto& ll = rep.at(i, bt).log_likelihood) {
                col.push_back(*ll);
            }
        }
        rep.range_across_theta = range(row);
        rep.range_across_hurst = range(col);
    }
    return rep;
}

namespace {

Cell opt_cell(const std::optional<double>& v) {
    if (v) {
        return *v;
    }
    return std::monostate{};
}

}  // namespace

Table landscape_table(const LandscapeReport& report) {
    Table t{{"H", "theta", "log_likelihood", "f_S", "ridge_row", "grid_max"}, {}};
    const std::size_t nt = report.theta.size();
    for (std::size_t c = 0; c < report.cells.size(); ++c) {
        const auto& cell = report.cells[c];
        const bool ridge = report.best && c / nt == *report.best / nt;
        const bool best = report.best && c == *report.best;
        t.rows.push_back({cell.hurst, cell.theta, opt_cell(cell.log_likelihood), opt_cell(cell.objective), ridge, best});
    }
    return t;
}

// ---------------------------------------------------------------------------

std::string_view study_table_name(StudyTable t) noexcept {
    switch (t) {
        case StudyTable::t1: return "t1";
        case StudyTable::t2: return "t2";
        case StudyTable::t3: return "t3";
        case StudyTable::timing: return "timing";
        case StudyTable::t_aam_long: return "t_aam_long";
        case StudyTable::misspec: return "misspec";
        case StudyTable::landscape: return "landscape";
    }
    return "?";
}

std::optional<StudyTable> parse_study_table(std::string_view name) noexcept {
    for (auto t : {StudyTable::t1, StudyTable::t2, StudyTable::t3, StudyTable::timing, StudyTable::t_aam_long,
                   StudyTable::misspec, StudyTable::landscape}) {
        if (study_table_name(t) == name) {
            return t;
        }
    }
    return std::nullopt;
}

StudyConfig study_defaults(const StudyConfig& config) {
    StudyConfig c = config;
    std::size_t reps = 100;
    std::size_t n = 200;
    ModelParams truth{0.65, 30.0, 1.0, 0.0};
    std::vector<double> grid;
    switch (c.table) {
        case StudyTable::t1:
            break;
        case StudyTable::t2:
            grid = {3.0, 10.0, 30.0, 50.0};
            break;
        case StudyTable::t3:
            n = 50;
            grid = {0.35, 0.5, 0.7, 0.8};
            break;
        case StudyTable::timing:
            reps = 5;
            grid = {25, 50, 75, 100, 150, 200, 300, 500, 1000};
            break;
        case StudyTable::t_aam_long:
            n = 1000;
            grid = {0.4, 0.55, 0.65, 0.75, 0.8};
            c.methods = {Method::aam};
            break;
        case StudyTable::misspec:
            reps = 20;
            truth.hurst = 0.5;
            c.methods = {Method::ml};
            break;
        case StudyTable::landscape:
            reps = 1;
            break;
    }
    if (!c.replications) {
        c.replications = reps;
    }
    if (!c.n_obs) {
        c.n_obs = n;
    }
    if (!c.truth) {
        c.truth = truth;
    }
    if (!c.grid) {
        c.grid = grid;
    }
    if (*c.replications < 1) {
        throw DomainError("replications must be at least 1");
    }
    if (*c.n_obs < 2) {
        throw DomainError("N must be at least 2");
    }
    require_positive(c.step, "step");
    if (!(c.noise_sd >= 0.0)) {
        throw DomainError("noise sd must be non-negative");
    }
    c.truth->validate();
    if (c.methods.empty()) {
        throw DomainError("study needs at least one method");
    }
    return c;
}

std::vector<StudyCell> study_cells(const StudyConfig& c) {
    std::vector<StudyCell> cells;
    const ModelParams& truth = *c.truth;
    switch (c.table) {
        case StudyTable::t2:
            for (double v : *c.grid) {
                ModelParams p = truth;
                p.theta = v;
                cells.push_back({"theta", v, p, *c.n_obs});
            }
            break;
        case StudyTable::t3:
        case StudyTable::t_aam_long:
            for (double v : *c.grid) {
                ModelParams p = truth;
                p.hurst = v;
                cells.push_back({"H", v, p, *c.n_obs});
            }
            break;
        case StudyTable::timing:
            for (double v : *c.grid) {
                if (!(v >= 2.0) || v != std::floor(v)) {
                    throw DomainError("timing grid values must be integers >= 2");
                }
                cells.push_back({"N", v, truth, static_cast<std::size_t>(v)});
            }
            break;
        default:
            cells.push_back({"-", 0.0, truth, *c.n_obs});
            break;
    }
    for (const auto& cell : cells) {
        cell.truth.validate();
    }
    return cells;
}

namespace {

EstimationResult run_fit(Method m, const TimeSeries& s, const StudyConfig& c) {
    return m == Method::ml ? fit_ml(s, c.simplex) : fit_aam(s, c.aam, c.simplex);
}

void fill_fit(ReplicationRow& row, Method m, const TimeSeries& s, const StudyConfig& c) {
    try {
        row.result = run_fit(m, s, c);
        row.ok = std::isfinite(row.result.hurst) && std::isfinite(row.result.theta);
        if (!row.ok) {
            row.error = "non-finite estimate";
        }
    } catch (const Error& e) {
        row.ok = false;
        row.error = e.what();
    }
}

void fill_misspec(ReplicationRow& row, const TimeSeries& s, const StudyConfig& c) {
    fill_fit(row, Method::ml, s, c);
    if (!row.ok) {
        return;
    }
    try {
        const auto ev = aam_evaluate(s, row.result.hurst, row.result.theta, c.aam);
        row.result.h_slope = ev.fit.h_slope;
        row.result.alpha = ev.fit.alpha;
        row.score = std::abs(ev.fit.h_slope - row.result.hurst);
    } catch (const Error& e) {
        row.ok = false;
        row.error = std::string("diagnostic: ") + e.what();
    }
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

StudyReport run_study(const StudyConfig& config) {
    StudyReport rep;
    rep.config = study_defaults(config);
    const StudyConfig& c = rep.config;

    if (c.table == StudyTable::landscape) {
        const ModelParams& truth = *c.truth;
        const TimeGrid grid = TimeGrid::equispaced(*c.n_obs, c.step, c.step);
        const TimeSeries path = sample_path(grid, truth, Model::delampertized, stream_seed(c.seed, 0));
        std::vector<double> hs;
        std::vector<double> ts;
        for (int i = 1; i <= 19; ++i) {
            hs.push_back(0.05 * i);
        }
        for (int i = 1; i <= 20; ++i) {
            ts.push_back(5.0 * i);
        }
        rep.cells.push_back({"-", 0.0, truth, *c.n_obs});
        rep.landscape = evaluate_landscape(path, hs, ts, c.aam);
        return rep;
    }

    rep.cells = study_cells(c);
    const bool misspec = c.table == StudyTable::misspec;
    const std::size_t reps = *c.replications;
    const std::size_t per_rep = misspec ? 2 : c.methods.size();
    rep.rows.resize(rep.cells.size() * reps * per_rep);

    for (std::size_t ci = 0; ci < rep.cells.size(); ++ci) {
        const StudyCell& cell = rep.cells[ci];
        const TimeGrid grid = TimeGrid::equispaced(cell.n_obs, c.step, c.step);
        const PathSampler sampler(grid, cell.truth, Model::delampertized);
        const auto n_reps = static_cast<std::ptrdiff_t>(reps);
        const bool parallel = c.parallel && c.table != StudyTable::timing;

#pragma omp parallel for schedule(dynamic) if (parallel)
        for (std::ptrdiff_t r = 0; r < n_reps; ++r) {
            const auto ur = static_cast<std::size_t>(r);
            const std::uint64_t seed = stream_seed(c.seed, ur);
            ReplicationRow* out = &rep.rows[(ci * reps + ur) * per_rep];
            const TimeSeries path = sampler.sample(seed);
            if (misspec) {
                const TimeSeries noisy = add_white_noise(path, c.noise_sd, stream_seed(seed, 1));
                const TimeSeries* series[2] = {&path, &noisy};
                const char* names[2] = {"clean", "noisy"};
                for (int v = 0; v < 2; ++v) {
                    ReplicationRow& row = out[v];
                    row.cell = ci;
                    row.replication = ur;
                    row.seed = seed;
                    row.method = Method::ml;
                    row.variant = names[v];
                    fill_misspec(row, *series[v], c);
                }
            } else {
                for (std::size_t m = 0; m < c.methods.size(); ++m) {
                    ReplicationRow& row = out[m];
                    row.cell = ci;
                    row.replication = ur;
                    row.seed = seed;
                    row.method = c.methods[m];
                    fill_fit(row, c.methods[m], path, c);
                }
            }
        }
    }
    rep.aggregates = aggregate_rows(rep.rows);
    return rep;
}

std::vector<AggregateRow> aggregate_rows(const std::vector<ReplicationRow>& rows) {
    using Key = std::tuple<std::size_t, int, std::string>;
    std::map<Key, std::vector<const ReplicationRow*>> groups;
    for (const auto& r : rows) {
        groups[{r.cell, static_cast<int>(r.method), r.variant}].push_back(&r);
    }
    std::vector<AggregateRow> out;
    for (const auto& [key, members] : groups) {
        AggregateRow a;
        a.cell = std::get<0>(key);
        a.method = static_cast<Method>(std::get<1>(key));
        a.variant = std::get<2>(key);
        std::vector<double> h;
        std::vector<double> th;
        std::vector<double> wall;
        std::vector<double> score;
        std::vector<double> alpha;
        for (const auto* r : members) {
            if (!r->ok) {
                ++a.failed;
                continue;
            }
            ++a.ok;
            h.push_back(r->result.hurst);
            th.push_back(r->result.theta);
            wall.push_back(r->result.wall_seconds);
            if (r->score) {
                score.push_back(*r->score);
            }
            if (r->result.alpha) {
                alpha.push_back(*r->result.alpha);
            }
        }
        auto mean = [](const std::vector<double>& v) {
            if (v.empty()) {
                return std::numeric_limits<double>::quiet_NaN();
            }
            double s = 0.0;
            for (double x : v) {
                s += x;
            }
            return s / static_cast<double>(v.size());
        };
        auto sd = [&](const std::vector<double>& v) {
            if (v.empty()) {
                return std::numeric_limits<double>::quiet_NaN();
            }
            if (v.size() == 1) {
                return 0.0;
            }
            const double m = mean(v);
            double s = 0.0;
            for (double x : v) {
                s += (x - m) * (x - m);
            }
            return std::sqrt(s / static_cast<double>(v.size() - 1));
        };
        a.mean_hurst = mean(h);
        a.sd_hurst = sd(h);
        a.mean_theta = mean(th);
        a.sd_theta = sd(th);
        a.mean_wall = mean(wall);
        if (!score.empty()) {
            a.median_score = median(score);
        }
        if (!alpha.empty()) {
            a.mean_alpha = mean(alpha);
        }
        out.push_back(std::move(a));
    }
    return out;
}

namespace {

Cell opt_str(const std::string& s) {
    if (s.empty()) {
        return std::monostate{};
    }
    return s;
}

std::string mean_sd(double mean, double sd) {
    if (std::isnan(mean)) {
        return "NA";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f (%.3f)", mean, sd);
    return buf;
}

std::string column_name(Method m, const std::string& variant) {
    std::string name(method_name(m));
    if (!variant.empty()) {
        name += " " + variant;
    }
    return name;
}

}  // namespace

Table replication_table(const StudyReport& report) {
    Table t{{"table", "cell", "true_H", "true_theta", "n_obs", "replication", "seed", "method", "variant", "status",
             "H_hat", "theta_hat", "objective", "h_slope", "alpha", "score", "iterations", "evaluations",
             "converged", "error"},
            {}};
    const std::string table(study_table_name(report.config.table));
    for (const auto& r : report.rows) {
        const StudyCell& cell = report.cells[r.cell];
        std::vector<Cell> row{table,
                              cell.value,
                              cell.truth.hurst,
                              cell.truth.theta,
                              static_cast<std::uint64_t>(cell.n_obs),
                              static_cast<std::uint64_t>(r.replication),
                              r.seed,
                              std::string(method_name(r.method)),
                              opt_str(r.variant),
                              std::string(r.ok ? "ok" : "failed")};
        if (r.ok) {
            row.insert(row.end(), {r.result.hurst, r.result.theta, r.result.objective, opt_cell(r.result.h_slope),
                                   opt_cell(r.result.alpha), opt_cell(r.score),
                                   static_cast<std::uint64_t>(r.result.iterations),
                                   static_cast<std::uint64_t>(r.result.evaluations), r.result.converged});
        } else {
            row.insert(row.end(), 9, std::monostate{});
        }
        row.push_back(opt_str(r.error));
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table aggregate_table(const StudyReport& report) {
    Table t{{"table", "cell", "true_H", "true_theta", "n_obs", "method", "variant", "n_ok", "n_failed", "mean_H",
             "sd_H", "mean_theta", "sd_theta", "median_score", "mean_alpha"},
            {}};
    const std::string table(study_table_name(report.config.table));
    for (const auto& a : report.aggregates) {
        const StudyCell& cell = report.cells[a.cell];
        t.rows.push_back({table, cell.value, cell.truth.hurst, cell.truth.theta,
                          static_cast<std::uint64_t>(cell.n_obs), std::string(method_name(a.method)),
                          opt_str(a.variant), static_cast<std::uint64_t>(a.ok),
                          static_cast<std::uint64_t>(a.failed), a.mean_hurst, a.sd_hurst, a.mean_theta, a.sd_theta,
                          opt_cell(a.median_score), opt_cell(a.mean_alpha)});
    }
    return t;
}

namespace {

/// Distinct (method, variant) pairs in first-appearance order.
std::vector<std::pair<Method, std::string>> series_columns(const StudyReport& report) {
    std::vector<std::pair<Method, std::string>> cols;
    for (const auto& a : report.aggregates) {
        const std::pair<Method, std::string> key{a.method, a.variant};
        if (std::find(cols.begin(), cols.end(), key) == cols.end()) {
            cols.push_back(key);
        }
    }
    return cols;
}

const AggregateRow* find_aggregate(const StudyReport& report, std::size_t cell, Method m, const std::string& v) {
    for (const auto& a : report.aggregates) {
        if (a.cell == cell && a.method == m && a.variant == v) {
            return &a;
        }
    }
    return nullptr;
}

}  // namespace

Table summary_table(const StudyReport& report) {
    const auto cols = series_columns(report);
    const std::string label = report.cells.empty() ? "-" : report.cells.front().label;
    Table t;
    t.header.push_back(label);
    for (const auto& [m, v] : cols) {
        t.header.push_back(column_name(m, v) + " H");
        t.header.push_back(column_name(m, v) + " theta");
        if (report.config.table == StudyTable::misspec) {
            t.header.push_back(column_name(m, v) + " median score");
        }
    }
    for (std::size_t ci = 0; ci < report.cells.size(); ++ci) {
        std::vector<Cell> row{report.cells[ci].value};
        for (const auto& [m, v] : cols) {
            const AggregateRow* a = find_aggregate(report, ci, m, v);
            row.push_back(a ? mean_sd(a->mean_hurst, a->sd_hurst) : std::string("NA"));
            row.push_back(a ? mean_sd(a->mean_theta, a->sd_theta) : std::string("NA"));
            if (report.config.table == StudyTable::misspec) {
                row.push_back(a ? opt_cell(a->median_score) : Cell{});
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table timing_table(const StudyReport& report) {
    Table t{{"cell", "n_obs", "replication", "method", "variant", "status", "wall_seconds"}, {}};
    for (const auto& r : report.rows) {
        const StudyCell& cell = report.cells[r.cell];
        t.rows.push_back({cell.value, static_cast<std::uint64_t>(cell.n_obs),
                          static_cast<std::uint64_t>(r.replication), std::string(method_name(r.method)),
                          opt_str(r.variant), std::string(r.ok ? "ok" : "failed"),
                          r.ok ? Cell{r.result.wall_seconds} : Cell{}});
    }
    return t;
}

Table timing_summary_table(const StudyReport& report) {
    const auto cols = series_columns(report);
    Table t;
    t.header.push_back(report.cells.empty() ? "-" : report.cells.front().label);
    for (const auto& [m, v] : cols) {
        t.header.push_back(column_name(m, v) + " seconds");
    }
    for (std::size_t ci = 0; ci < report.cells.size(); ++ci) {
        std::vector<Cell> row{report.cells[ci].value};
        for (const auto& [m, v] : cols) {
            const AggregateRow* a = find_aggregate(report, ci, m, v);
            row.push_back(a && !std::isnan(a->mean_wall) ? Cell{a->mean_wall} : Cell{});
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace dfbm
