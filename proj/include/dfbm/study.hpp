#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dfbm/aam.hpp"
#include "dfbm/estimation.hpp"
#include "dfbm/io.hpp"
#include "dfbm/simplex.hpp"
#include "dfbm/types.hpp"

namespace dfbm {

// ---------------------------------------------------------------------------
// Diagnostics on a single series
// ---------------------------------------------------------------------------

/// Log-log plot of the raw series: mean squared increment at index lags
/// spread log-uniformly over [1, max_lag], tau = lag * first gap.
/// total_weight holds the number of increments averaged at each lag.
LogLogPlot raw_loglog_plot(const TimeSeries& series, std::size_t max_lag, std::size_t n_points);

struct DiagnoseOptions {
    /// (H', theta') to transform with; fitted by ML when empty.
    std::optional<ParamPoint> params;
    AamConfig aam;
    SimplexOptions simplex;
};

struct Diagnosis {
    ParamPoint params;
    std::optional<EstimationResult> ml;
    AamEvaluation transformed;
    LogLogPlot raw;
    double score = 0.0;  ///< |h_slope - H'|
};

Diagnosis diagnose(const TimeSeries& series, const DiagnoseOptions& options);

// ---------------------------------------------------------------------------
// Likelihood / objective landscape
// ---------------------------------------------------------------------------

struct LandscapeCell {
    double hurst = 0.0;
    double theta = 0.0;
    std::optional<double> log_likelihood;
    std::optional<double> objective;
};

struct LandscapeReport {
    std::vector<double> hurst;
    std::vector<double> theta;
    std::vector<LandscapeCell> cells;  ///< row-major: hurst outer, theta inner
    std::optional<std::size_t> best;   ///< cell with the largest log-likelihood
    /// Log-likelihood range (max - min) along the H row of the best cell,
    /// i.e. across theta, and along its theta column, i.e. across H.
    double range_across_theta = 0.0;
    double range_across_hurst = 0.0;

    const LandscapeCell& at(std::size_t i_hurst, std::size_t i_theta) const {
        return cells[i_hurst * theta.size() + i_theta];
    }
};

/// Evaluates the log-likelihood and f_S on every grid cell. Failed
/// evaluations are left empty.
LandscapeReport evaluate_landscape(const TimeSeries& series, const std::vector<double>& hurst,
                                   const std::vector<double>& theta, const AamConfig& aam);

/// Columns H, theta, log_likelihood, f_S, ridge_row, grid_max.
Table landscape_table(const LandscapeReport& report);

// ---------------------------------------------------------------------------
// Simulation study
// ---------------------------------------------------------------------------

enum class StudyTable { t1, t2, t3, timing, t_aam_long, misspec, landscape };

std::string_view study_table_name(StudyTable t) noexcept;
std::optional<StudyTable> parse_study_table(std::string_view name) noexcept;

struct StudyConfig {
    StudyTable table = StudyTable::t1;
    /// Unset fields take the table's defaults (see study_defaults).
    std::optional<std::size_t> replications;
    std::optional<std::size_t> n_obs;
    std::optional<ModelParams> truth;
    /// Values of the varied parameter (theta for t2, H for t3 / t_aam_long,
    /// N for timing); ignored by t1, misspec and landscape.
    std::optional<std::vector<double>> grid;
    double step = 0.001;
    double noise_sd = 0.4;  ///< misspec only
    std::uint64_t seed = 20240601;
    AamConfig aam;
    SimplexOptions simplex;
    std::vector<Method> methods{Method::ml, Method::aam};
    /// Run replications on the OpenMP pool; timing ignores this and runs serially.
    bool parallel = true;
};

/// A config with every optional resolved to the table default.
StudyConfig study_defaults(const StudyConfig& config);

/// One study cell: the true parameters and sample size of one table row.
struct StudyCell {
    std::string label;  ///< "theta", "H", "N" or "-"
    double value = 0.0;
    ModelParams truth;
    std::size_t n_obs = 0;
};

std::vector<StudyCell> study_cells(const StudyConfig& resolved);

struct ReplicationRow {
    std::size_t cell = 0;
    std::size_t replication = 0;
    std::uint64_t seed = 0;
    Method method = Method::ml;
    std::string variant;  ///< "clean" / "noisy" in misspec, "" otherwise
    bool ok = false;
    std::string error;
    EstimationResult result;
    std::optional<double> score;  ///< misspec: |h_slope - H'| at the ML fit
};

struct AggregateRow {
    std::size_t cell = 0;
    Method method = Method::ml;
    std::string variant;
    std::size_t ok = 0;
    std::size_t failed = 0;
    double mean_hurst = 0.0;
    double sd_hurst = 0.0;
    double mean_theta = 0.0;
    double sd_theta = 0.0;
    double mean_wall = 0.0;
    std::optional<double> median_score;
    std::optional<double> mean_alpha;
};

struct StudyReport {
    StudyConfig config;  ///< resolved
    std::vector<StudyCell> cells;
    std::vector<ReplicationRow> rows;  ///< sorted by (cell, replication, method, variant)
    std::vector<AggregateRow> aggregates;
    std::optional<LandscapeReport> landscape;
};

StudyReport run_study(const StudyConfig& config);

/// Mean and sample sd over successful rows, grouped by (cell, method, variant).
/// sd is 0 for a single success; means are NaN with no success.
std::vector<AggregateRow> aggregate_rows(const std::vector<ReplicationRow>& rows);

/// The three tables below exclude wall times and are byte-identical across
/// reruns with the same config.
Table replication_table(const StudyReport& report);
Table aggregate_table(const StudyReport& report);
/// Rows = parameter values, one "mean (sd)" column per method and estimate.
Table summary_table(const StudyReport& report);

/// Per-replication wall times plus, per cell and method, the mean.
Table timing_table(const StudyReport& report);
/// Rows = cell value, one mean-seconds column per method.
Table timing_summary_table(const StudyReport& report);

}  // namespace dfbm
