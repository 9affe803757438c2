#pragma once

#include "infsamp/baselines.hpp"
#include "infsamp/gibbs.hpp"
#include "infsamp/model.hpp"
#include "infsamp/normconst.hpp"
#include "infsamp/sir.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace infsamp {

/// One parameter setting of the simulation study together with every knob of the pipeline.
struct ExperimentCell {
    std::string name;
    SuperParams params;
    std::size_t N = 100;
    std::size_t n = 10;
    std::size_t K = 200;
    GibbsConfig mcmc;
    NormConstConfig constants;
    std::size_t sir_M0 = 200;
    double level = 0.95;
    IntervalKind interval = IntervalKind::EqualTail;
    HtInterval ht_form = HtInterval::Rooted;
    std::uint64_t seed = 20240601;
    /// Output tables and figures this cell feeds.
    std::set<int> tables;
    std::set<int> figures;

    void validate() const;
};

/// Draw a finite population: log Y ~ N(mu, sigma2), nu = beta0 + beta1 Y + e.  Error terms are redrawn
/// one unit at a time until every nu_i > 0 and every n nu_i / t < 1.
FinitePopulation generate_population(const SuperParams& params, std::size_t N, std::size_t n, RandomStream& rng);

struct NigResult {
    Summary ybar;
    Summary ey;
    /// Mean over resampled draws of the mean imputed non-sampled response.
    double posterior_mean_nonsampled = 0.0;
    /// Self-normalised 1/C-weighted mean of the finite-population mean over all Gibbs draws, before resampling.
    double weighted_ybar = 0.0;
    double ess = 0.0;
    std::size_t flagged_constants = 0;
    GibbsDiagnostics diagnostics;
    std::vector<double> ybar_draws;
    std::vector<double> ey_draws;
};

/// Gibbs draws, one normalisation constant per draw, SIR resampling, summaries.  `start` replaces
/// the default initial state when given.
NigResult nig_infer(const ObservedData& data, const GibbsConfig& mcmc, const NormConstConfig& constants, std::size_t M0,
                    double level, RandomStream& rng, const GibbsState* start = nullptr);

struct MethodInterval {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

struct ReplicationResult {
    std::size_t rep = 0;
    bool ok = false;
    std::string error;
    double truth_ybar = 0.0;
    double truth_ey = 0.0;
    double corr = 0.0;
    double sample_mean = 0.0;
    double nig_post_mean_ns = 0.0;
    double nig_ess = 0.0;
    MethodInterval nig_ybar, nig_ey, ig_ybar, ig_ey, ht_ybar;
    double seconds = 0.0;
};

ReplicationResult run_replication(const ExperimentCell& cell, std::size_t rep);

struct TargetMetrics {
    double relative_bias = 0.0;
    double mean_width = 0.0;
    double coverage = 0.0;
    double coverage_se = 0.0;
    double adjusted_coverage = 0.0;
    double adjusted_coverage_se = 0.0;
};

struct CellMetrics {
    std::string name;
    std::size_t completed = 0;
    std::size_t failed = 0;
    double mean_corr = 0.0;
    double mean_ess = 0.0;
    TargetMetrics nig_ybar, nig_ey, ig_ybar, ig_ey, ht_ybar;
    bool cell_failed = false;
};

struct IntervalRecord {
    double lo;
    double hi;
    double truth;
};

/// Coverage of intervals `a` after recentring each at its midpoint with the width of the paired interval in `b`.
double adjust_width(const std::vector<IntervalRecord>& a, const std::vector<IntervalRecord>& b);

CellMetrics summarize_cell(const ExperimentCell& cell, const std::vector<ReplicationResult>& reps);

struct CellRun {
    ExperimentCell cell;
    std::vector<ReplicationResult> reps;
    CellMetrics metrics;
};

using ProgressFn = std::function<void(const std::string& cell, std::size_t done, std::size_t total)>;

/// Runs all replications of a cell on `workers` threads.  Results do not depend on the worker count.
CellRun run_cell(const ExperimentCell& cell, std::size_t workers, const ProgressFn& progress = {});

/// Parses an INI file: a [defaults] section plus one section per cell.
std::vector<ExperimentCell> load_config(const std::filesystem::path& path);

/// The cell's settings as a JSON object, as written to the run manifest.
std::string cell_description(const ExperimentCell& cell);

/// Writes table CSVs, figure CSVs, per-replication CSVs and manifest.json.
void emit_outputs(const std::vector<CellRun>& runs, const std::filesystem::path& out_dir, const std::string& manifest_extra_json = "{}");

} // namespace infsamp
