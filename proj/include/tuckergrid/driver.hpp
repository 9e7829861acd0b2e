#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tuckergrid/extrapolation.hpp"

namespace tuckergrid {

/// Batch-run configuration (the CLI is a thin wrapper around this).
struct RunConfig {
    std::string geometry_path;
    std::string mode = "hf";  // hf | lda | hf1e
    double eps = 1e-6;
    std::string box = "auto";  // half-width in bohr, or "auto"
    std::vector<int> grids = {64, 128};
    int max_iter = 60;
    int mix_depth = 5;
    double mix_beta = 0.7;
    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool verbose = false;
};

/// Throws std::invalid_argument on invalid settings (grid sizes must be
/// powers of two in [16, 1024] and strictly doubling; eps in [1e-12, 1e-3]).
void validate_config(const RunConfig& config);

ScfMode parse_mode(const std::string& mode);

/// Box half-width: explicit value, or the heuristic
/// L = clamp(0.65 * ln(1/eps) / sqrt(-2 lambda_est), 8, 24) bohr, where
/// lambda_est is the initial-guess HOMO energy capped at -0.35 (deeper
/// estimates would undersize the box).
double resolve_box(const RunConfig& config, const Molecule& mol);

struct RunResult {
    int exit_code = 0;  // 0 converged, 2 not converged
    LadderResult ladder;
    double box = 0.0;
    std::string report_path;
};

/// Parse the geometry, run the grid ladder, write report.json, ladder.csv
/// and per-level trace_n*.csv into out_dir (atomically). Deterministic for a
/// fixed config and seed, apart from the wall-time fields.
RunResult run(const RunConfig& config);

struct BoxSweepRow {
    double box = 0.0;
    int n = 0;
    double energy = 0.0;
    double error_vs_largest = 0.0;
    bool converged = false;
};

/// Single-grid solves over a list of box sizes at fixed step h (taken from
/// grids[0] and box_sizes[0]); writes box_sweep.csv. Needs >= 2 sizes.
std::vector<BoxSweepRow> box_sweep(const RunConfig& config,
                                   const std::vector<double>& box_sizes);

}  // namespace tuckergrid
