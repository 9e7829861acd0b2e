#pragma once

#include <vector>

#include "tuckergrid/scf.hpp"

namespace tuckergrid {

/// One Aitken delta-squared pass: out[n] = E[n+2] - (E[n+2]-E[n+1])^2 /
/// (E[n+2] - 2E[n+1] + E[n]). Entries whose denominator falls under
/// 1e-14 |E[n+2]| keep the raw E[n+2] (guard against cancellation).
std::vector<double> aitken(const std::vector<double>& e);

/// Recursive acceleration: min(2, (len-1)/2) passes while >= 3 terms remain
/// and the denominators stay above the guard. Returns the last value of the
/// deepest sequence.
double aitken_extrapolate(const std::vector<double>& e);

/// Prolongation matrix from an n-point cell-centered mode to the 2n-point
/// mode at the same box size: 1D linear interpolation with zero padding
/// beyond the coarse range. Applying it to all three factor matrices
/// trilinearly interpolates the tensor.
Eigen::MatrixXd prolongation_matrix(const Grid& coarse, const Grid& fine);

/// Warm start for the next ladder level: interpolated, re-orthonormalized
/// orbitals plus the previous orbital energies; mixer and caches reset.
SCFState prolong_state(const ScfContext& coarse_ctx, const SCFState& state,
                       const ScfContext& fine_ctx);

struct LadderLevel {
    int n = 0;
    EnergyReport report;
    double seconds = 0.0;
    double seconds_per_iteration = 0.0;
};

struct LadderResult {
    std::vector<LadderLevel> levels;
    double extrapolated_energy = 0.0;
    double extrapolated_homo = 0.0;
    bool complete = false;  // false if a level failed to converge
    std::vector<double> empirical_orders;  // log2 ratio of successive E deltas
};

/// Solve on the grid ladder (strictly increasing powers of two, fixed L),
/// warm-starting each level from the previous one, then Aitken-extrapolate
/// the energies. A non-converged level halts the ladder; partial results are
/// returned with complete = false.
LadderResult run_ladder(const Molecule& mol, double box_half_width,
                        const std::vector<int>& grid_sizes, const ScfOptions& options);

}  // namespace tuckergrid
