#pragma once
#include <vector>

#include "crf/params.hpp"

namespace crf {

struct CouplingNode {
    double eta;    // g_k / g_rms, signed
    double weight; // probability mass
};

// Deterministic coupling grid eta_j = sqrt(2) cos(2 pi j / n_phi), j = 1..n_phi,
// equal weights. For every n_phi >= 3 the r.m.s. normalization sum w eta^2 = 1
// holds exactly (trigonometric identity); n_phi = 2 gives sum w eta^2 = 2, so
// grids smaller than 3 are rejected with a GridError explaining the failure.
std::vector<CouplingNode> coupling_grid(int n_phi);

struct BroadeningNode {
    double delta;  // Stark shift (rad/s), uncentered
    double weight; // probability mass
};

struct BroadeningResult {
    std::vector<BroadeningNode> nodes;
    double mean;    // analytic E[delta]   = delta_max * r/(r+1)
    double std_dev; // analytic Std[delta] = delta_max * sqrt(r/(r+2)) / (r+1)
};

// Equal-weight quantile nodes delta_i = delta_max * ((i-1/2)/n)^(1/r) for the
// power-law density P(delta) ~ (delta/delta_max)^(r-1) on (0, delta_max].
BroadeningResult broadening_nodes(int n_delta, double trap_depth_ratio, double delta_max);

struct GridNode {
    double eta;            // g_k / g_rms, signed
    double delta_centered; // delta_k - delta_bar (rad/s)
    double weight;         // probability mass
};

struct EnsembleGrid {
    std::vector<GridNode> nodes;
    double mean_delta; // delta_bar subtracted during centering (grid mean, rad/s)
    double std_delta;  // analytic std of the broadening law (rad/s)
};

// Outer product of coupling and broadening grids (the two distributions are
// independent); detunings are re-centered by subtracting the grid mean so that
// sum w * delta_centered = 0 to rounding.
EnsembleGrid ensemble_grid(int n_phi, int n_delta, const PhysicalParams& p);

// Checks the grid invariants (weight normalization, r.m.s. coupling, centering).
void validate(const EnsembleGrid& grid, double delta_max);

// Sum of w * eta^2 (the r.m.s.-coupling normalization this library relies on).
double coupling_norm(const EnsembleGrid& grid);

} // namespace crf
