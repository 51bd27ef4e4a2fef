#pragma once
#include <optional>
#include <string>
#include <vector>

#include "crf/distributions.hpp"
#include "crf/parallel.hpp"
#include "crf/params.hpp"
#include "crf/state.hpp"

namespace crf {

// Steady-state regimes: lossless (ideal) vs spontaneous-emission-limited
// (se), homogeneous vs inhomogeneous coupling, and the fully broadened grid.
enum class Regime { IdealHomog, IdealInhomog, SeHomog, SeInhomog, SeBroadened };

std::string to_string(Regime regime);

struct SteadyStateSolution {
    Regime regime = Regime::IdealHomog;
    bool exists = false;
    // normalized field β = α·√(8 g_rms² N / γ²); only the se regimes have it
    std::optional<cplx> beta;
    // accumulated quadrature Q_ss in seconds; only the ideal regimes have it
    std::optional<double> q_ss;
    std::optional<double> j_z_weighted;  // 2 J̃z / N
};

struct CriticalDrive {
    Regime regime = Regime::IdealHomog;
    double value = 0.0;  // Ω_crit / Ω_c^h
};

// Bessel functions J0, J1, J2 for |x| < 1e4.
double bessel_j(int order, double x);

// Lossless homogeneous branch: j_z = −√(1−r²), sin(g√N Q_ss) = r.
SteadyStateSolution ss_ideal_homog(double r, const PhysicalParams& p);

// Lossless cosine-distributed couplings: J₁(x) = r/√2 on the first branch,
// x = √2 g√N Q_ss, j_z = −[J₀(x) − J₂(x)].
SteadyStateSolution ss_ideal_inhomog(double r, const PhysicalParams& p);

// Spontaneous-emission-limited homogeneous branch:
// β = (1−√(1−2r²))/(√2 r), j_z = −(1/2)[1+√(1−2r²)]; exists iff r ≤ 1/√2.
SteadyStateSolution ss_se_homog(double r);

// Spontaneous-emission-limited with cosine couplings:
// (√2/β)(1−1/√(1+2β²)) = r for the smallest β; j_z by φ-quadrature of the
// per-coupling inversion.
SteadyStateSolution ss_se_inhomog(double r);

// Full grid with couplings and broadening. Solves |F(u)| = r with
//   F(u) = √2·u·[Σ_k w_k η_k² / ((1+2iδ̃_k/γ)(1+η_k²u²/(1+4δ̃_k²/γ²))) + c]
// for the smallest u = |β|; the drive-to-field phase comes from arg F. The
// constant c = κγ/(4 g_rms² N) (empty-cavity backaction) is dropped by
// default and can be switched on for finite-cooperativity studies.
SteadyStateSolution ss_broadened(double r, const EnsembleGrid& grid,
                                 const PhysicalParams& p,
                                 bool include_kappa_gamma_term = false);

// Materialize a solution as a full EnsembleState on the given grid (the grid
// must match the regime: single η=1 node for the homogeneous regimes, the
// coupling/broadening grid otherwise). Spin components are reconstructed
// from the steady-state relations, so the spin equations of rhs_full balance
// exactly on the result.
EnsembleState embed_steady_state(const SteadyStateSolution& sol,
                                 const EnsembleGrid& grid, const PhysicalParams& p);

// Critical drive of a stationary regime, found by golden-section
// maximization of the regime's field equation. grid/p are required for
// SeBroadened (and p for nothing else).
CriticalDrive critical_drive(Regime regime, const EnsembleGrid* grid = nullptr,
                             const PhysicalParams* p = nullptr);

struct DynamicCriticalOptions {
    double r_start = 0.60;
    double r_step = 0.01;
    double r_max = 0.95;
    int bisect_iters = 12;
    double t_ramp = 5e-6;
    double t_hold = 9.3e-6;
    ExecMode mode = ExecMode::Auto;
};

// Finite-time critical drive: marches the end-of-hold J̃z upward in r until
// it first crosses zero, then bisects. This is the experimentally relevant
// threshold for the ramp-and-hold protocol, not a stationary root.
double dynamic_critical(const PhysicalParams& p, const EnsembleGrid& grid,
                        const DynamicCriticalOptions& opt = {});

struct CriticalTableRow {
    std::string label;
    double value = 0.0;      // computed Ω_crit / Ω_c^h
    double reference = 0.0;  // tabulated value the computation should match
};

// The six critical-drive entries: the five stationary regimes plus the
// finite-time dynamic threshold (skipped when include_dynamic is false).
std::vector<CriticalTableRow> critical_table(const PhysicalParams& p,
                                             const EnsembleGrid& grid,
                                             bool include_dynamic = true,
                                             const DynamicCriticalOptions& dyn = {});

} // namespace crf
