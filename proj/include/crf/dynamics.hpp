#pragma once
#include <vector>

#include "crf/parallel.hpp"
#include "crf/params.hpp"
#include "crf/state.hpp"

namespace crf {

// Sampled mean-field trajectory. `states` may be left empty when integrating
// in observables-only mode (keep_states=false) to save memory on large
// sweeps; times and observables always have equal length.
struct Trajectory {
    std::vector<double> times;
    std::vector<EnsembleState> states;
    std::vector<Observables> observables;
};

struct IntegrateOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    std::size_t max_steps = 5'000'000;
    ExecMode mode = ExecMode::Auto;
    bool keep_states = true;
};

// Full mean-field equations of motion:
//   dα/dt   = −(κ/2)α − iΔ_ca α − i√N Σ_k w_k g_k s_k + κΩ_d(t)/(4 g_rms √N)
//   ds_k/dt = 2i g_k √N α z_k − (γ/2)s_k − i(δ_k−δ̄)s_k
//   dz_k/dt = −i g_k √N (α s_k* − α* s_k) − γ(z_k + 1/2)
// with g_k = η_k g_rms and δ_k−δ̄ stored per group.
EnsembleState rhs_full(const EnsembleState& state, double t, const PhysicalParams& p,
                       const DriveProtocol& proto, ExecMode mode = ExecMode::Auto);

// Adaptive RK5(4) integration of rhs_full from the given initial state over
// [0, t_hold], sampled (dense output) at t_samples. The integration is split
// at the ramp kink so the controller never sees the slope discontinuity.
Trajectory integrate(const EnsembleState& initial, const PhysicalParams& p,
                     const DriveProtocol& proto, const std::vector<double>& t_samples,
                     const IntegrateOptions& opt = {});

// Adiabatically eliminated collective model (extensive variables, spin N/2):
//   dJ⁻/dt = iΩ_d J_z + Γ J_z J⁻
//   dJ_z/dt = −i(Ω_d/2)(J⁺ − J⁻) − Γ|J⁻|²   with Γ = 4 g_rms²/κ
// Both terms conserve |J⁻|² + J_z².
struct CrfReducedDeriv {
    cplx dj_minus;
    double dj_z;
};
CrfReducedDeriv rhs_crf_reduced(cplx j_minus, double j_z, double omega_d,
                                double gamma_collective);

struct CrfReducedTrajectory {
    std::vector<double> times;
    std::vector<cplx> j_minus;
    std::vector<double> j_z;
};
// Constant drive (quench-style) integration of the reduced collective model.
CrfReducedTrajectory integrate_crf_reduced(cplx j_minus0, double j_z0,
                                           double omega_d, double gamma_collective,
                                           const std::vector<double>& t_samples,
                                           const IntegrateOptions& opt = {});

// Two-variable reduction of the lossless (γ=0, δ=0) model. Q accumulates the
// field quadrature, dQ/dt = 2α; each spin group sits at Bloch angle
// θ_k = g_k √N · Q. Starting from the ground state Q(0)=0 and the dynamics
// keep α and Q real for a real drive.
struct ReducedIdealState {
    cplx alpha{0.0, 0.0};
    cplx q{0.0, 0.0};  // units of time
};

ReducedIdealState rhs_ideal_reduced(const ReducedIdealState& state, double t,
                                    const PhysicalParams& p, const DriveProtocol& proto,
                                    const EnsembleGrid& grid);

struct IdealTrajectory {
    std::vector<double> times;
    std::vector<cplx> alpha;
    std::vector<cplx> q;
    std::vector<double> jz_weighted;
};

IdealTrajectory integrate_ideal(const EnsembleGrid& grid, const PhysicalParams& p,
                                const DriveProtocol& proto,
                                const std::vector<double>& t_samples,
                                const ReducedIdealState& initial = {},
                                const IntegrateOptions& opt = {});

// Weighted inversion implied by the accumulated quadrature Q:
//   J̃z/(N/2) = −Σ_k w_k η_k² cos(η_k g_rms √N Q) / Σ_k w_k η_k²
double ideal_inversion_from_q(const EnsembleGrid& grid, const PhysicalParams& p,
                              cplx q);

struct OscillationFit {
    double frequency;   // angular frequency from mean extremum spacing
    double decay_rate;  // 1/e rate from successive extremum amplitudes
    int n_extrema;
};

// Fits frequency and decay of J̃z(t) oscillations inside [t_lo, t_hi] from
// parabola-refined extrema. Throws OscillationError with fewer than 3 extrema.
OscillationFit extract_oscillation(const Trajectory& traj, double t_lo, double t_hi);

// Trapezoidal time-average of each observable over the final `fraction` of
// the trajectory.
Observables tail_average(const Trajectory& traj, double fraction);

} // namespace crf
