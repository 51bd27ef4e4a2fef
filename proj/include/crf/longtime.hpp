#pragma once
#include <optional>
#include <vector>

#include "crf/params.hpp"
#include "crf/state.hpp"

namespace crf {

// Slow drift of the weighted inversion under spontaneous emission, after the
// fast collective transient has rung down.
struct DriftState {
    double u = -1.0;  // 2 J̃z / N, in [−1, 0)
    double r = 0.0;   // Ω_d / Ω_c^h
};

// Quasi-static intracavity field sustaining the slow dynamics:
//   α = γ·Σ_k w_k η_k (1 + 2i(δ_k−δ̄)/γ) s_k / (2i g_rms √N · j̃_z)
// Chosen so the weighted coherence Σ w η s is exactly conserved by the spin
// equations; magnitude scales as γ/(g_rms√N). Singular when the inversion
// crosses zero (normal phase reached).
cplx remnant_field(const EnsembleState& state, const PhysicalParams& p);

// du/dt = −γ[r²/(2u) + u + 1]
double drift_rhs(const DriftState& state, const PhysicalParams& p);

// Stable fixed point u* = −(1+√(1−2r²))/2 of the drift equation; none above
// r = 1/√2 where the branch disappears.
std::optional<double> drift_fixed_point(double r);

// Time for the drift to carry u from the post-quench value −√(1−r²) up to 0
// (escape to the normal phase), in units of 1/γ. Only defined on
// 1/√2 < r < 1; diverges as (r·√2 − 1)^{−1/2} at the lower edge. The closed
// form is cross-checked against direct quadrature of du/|du/dt| to 0.5%.
double equilibration_time(double r);

struct DriftTrajectory {
    std::vector<double> times;
    std::vector<double> u;
};

// Integrate the drift equation from u0 at t_samples.front(); stops early
// (truncating the trajectory) if u reaches 0 and the model turns singular.
DriftTrajectory integrate_drift(double u0, double r, double gamma,
                                const std::vector<double>& t_samples);

} // namespace crf
