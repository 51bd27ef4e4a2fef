#pragma once
#include <utility>

#include "crf/params.hpp"
#include "crf/state.hpp"

namespace crf {

// Mean-field Bloch vector on the cooperative branch: tilted from −z toward
// +y by θ = arcsin(Ω_d/Ω_c^h).
struct BlochAngle {
    double theta = 0.0;
    double j_y = 0.0;  // ⟨Ĵ_y⟩/(N/2) = sin θ
    double j_z = 0.0;  // ⟨Ĵ_z⟩/(N/2) = −cos θ
};

BlochAngle mean_field_angle(double r);

// Leading-order steady-state variance ⟨Ĵ_x²⟩ = (N/4)√(1−r²) from the
// linearized (Holstein-Primakoff) fluctuation analysis: the x-quadrature is
// squeezed below the coherent-state value N/4, vanishing at the transition.
// Only valid away from r=1 where the expansion breaks.
double hp_squeezing(double r, double n_atoms);

// Linearized response after a quench onto the cooperative branch:
//   λ± = −κ/4 ± i√(2 g_rms² N|j̃_z|/2·2 − κ²/16)
// i.e. radicand 2 g_rms²·(N|j_z_weighted|/2) − κ²/16. Negative radicand
// returns the two real overdamped rates instead.
std::pair<cplx, cplx> quench_eigenvalues(double j_z_weighted,
                                         const PhysicalParams& p);

} // namespace crf
