#pragma once
#include <complex>
#include <vector>

#include "crf/distributions.hpp"
#include "crf/params.hpp"

namespace crf {

using cplx = std::complex<double>;

struct SpinGroup {
    double eta;    // g_k / g_rms, signed
    double delta;  // delta_k - delta_bar (rad/s)
    double weight; // probability mass of this group
    cplx s;        // coherence <s_k^->
    double z;      // inversion <s_k^z>
};

// Mean-field state: normalized cavity amplitude alpha = <a>/sqrt(N) plus the
// per-group spin expectation values.
struct EnsembleState {
    cplx alpha{0.0, 0.0};
    std::vector<SpinGroup> groups;
};

// All spins at the south pole (z = -1/2, s = 0), empty cavity.
EnsembleState ground_state(const EnsembleGrid& grid);

// Checks weight normalization and the Bloch-vector length bound
// |s|^2 + z^2 <= 1/4 + 1e-9 per group. Throws DomainError on violation.
void validate(const EnsembleState& state);

// Largest per-group deviation |(|s|^2 + z^2) - 1/4|; the gamma = 0 dynamics
// conserve the spin length, so this measures integrator drift.
double max_spin_length_defect(const EnsembleState& state);

// 2 * sum(w eta^2 z) / sum(w eta^2), i.e. J~z normalized to N/2.
// Throws GridError when sum(w eta^2) = 0 (degenerate grid).
double weighted_inversion(const EnsembleState& state);

// sum(w eta s): the radiating collective dipole per atom, <J~^-> / N.
cplx weighted_dipole(const EnsembleState& state);

// T = |alpha sqrt(N)|^2 / |omega_d / (2 g_rms)|^2: intracavity power
// normalized to the resonant empty-cavity value at the same drive.
// Throws DomainError when omega_d = 0 (normalization undefined).
double transmission_fraction(cplx alpha, double omega_d, const PhysicalParams& p);

struct Observables {
    double j_z_weighted = 0.0;   // J~z / (N/2)
    cplx j_minus_weighted{0, 0}; // sum(w eta s) = <J~^->/N
    double transmission = 0.0;   // fractional transmission T
    cplx omega_sr{0, 0};         // i * Gamma * <J~^-> = i * (4g^2/kappa) * N * j_minus_weighted
};

// Extracts all observables. omega_d_target is the drive used for the
// transmission normalization (the protocol's target value); when it is zero
// the transmission column is reported as 0 instead of failing, so that
// zero-drive traces still produce well-formed output.
Observables observables(const EnsembleState& state, const PhysicalParams& p,
                        double omega_d_target);

} // namespace crf
