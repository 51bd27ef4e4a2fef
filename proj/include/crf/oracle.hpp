#pragma once
#include <Eigen/Dense>

#include "crf/params.hpp"
#include "crf/state.hpp"

namespace crf {

// Collective spin-J = N/2 operators, dense, ground state FIRST (basis index
// i corresponds to m = i − N/2, so index 0 is the south pole). For N=1 this
// makes j_minus = [[0,1],[0,0]].
struct DickeOperators {
    int dimension = 0;  // N+1
    Eigen::MatrixXcd j_minus, j_plus, j_z, j_x;
};

DickeOperators dicke_operators(int n_atoms);

struct DensityMatrix {
    int dimension = 0;
    Eigen::MatrixXcd rho;
};

struct DensityDiagnostics {
    double hermiticity_defect = 0.0;  // max |ρ − ρ†| elementwise
    double trace_defect = 0.0;        // |tr ρ − 1|
    double min_eigenvalue = 0.0;
};

DensityDiagnostics check_density_matrix(const DensityMatrix& dm);

// ½‖ρ_a − ρ_b‖₁
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Exact steady state of the collective-emission model with drive ratio
// r = Ω_d/Ω_c^h: ρ ∝ (Ĵ⁻ + iλ)⁻¹ (Ĵ⁺ − iλ)⁻¹ with λ = Ω_d/Γ = rN/2.
// Evaluated by two linear solves, Hermitized, trace-normalized.
struct CrfSolution {
    DensityMatrix rho;
    double jz_norm = 0.0;      // 2⟨Ĵz⟩/N
    cplx j_minus_exp{0., 0.};  // ⟨Ĵ⁻⟩
    double jx2 = 0.0;          // ⟨Ĵx²⟩
    double rcond = 0.0;        // reciprocal condition estimate of the solve
};

CrfSolution crf_exact_steady_state(int n_atoms, double r);

// ‖dρ/dt‖_F/‖ρ‖_F under the collective-emission generator
//   dρ/dt = −i(Ω_d/2)[Ĵ⁺+Ĵ⁻, ρ] + Γ D[Ĵ⁻]ρ,  Γ = 1, Ω_d = λ = rN/2.
// The defining residual oracle for crf_exact_steady_state.
double crf_generator_residual(int n_atoms, double r, const DensityMatrix& dm);

// Brute-force steady state of the driven lossy cavity + N atoms:
//   H = Δ_ca â†â + g Σ_k(â σ̂⁺_k + â† σ̂⁻_k) + iE(â† − â),  E = κΩ_d/(4 g_rms)
// with jump operators √κ·â and (when γ>0) √γ·σ̂⁻_k. γ=0 keeps the dynamics
// inside the symmetric Dicke sector of dimension N+1; γ>0 needs the full
// 2^N product space. Basis index is atom_state·(n_max+1) + photon_number.
// The steady state is the null eigenvector of the dense superoperator.
struct LiouvillianSolution {
    DensityMatrix rho_full;
    DensityMatrix rho_atoms;  // photons traced out
    DensityMatrix rho_field;  // atoms traced out
    cplx a_exp{0., 0.};
    double jz_norm = 0.0;  // 2⟨Ĵz⟩/N
    double top_fock_population = 0.0;
    double null_eigenvalue_mag = 0.0;  // |λ₀| relative check value
};

LiouvillianSolution liouvillian_steady_state(int n_atoms, int n_max_photons,
                                             const PhysicalParams& p,
                                             double omega_d);

// Normal-phase (r>1) mean-field trajectory distribution on the Bloch sphere:
//   P(θ,φ) ∝ |sinθ e^{iφ} + i r|^{−2}
// normalized against the measure sinθ dθ dφ.
struct SphericalDistribution {
    double r = 0.0;
    double normalization = 1.0;  // ∫ p sinθ dθ dφ before normalizing
    double operator()(double theta, double phi) const;
};

SphericalDistribution normal_phase_distribution(double r, int n_quad = 128);

struct NormalMoments {
    double jz_norm = 0.0;          // ⟨Ĵz⟩/(N/2) = −⟨cosθ⟩
    double jminus_sq_norm = 0.0;   // ⟨|Ĵ⁻|²⟩/(N/2)² = ⟨sin²θ⟩
    double normalization_check = 0.0;  // ∫P sinθ dθ dφ, should be 1
};

NormalMoments normal_phase_moments(double r, int n_quad = 128);

} // namespace crf
