#include "crf/state.hpp"

#include <cmath>

#include "crf/errors.hpp"

namespace crf {

EnsembleState ground_state(const EnsembleGrid& grid) {
    EnsembleState st;
    st.alpha = {0.0, 0.0};
    st.groups.reserve(grid.nodes.size());
    for (const auto& n : grid.nodes)
        st.groups.push_back({n.eta, n.delta_centered, n.weight, {0.0, 0.0}, -0.5});
    return st;
}

void validate(const EnsembleState& state) {
    if (state.groups.empty()) throw DomainError("ensemble state has no spin groups");
    double wsum = 0.0;
    for (const auto& g : state.groups) {
        wsum += g.weight;
        const double len2 = std::norm(g.s) + g.z * g.z;
        if (len2 > 0.25 + 1e-9) throw DomainError("Bloch-vector length bound violated");
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw DomainError("group weights do not sum to 1");
}

double max_spin_length_defect(const EnsembleState& state) {
    double worst = 0.0;
    for (const auto& g : state.groups)
        worst = std::max(worst, std::abs(std::norm(g.s) + g.z * g.z - 0.25));
    return worst;
}

double weighted_inversion(const EnsembleState& state) {
    double num = 0.0, den = 0.0;
    for (const auto& g : state.groups) {
        const double we2 = g.weight * g.eta * g.eta;
        num += we2 * g.z;
        den += we2;
    }
    if (den <= 0.0) throw GridError("weighted_inversion: sum w eta^2 = 0 (degenerate grid)");
    return 2.0 * num / den;
}

cplx weighted_dipole(const EnsembleState& state) {
    cplx acc{0.0, 0.0};
    for (const auto& g : state.groups) acc += g.weight * g.eta * g.s;
    return acc;
}

double transmission_fraction(cplx alpha, double omega_d, const PhysicalParams& p) {
    if (!(omega_d > 0.0))
        throw DomainError("transmission_fraction: omega_d = 0 has no empty-cavity normalization");
    const double field = std::abs(alpha) * std::sqrt(p.n_atoms);
    const double empty = omega_d / (2.0 * p.g_rms);
    const double ratio = field / empty;
    return ratio * ratio;
}

Observables observables(const EnsembleState& state, const PhysicalParams& p,
                        double omega_d_target) {
    Observables obs;
    obs.j_z_weighted = weighted_inversion(state);
    obs.j_minus_weighted = weighted_dipole(state);
    obs.transmission = omega_d_target > 0.0
                           ? transmission_fraction(state.alpha, omega_d_target, p)
                           : 0.0;
    const double gamma_col = 4.0 * p.g_rms * p.g_rms / p.kappa;
    obs.omega_sr = cplx(0.0, 1.0) * gamma_col * p.n_atoms * obs.j_minus_weighted;
    return obs;
}

} // namespace crf
