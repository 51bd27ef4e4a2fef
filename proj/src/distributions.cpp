#include "crf/distributions.hpp"

#include <cmath>

#include "crf/errors.hpp"

namespace crf {

std::vector<CouplingNode> coupling_grid(int n_phi) {
    if (n_phi < 2) throw GridError("coupling_grid: n_phi must be >= 2");
    if (n_phi == 2)
        throw GridError(
            "coupling_grid: n_phi = 2 breaks the r.m.s. normalization "
            "(sum w eta^2 = 2, not 1); use n_phi >= 3");
    std::vector<CouplingNode> nodes(static_cast<std::size_t>(n_phi));
    const double w = 1.0 / n_phi;
    for (int j = 1; j <= n_phi; ++j) {
        const double phi = two_pi * j / n_phi;
        nodes[static_cast<std::size_t>(j - 1)] = {std::sqrt(2.0) * std::cos(phi), w};
    }
    return nodes;
}

BroadeningResult broadening_nodes(int n_delta, double trap_depth_ratio, double delta_max) {
    if (n_delta < 1) throw GridError("broadening_nodes: n_delta must be >= 1");
    if (!(trap_depth_ratio > 0.0)) throw DomainError("broadening_nodes: trap_depth_ratio must be > 0");
    if (delta_max < 0.0) throw DomainError("broadening_nodes: delta_max must be >= 0");
    BroadeningResult out;
    out.nodes.resize(static_cast<std::size_t>(n_delta));
    const double r = trap_depth_ratio;
    const double w = 1.0 / n_delta;
    for (int i = 1; i <= n_delta; ++i) {
        const double q = (i - 0.5) / n_delta; // midpoint rule in CDF space
        out.nodes[static_cast<std::size_t>(i - 1)] = {delta_max * std::pow(q, 1.0 / r), w};
    }
    out.mean = delta_max * r / (r + 1.0);
    out.std_dev = delta_max * std::sqrt(r / (r + 2.0)) / (r + 1.0);
    return out;
}

EnsembleGrid ensemble_grid(int n_phi, int n_delta, const PhysicalParams& p) {
    validate(p);
    const auto etas = coupling_grid(n_phi);
    const auto broad = broadening_nodes(n_delta, p.trap_depth_ratio, p.delta_max);

    EnsembleGrid grid;
    grid.nodes.reserve(etas.size() * broad.nodes.size());
    // Center on the grid mean (not the analytic mean) so the centering
    // invariant holds to rounding at any n_delta.
    double mean = 0.0;
    for (const auto& b : broad.nodes) mean += b.weight * b.delta;
    grid.mean_delta = mean;
    grid.std_delta = broad.std_dev;
    for (const auto& e : etas)
        for (const auto& b : broad.nodes)
            grid.nodes.push_back({e.eta, b.delta - mean, e.weight * b.weight});
    return grid;
}

double coupling_norm(const EnsembleGrid& grid) {
    double s = 0.0;
    for (const auto& n : grid.nodes) s += n.weight * n.eta * n.eta;
    return s;
}

void validate(const EnsembleGrid& grid, double delta_max) {
    if (grid.nodes.empty()) throw GridError("empty ensemble grid");
    double wsum = 0.0, dsum = 0.0;
    for (const auto& n : grid.nodes) {
        wsum += n.weight;
        dsum += n.weight * n.delta_centered;
    }
    if (std::abs(wsum - 1.0) > 1e-12) throw GridError("grid weights do not sum to 1");
    if (std::abs(coupling_norm(grid) - 1.0) > 1e-3)
        throw GridError("grid r.m.s. coupling normalization violated");
    const double scale = delta_max > 0.0 ? delta_max : 1.0;
    if (std::abs(dsum) > 1e-9 * scale) throw GridError("grid detunings are not centered");
}

} // namespace crf
