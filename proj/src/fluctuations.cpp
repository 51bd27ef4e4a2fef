#include "crf/fluctuations.hpp"

#include <cmath>

#include "crf/errors.hpp"

namespace crf {

BlochAngle mean_field_angle(double r) {
    if (!(r >= 0.0 && r <= 1.0))
        throw DomainError("mean_field_angle: no steady state for r outside [0, 1]");
    BlochAngle angle;
    angle.theta = std::asin(r);
    angle.j_y = r;
    angle.j_z = -std::sqrt(1.0 - r * r);
    return angle;
}

double hp_squeezing(double r, double n_atoms) {
    if (!(r >= 0.0 && r < 1.0))
        throw DomainError(
            "hp_squeezing: linearized variance only valid for 0 <= r < 1");
    if (!(n_atoms >= 1.0)) throw DomainError("hp_squeezing: need at least one atom");
    return 0.25 * n_atoms * std::sqrt(1.0 - r * r);
}

std::pair<cplx, cplx> quench_eigenvalues(double j_z_weighted,
                                         const PhysicalParams& p) {
    const double radicand =
        2.0 * p.g_rms * p.g_rms * (p.n_atoms * std::abs(j_z_weighted) / 2.0) -
        p.kappa * p.kappa / 16.0;
    const double re = -0.25 * p.kappa;
    if (radicand >= 0.0) {
        const double im = std::sqrt(radicand);
        return {cplx(re, im), cplx(re, -im)};
    }
    const double shift = std::sqrt(-radicand);
    return {cplx(re + shift, 0.0), cplx(re - shift, 0.0)};
}

} // namespace crf
