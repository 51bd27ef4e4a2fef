#include "crf/longtime.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "crf/errors.hpp"
#include "crf/ode.hpp"
#include "crf/roots.hpp"
#include "crf/state.hpp"

namespace crf {

cplx remnant_field(const EnsembleState& state, const PhysicalParams& p) {
    const double jz = weighted_inversion(state);
    if (jz == 0.0)
        throw SingularDriftError(
            "remnant_field: weighted inversion is zero (normal phase)");
    // written as (γ + 2iδ̃) so the γ→0 limit stays finite
    cplx coherence{0.0, 0.0};
    for (const SpinGroup& grp : state.groups)
        coherence += grp.weight * grp.eta * cplx(p.gamma, 2.0 * grp.delta) * grp.s;
    return coherence /
           (cplx(0.0, 2.0) * p.g_rms * std::sqrt(p.n_atoms) * jz);
}

double drift_rhs(const DriftState& state, const PhysicalParams& p) {
    if (state.u == 0.0)
        throw SingularDriftError("drift_rhs: u = 0 is singular");
    if (!(state.u < 0.0)) throw DomainError("drift_rhs: u must be negative");
    const double r2 = state.r * state.r;
    return -p.gamma * (r2 / (2.0 * state.u) + state.u + 1.0);
}

std::optional<double> drift_fixed_point(double r) {
    if (!(r >= 0.0)) throw DomainError("drift_fixed_point: r must be >= 0");
    const double disc = 1.0 - 2.0 * r * r;
    if (disc < 0.0) return std::nullopt;
    return -0.5 * (1.0 + std::sqrt(disc));
}

double equilibration_time(double r) {
    const double r_c = 1.0 / std::numbers::sqrt2;
    if (!(r > r_c && r < 1.0))
        throw DomainError("equilibration_time: defined only on (1/sqrt(2), 1)");
    const double r2 = r * r;
    const double root = std::sqrt(1.0 - r2);
    const double s = std::sqrt(2.0 * r2 - 1.0);
    const double closed = 0.5 * std::log((2.0 - r2 - 2.0 * root) / r2) +
                          (std::atan((2.0 * root - 1.0) / s) + std::atan(1.0 / s)) / s;

    // independent check: integrate du/(du/dt) from the post-transient branch
    // value up to the escape at u=0
    const double u0 = -root;
    const double quad = gauss_legendre_integrate(
        [&](double u) { return -2.0 * u / (2.0 * u * u + 2.0 * u + r2); }, u0, 0.0,
        2048);
    if (std::abs(closed - quad) > 0.005 * std::abs(closed))
        throw ConvergenceError(
            "equilibration_time: closed form and quadrature disagree");
    return closed;
}

DriftTrajectory integrate_drift(double u0, double r, double gamma,
                                const std::vector<double>& t_samples) {
    if (t_samples.size() < 2)
        throw DomainError("integrate_drift: need at least two sample times");
    if (!(u0 < 0.0)) throw DomainError("integrate_drift: u0 must be negative");
    if (!(gamma > 0.0)) throw DomainError("integrate_drift: gamma must be positive");

    PhysicalParams p;  // only gamma enters the drift equation
    p.gamma = gamma;
    // Trial stages of a large step may probe past the escape at u = 0; a
    // non-finite slope there makes the controller reject and shrink instead
    // of aborting, so a genuine escape shows up as step-size collapse.
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        if (!(y[0] < -1e-12)) {  // also catches NaN from a rejected stage
            dy[0] = std::numeric_limits<double>::quiet_NaN();
            return;
        }
        dy[0] = drift_rhs({y[0], r}, p);
    };

    DriftTrajectory traj;
    auto on_sample = [&](std::size_t, double t, const std::vector<double>& yt) {
        traj.times.push_back(t);
        traj.u.push_back(yt[0]);
    };
    std::vector<double> y = {u0};
    try {
        integrate_dopri5(rhs, t_samples.front(), t_samples.back(), y, t_samples,
                         on_sample, {});
    } catch (const StiffnessError&) {
        // escape to the normal phase: trajectory is truncated at the crossing
    }
    return traj;
}

} // namespace crf
