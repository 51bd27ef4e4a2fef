#include "crf/steady_state.hpp"

#include <cmath>
#include <numbers>

#include "crf/dynamics.hpp"
#include "crf/errors.hpp"
#include "crf/roots.hpp"

namespace crf {

namespace {

struct BranchMax {
    double arg;
    double value;
};

// first maximum of √2·J₁ — critical drive of the lossless cosine-coupled branch
const BranchMax& ideal_inhomog_max() {
    static const BranchMax m = [] {
        const double x = golden_max([](double v) { return bessel_j(1, v); }, 0.5, 3.0);
        return BranchMax{x, std::numbers::sqrt2 * bessel_j(1, x)};
    }();
    return m;
}

double se_inhomog_lhs(double beta) {
    if (beta <= 0.0) return 0.0;
    return (std::numbers::sqrt2 / beta) *
           (1.0 - 1.0 / std::sqrt(1.0 + 2.0 * beta * beta));
}

const BranchMax& se_inhomog_max() {
    static const BranchMax m = [] {
        const double b = golden_max(se_inhomog_lhs, 1e-6, 5.0);
        return BranchMax{b, se_inhomog_lhs(b)};
    }();
    return m;
}

// per-coupling inversion average for the se cosine-coupled branch, by
// periodic trapezoid quadrature doubled to 1e-10
double se_inhomog_jz(double beta) {
    const double b2 = 2.0 * beta * beta;
    auto average = [&](int n) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            const double phi = 2.0 * std::numbers::pi * i / n;
            const double c2 = std::cos(phi) * std::cos(phi);
            acc += 2.0 * c2 / (1.0 + b2 * c2);
        }
        return -acc / n;
    };
    int n = 64;
    double prev = average(n);
    for (int iter = 0; iter < 20; ++iter) {
        n *= 2;
        const double cur = average(n);
        if (std::abs(cur - prev) < 1e-10) return cur;
        prev = cur;
    }
    throw ConvergenceError("se_inhomog_jz: quadrature did not converge");
}

// grid sum S(u) of the broadened field equation (see header)
cplx broadened_sum(double u, const EnsembleGrid& grid, double gamma) {
    cplx acc{0.0, 0.0};
    for (const GridNode& node : grid.nodes) {
        const double e2 = node.eta * node.eta;
        const double d = 2.0 * node.delta_centered / gamma;
        const cplx line{1.0, d};
        const double sat = 1.0 + e2 * u * u / (1.0 + d * d);
        acc += node.weight * e2 / (line * sat);
    }
    return acc;
}

void check_r(double r, const char* who) {
    if (!(r >= 0.0)) throw DomainError(std::string(who) + ": drive ratio must be >= 0");
}

} // namespace

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::IdealHomog: return "ideal_homog";
        case Regime::IdealInhomog: return "ideal_inhomog";
        case Regime::SeHomog: return "se_homog";
        case Regime::SeInhomog: return "se_inhomog";
        case Regime::SeBroadened: return "se_broadened";
    }
    throw DomainError("to_string: unknown regime");
}

double bessel_j(int order, double x) {
    if (order < 0 || order > 2)
        throw DomainError("bessel_j: order must be 0, 1 or 2");
    if (!(std::abs(x) < 1e4))
        throw DomainError("bessel_j: |x| must be below 1e4");
    const double ax = std::abs(x);
    const double v = std::cyl_bessel_j(static_cast<double>(order), ax);
    // J_n(−x) = (−1)^n J_n(x)
    return (x < 0.0 && order % 2 == 1) ? -v : v;
}

SteadyStateSolution ss_ideal_homog(double r, const PhysicalParams& p) {
    check_r(r, "ss_ideal_homog");
    SteadyStateSolution sol;
    sol.regime = Regime::IdealHomog;
    if (r > 1.0) return sol;
    sol.exists = true;
    sol.j_z_weighted = -std::sqrt(1.0 - r * r);
    sol.q_ss = std::asin(r) / (p.g_rms * std::sqrt(p.n_atoms));
    return sol;
}

SteadyStateSolution ss_ideal_inhomog(double r, const PhysicalParams& p) {
    check_r(r, "ss_ideal_inhomog");
    SteadyStateSolution sol;
    sol.regime = Regime::IdealInhomog;
    const BranchMax& m = ideal_inhomog_max();
    if (r > m.value * (1.0 + 1e-12)) return sol;
    sol.exists = true;
    double x = 0.0;
    if (r > 0.0) {
        const double target = r / std::numbers::sqrt2;
        x = (r >= m.value)
                ? m.arg
                : brent_root([&](double v) { return bessel_j(1, v) - target; }, 0.0,
                             m.arg);
    }
    sol.q_ss = x / (std::numbers::sqrt2 * p.g_rms * std::sqrt(p.n_atoms));
    sol.j_z_weighted = -(bessel_j(0, x) - bessel_j(2, x));
    return sol;
}

SteadyStateSolution ss_se_homog(double r) {
    check_r(r, "ss_se_homog");
    SteadyStateSolution sol;
    sol.regime = Regime::SeHomog;
    const double disc = 1.0 - 2.0 * r * r;
    if (disc < -1e-12) return sol;
    const double root = std::sqrt(std::max(disc, 0.0));
    sol.exists = true;
    sol.beta = cplx(r > 0.0 ? (1.0 - root) / (std::numbers::sqrt2 * r) : 0.0, 0.0);
    sol.j_z_weighted = -0.5 * (1.0 + root);
    return sol;
}

SteadyStateSolution ss_se_inhomog(double r) {
    check_r(r, "ss_se_inhomog");
    SteadyStateSolution sol;
    sol.regime = Regime::SeInhomog;
    const BranchMax& m = se_inhomog_max();
    if (r > m.value * (1.0 + 1e-12)) return sol;
    sol.exists = true;
    if (r == 0.0) {
        sol.beta = cplx(0.0, 0.0);
        sol.j_z_weighted = -1.0;
        return sol;
    }
    const double beta =
        (r >= m.value) ? m.arg
                       : brent_root([&](double b) { return se_inhomog_lhs(b) - r; },
                                    0.0, m.arg);
    sol.beta = cplx(beta, 0.0);
    sol.j_z_weighted = se_inhomog_jz(beta);
    return sol;
}

SteadyStateSolution ss_broadened(double r, const EnsembleGrid& grid,
                                 const PhysicalParams& p,
                                 bool include_kappa_gamma_term) {
    check_r(r, "ss_broadened");
    validate(p);
    if (!(p.gamma > 0.0))
        throw DomainError("ss_broadened: needs gamma > 0 (use the ideal regimes)");
    const double c = include_kappa_gamma_term
                         ? p.kappa * p.gamma / (4.0 * p.g_rms * p.g_rms * p.n_atoms)
                         : 0.0;
    auto drive_of_u = [&](double u) {
        return std::numbers::sqrt2 * u * std::abs(broadened_sum(u, grid, p.gamma) + c);
    };
    const double u_peak = golden_max(drive_of_u, 1e-9, 50.0);
    const double r_max = drive_of_u(u_peak);

    SteadyStateSolution sol;
    sol.regime = Regime::SeBroadened;
    if (r > r_max * (1.0 + 1e-12)) return sol;
    sol.exists = true;
    if (r == 0.0) {
        sol.beta = cplx(0.0, 0.0);
        sol.j_z_weighted = -1.0;
        return sol;
    }
    const double u = (r >= r_max)
                         ? u_peak
                         : brent_root([&](double v) { return drive_of_u(v) - r; },
                                      0.0, u_peak);
    const cplx sum = broadened_sum(u, grid, p.gamma) + c;
    // the drive phase reference makes r real positive; β carries the
    // compensating phase
    sol.beta = u * std::exp(cplx(0.0, -std::arg(sum)));

    double num = 0.0, den = 0.0;
    for (const GridNode& node : grid.nodes) {
        const double e2 = node.eta * node.eta;
        const double d = 2.0 * node.delta_centered / p.gamma;
        const double z = -0.5 / (1.0 + e2 * u * u / (1.0 + d * d));
        num += node.weight * e2 * 2.0 * z;
        den += node.weight * e2;
    }
    sol.j_z_weighted = num / den;
    return sol;
}

EnsembleState embed_steady_state(const SteadyStateSolution& sol,
                                 const EnsembleGrid& grid, const PhysicalParams& p) {
    if (!sol.exists)
        throw DomainError("embed_steady_state: solution does not exist");
    const double sqrt_n = std::sqrt(p.n_atoms);
    EnsembleState state = ground_state(grid);
    const bool ideal =
        sol.regime == Regime::IdealHomog || sol.regime == Regime::IdealInhomog;
    if (ideal) {
        const double q = sol.q_ss.value();
        for (SpinGroup& grp : state.groups) {
            const double theta = grp.eta * p.g_rms * sqrt_n * q;
            grp.s = cplx(0.0, -0.5 * std::sin(theta));
            grp.z = -0.5 * std::cos(theta);
        }
        state.alpha = {0.0, 0.0};
        return state;
    }
    if (!(p.gamma > 0.0))
        throw DomainError("embed_steady_state: se regime needs gamma > 0");
    const cplx beta = sol.beta.value();
    const cplx alpha =
        beta * p.gamma / (2.0 * std::numbers::sqrt2 * p.g_rms * sqrt_n);
    const double alpha2 = std::norm(alpha);
    for (SpinGroup& grp : state.groups) {
        const double ck = p.g_rms * grp.eta * sqrt_n;
        const double line = 0.25 * p.gamma * p.gamma + grp.delta * grp.delta;
        grp.z = -0.5 / (1.0 + 2.0 * ck * ck * alpha2 / line);
        grp.s = 2.0 * cplx(0.0, 1.0) * ck * alpha * grp.z /
                cplx(0.5 * p.gamma, grp.delta);
    }
    state.alpha = alpha;
    return state;
}

CriticalDrive critical_drive(Regime regime, const EnsembleGrid* grid,
                             const PhysicalParams* p) {
    CriticalDrive crit;
    crit.regime = regime;
    switch (regime) {
        case Regime::IdealHomog: {
            const double x = golden_max([](double v) { return std::sin(v); }, 0.0,
                                        std::numbers::pi);
            crit.value = std::sin(x);
            return crit;
        }
        case Regime::IdealInhomog:
            crit.value = ideal_inhomog_max().value;
            return crit;
        case Regime::SeHomog: {
            const double b = golden_max(
                [](double v) { return std::numbers::sqrt2 * v / (1.0 + v * v); }, 0.0,
                10.0);
            crit.value = std::numbers::sqrt2 * b / (1.0 + b * b);
            return crit;
        }
        case Regime::SeInhomog:
            crit.value = se_inhomog_max().value;
            return crit;
        case Regime::SeBroadened: {
            if (grid == nullptr || p == nullptr)
                throw DomainError(
                    "critical_drive: broadened regime needs grid and params");
            if (!(p->gamma > 0.0))
                throw DomainError("critical_drive: broadened regime needs gamma > 0");
            auto drive_of_u = [&](double u) {
                return std::numbers::sqrt2 * u *
                       std::abs(broadened_sum(u, *grid, p->gamma));
            };
            const double u = golden_max(drive_of_u, 1e-9, 50.0);
            crit.value = drive_of_u(u);
            return crit;
        }
    }
    throw DomainError("critical_drive: unknown regime");
}

double dynamic_critical(const PhysicalParams& p, const EnsembleGrid& grid,
                        const DynamicCriticalOptions& opt) {
    validate(p);
    const double omega_c_h = derive_params(p).omega_c_h;
    DriveProtocol proto;
    proto.shape = DriveShape::Ramp;
    proto.t_ramp = opt.t_ramp;
    proto.t_hold = opt.t_hold;

    IntegrateOptions iopt;
    iopt.mode = opt.mode;
    iopt.keep_states = false;
    const std::vector<double> t_end = {opt.t_hold};
    const EnsembleState initial = ground_state(grid);

    auto end_jz = [&](double r) {
        DriveProtocol pr = proto;
        pr.omega_d = r * omega_c_h;
        const Trajectory traj = integrate(initial, p, pr, t_end, iopt);
        return traj.observables.back().j_z_weighted;
    };

    // march to the first upward zero crossing of the end-of-hold inversion;
    // beyond the transition the endpoint oscillates, so the FIRST crossing is
    // the threshold
    double r_lo = opt.r_start;
    double f_lo = end_jz(r_lo);
    while (f_lo > 0.0) {
        if (r_lo <= opt.r_step)
            throw ConvergenceError("dynamic_critical: inversion positive at r -> 0");
        r_lo -= opt.r_step;
        f_lo = end_jz(r_lo);
    }
    double r_hi = r_lo;
    double f_hi = f_lo;
    while (f_hi <= 0.0) {
        r_lo = r_hi;
        f_lo = f_hi;
        r_hi += opt.r_step;
        if (r_hi > opt.r_max)
            throw ConvergenceError("dynamic_critical: no zero crossing below r_max");
        f_hi = end_jz(r_hi);
    }
    for (int i = 0; i < opt.bisect_iters; ++i) {
        const double mid = 0.5 * (r_lo + r_hi);
        if (end_jz(mid) <= 0.0)
            r_lo = mid;
        else
            r_hi = mid;
    }
    return 0.5 * (r_lo + r_hi);
}

std::vector<CriticalTableRow> critical_table(const PhysicalParams& p,
                                             const EnsembleGrid& grid,
                                             bool include_dynamic,
                                             const DynamicCriticalOptions& dyn) {
    std::vector<CriticalTableRow> rows;
    rows.push_back({"ideal, uniform coupling",
                    critical_drive(Regime::IdealHomog).value, 1.0});
    rows.push_back({"ideal, cosine coupling",
                    critical_drive(Regime::IdealInhomog).value, 0.82});
    if (include_dynamic)
        rows.push_back({"ramp-and-hold, full model", dynamic_critical(p, grid, dyn),
                        0.70});
    rows.push_back({"spont. emission, uniform coupling",
                    critical_drive(Regime::SeHomog).value, 0.71});
    rows.push_back({"spont. emission, cosine coupling",
                    critical_drive(Regime::SeInhomog).value, 0.60});
    if (p.gamma > 0.0)
        rows.push_back({"spont. emission + broadening",
                        critical_drive(Regime::SeBroadened, &grid, &p).value, 0.26});
    return rows;
}

} // namespace crf
