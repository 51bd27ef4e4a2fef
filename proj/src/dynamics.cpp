#include "crf/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "crf/errors.hpp"
#include "crf/ode.hpp"

namespace crf {

namespace {

// Flat layout for the full model: [Re α, Im α, Re s_0.., Im s_0.., z_0..].
struct FullModel {
    double kappa = 0.0;
    double gamma = 0.0;
    double delta_ca = 0.0;
    double sqrt_n = 0.0;
    double drive_coef = 0.0;  // κ/(4 g_rms √N): field fill rate per unit Ω_d
    std::vector<double> c;    // g_k √N
    std::vector<double> wg;   // w_k g_k, weights of the field-feeding sum
    std::vector<double> delta;
    DriveProtocol proto;
    ExecMode mode = ExecMode::Auto;

    FullModel(const EnsembleState& state, const PhysicalParams& p,
              const DriveProtocol& pr, ExecMode m)
        : kappa(p.kappa), gamma(p.gamma), delta_ca(p.delta_ca),
          sqrt_n(std::sqrt(p.n_atoms)), proto(pr), mode(m) {
        drive_coef = kappa / (4.0 * p.g_rms * sqrt_n);
        const std::size_t k = state.groups.size();
        c.resize(k);
        wg.resize(k);
        delta.resize(k);
        for (std::size_t i = 0; i < k; ++i) {
            const SpinGroup& grp = state.groups[i];
            c[i] = p.g_rms * grp.eta * sqrt_n;
            wg[i] = grp.weight * p.g_rms * grp.eta;
            delta[i] = grp.delta;
        }
    }

    std::size_t dim() const { return 2 + 3 * c.size(); }

    void operator()(double t, const std::vector<double>& y,
                    std::vector<double>& dy) const {
        const std::size_t k = c.size();
        const double ar = y[0], ai = y[1];
        const double* sr = y.data() + 2;
        const double* si = sr + k;
        const double* z = si + k;
        double field_r = 0.0, field_i = 0.0;  // Σ w_k g_k s_k
        blocked_sum2(
            k,
            [&](std::size_t i, double& pa, double& pb) {
                pa += wg[i] * sr[i];
                pb += wg[i] * si[i];
            },
            field_r, field_i, mode);
        const double drive = drive_coef * drive_amplitude(proto, t);
        dy[0] = -0.5 * kappa * ar + delta_ca * ai + sqrt_n * field_i + drive;
        dy[1] = -0.5 * kappa * ai - delta_ca * ar - sqrt_n * field_r;
        double* dsr = dy.data() + 2;
        double* dsi = dsr + k;
        double* dz = dsi + k;
        parallel_for(
            k,
            [&](std::size_t i) {
                const double ck = c[i];
                dsr[i] = -2.0 * ck * z[i] * ai - 0.5 * gamma * sr[i] + delta[i] * si[i];
                dsi[i] = 2.0 * ck * z[i] * ar - 0.5 * gamma * si[i] - delta[i] * sr[i];
                dz[i] = 2.0 * ck * (ai * sr[i] - ar * si[i]) - gamma * (z[i] + 0.5);
            },
            mode);
    }
};

std::vector<double> flatten(const EnsembleState& state) {
    const std::size_t k = state.groups.size();
    std::vector<double> y(2 + 3 * k);
    y[0] = state.alpha.real();
    y[1] = state.alpha.imag();
    for (std::size_t i = 0; i < k; ++i) {
        y[2 + i] = state.groups[i].s.real();
        y[2 + k + i] = state.groups[i].s.imag();
        y[2 + 2 * k + i] = state.groups[i].z;
    }
    return y;
}

void unflatten(const std::vector<double>& y, EnsembleState& state) {
    const std::size_t k = state.groups.size();
    state.alpha = {y[0], y[1]};
    for (std::size_t i = 0; i < k; ++i) {
        state.groups[i].s = {y[2 + i], y[2 + k + i]};
        state.groups[i].z = y[2 + 2 * k + i];
    }
}

} // namespace

EnsembleState rhs_full(const EnsembleState& state, double t, const PhysicalParams& p,
                       const DriveProtocol& proto, ExecMode mode) {
    FullModel model(state, p, proto, mode);
    std::vector<double> y = flatten(state);
    std::vector<double> dy(y.size());
    model(t, y, dy);
    EnsembleState deriv = state;
    unflatten(dy, deriv);
    return deriv;
}

Trajectory integrate(const EnsembleState& initial, const PhysicalParams& p,
                     const DriveProtocol& proto, const std::vector<double>& t_samples,
                     const IntegrateOptions& opt) {
    validate(p);
    validate(proto);
    validate(initial);
    if (t_samples.empty()) throw DomainError("integrate: no sample times given");
    for (std::size_t i = 0; i < t_samples.size(); ++i) {
        if (!(t_samples[i] >= 0.0 && t_samples[i] <= proto.t_hold))
            throw DomainError("integrate: sample time outside [0, t_hold]");
        if (i > 0 && !(t_samples[i] > t_samples[i - 1]))
            throw DomainError("integrate: sample times must be strictly increasing");
    }

    FullModel model(initial, p, proto, opt.mode);
    std::vector<double> y = flatten(initial);

    Trajectory traj;
    traj.times.reserve(t_samples.size());
    traj.observables.reserve(t_samples.size());
    if (opt.keep_states) traj.states.reserve(t_samples.size());

    EnsembleState scratch = initial;
    auto on_sample = [&](std::size_t, double t, const std::vector<double>& yt) {
        unflatten(yt, scratch);
        traj.times.push_back(t);
        traj.observables.push_back(
            observables(scratch, p, drive_amplitude(proto, t)));
        if (opt.keep_states) traj.states.push_back(scratch);
    };

    OdeOptions ode_opt;
    ode_opt.rtol = opt.rtol;
    ode_opt.atol = opt.atol;
    ode_opt.max_steps = opt.max_steps;

    // split at the ramp kink so each segment has a smooth right-hand side
    const bool split = proto.shape == DriveShape::Ramp && proto.t_ramp > 0.0 &&
                       proto.t_ramp < proto.t_hold;
    if (!split) {
        integrate_dopri5(model, 0.0, proto.t_hold, y, t_samples, on_sample, ode_opt);
        return traj;
    }
    std::vector<double> first, second;
    for (double ts : t_samples)
        (ts <= proto.t_ramp ? first : second).push_back(ts);
    std::size_t offset = first.size();
    integrate_dopri5(model, 0.0, proto.t_ramp, y, first, on_sample, ode_opt);
    auto shifted = [&](std::size_t i, double t, const std::vector<double>& yt) {
        on_sample(offset + i, t, yt);
    };
    integrate_dopri5(model, proto.t_ramp, proto.t_hold, y, second, shifted, ode_opt);
    return traj;
}

CrfReducedDeriv rhs_crf_reduced(cplx j_minus, double j_z, double omega_d,
                                double gamma_collective) {
    CrfReducedDeriv d;
    d.dj_minus = cplx(0.0, omega_d) * j_z + gamma_collective * j_z * j_minus;
    d.dj_z = -omega_d * j_minus.imag() - gamma_collective * std::norm(j_minus);
    return d;
}

CrfReducedTrajectory integrate_crf_reduced(cplx j_minus0, double j_z0,
                                           double omega_d, double gamma_collective,
                                           const std::vector<double>& t_samples,
                                           const IntegrateOptions& opt) {
    if (t_samples.empty())
        throw DomainError("integrate_crf_reduced: no sample times given");
    auto rhs = [&](double, const std::vector<double>& y, std::vector<double>& dy) {
        const CrfReducedDeriv d =
            rhs_crf_reduced({y[0], y[1]}, y[2], omega_d, gamma_collective);
        dy[0] = d.dj_minus.real();
        dy[1] = d.dj_minus.imag();
        dy[2] = d.dj_z;
    };
    std::vector<double> y = {j_minus0.real(), j_minus0.imag(), j_z0};
    CrfReducedTrajectory traj;
    auto on_sample = [&](std::size_t, double t, const std::vector<double>& yt) {
        traj.times.push_back(t);
        traj.j_minus.emplace_back(yt[0], yt[1]);
        traj.j_z.push_back(yt[2]);
    };
    OdeOptions ode_opt;
    ode_opt.rtol = opt.rtol;
    ode_opt.atol = opt.atol;
    ode_opt.max_steps = opt.max_steps;
    integrate_dopri5(rhs, 0.0, t_samples.back(), y, t_samples, on_sample, ode_opt);
    return traj;
}

ReducedIdealState rhs_ideal_reduced(const ReducedIdealState& state, double t,
                                    const PhysicalParams& p, const DriveProtocol& proto,
                                    const EnsembleGrid& grid) {
    const double sqrt_n = std::sqrt(p.n_atoms);
    cplx spin_term{0.0, 0.0};
    for (const GridNode& node : grid.nodes) {
        const double gk = p.g_rms * node.eta;
        spin_term += node.weight * gk * std::sin(gk * sqrt_n * state.q);
    }
    ReducedIdealState d;
    d.alpha = -0.5 * p.kappa * state.alpha - sqrt_n * 0.5 * spin_term +
              p.kappa * drive_amplitude(proto, t) / (4.0 * p.g_rms * sqrt_n);
    d.q = 2.0 * state.alpha;
    return d;
}

double ideal_inversion_from_q(const EnsembleGrid& grid, const PhysicalParams& p,
                              cplx q) {
    const double sqrt_n = std::sqrt(p.n_atoms);
    cplx num{0.0, 0.0};
    double den = 0.0;
    for (const GridNode& node : grid.nodes) {
        const double we2 = node.weight * node.eta * node.eta;
        num += we2 * std::cos(node.eta * p.g_rms * sqrt_n * q);
        den += we2;
    }
    if (den == 0.0) throw GridError("ideal_inversion_from_q: zero coupling norm");
    return -(num / den).real();
}

IdealTrajectory integrate_ideal(const EnsembleGrid& grid, const PhysicalParams& p,
                                const DriveProtocol& proto,
                                const std::vector<double>& t_samples,
                                const ReducedIdealState& initial,
                                const IntegrateOptions& opt) {
    validate(p);
    validate(proto);
    if (t_samples.empty()) throw DomainError("integrate_ideal: no sample times given");
    auto rhs = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
        ReducedIdealState s{{y[0], y[1]}, {y[2], y[3]}};
        const ReducedIdealState d = rhs_ideal_reduced(s, t, p, proto, grid);
        dy[0] = d.alpha.real();
        dy[1] = d.alpha.imag();
        dy[2] = d.q.real();
        dy[3] = d.q.imag();
    };
    std::vector<double> y = {initial.alpha.real(), initial.alpha.imag(),
                             initial.q.real(), initial.q.imag()};
    IdealTrajectory traj;
    auto on_sample = [&](std::size_t, double t, const std::vector<double>& yt) {
        traj.times.push_back(t);
        traj.alpha.emplace_back(yt[0], yt[1]);
        traj.q.emplace_back(yt[2], yt[3]);
        traj.jz_weighted.push_back(ideal_inversion_from_q(grid, p, {yt[2], yt[3]}));
    };
    OdeOptions ode_opt;
    ode_opt.rtol = opt.rtol;
    ode_opt.atol = opt.atol;
    ode_opt.max_steps = opt.max_steps;
    const bool split = proto.shape == DriveShape::Ramp && proto.t_ramp > 0.0 &&
                       proto.t_ramp < proto.t_hold;
    if (!split) {
        integrate_dopri5(rhs, 0.0, proto.t_hold, y, t_samples, on_sample, ode_opt);
        return traj;
    }
    std::vector<double> first, second;
    for (double ts : t_samples)
        (ts <= proto.t_ramp ? first : second).push_back(ts);
    integrate_dopri5(rhs, 0.0, proto.t_ramp, y, first, on_sample, ode_opt);
    integrate_dopri5(rhs, proto.t_ramp, proto.t_hold, y, second, on_sample, ode_opt);
    return traj;
}

namespace {

// vertex of the parabola through three samples; falls back to the middle
// point when the curvature vanishes
void parabola_vertex(double t0, double y0, double t1, double y1, double t2,
                     double y2, double& t_out, double& y_out) {
    const double denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
    const double a =
        (t2 * (y1 - y0) + t1 * (y0 - y2) + t0 * (y2 - y1)) / denom;
    const double b =
        (t2 * t2 * (y0 - y1) + t1 * t1 * (y2 - y0) + t0 * t0 * (y1 - y2)) / denom;
    if (a == 0.0 || !std::isfinite(a) || !std::isfinite(b)) {
        t_out = t1;
        y_out = y1;
        return;
    }
    const double tv = -b / (2.0 * a);
    if (tv < std::min(t0, t2) || tv > std::max(t0, t2)) {
        t_out = t1;
        y_out = y1;
        return;
    }
    const double cc = y1 - a * t1 * t1 - b * t1;
    t_out = tv;
    y_out = a * tv * tv + b * tv + cc;
}

} // namespace

OscillationFit extract_oscillation(const Trajectory& traj, double t_lo, double t_hi) {
    if (!(t_hi > t_lo)) throw DomainError("extract_oscillation: empty window");
    std::vector<double> t, v;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        if (traj.times[i] >= t_lo && traj.times[i] <= t_hi) {
            t.push_back(traj.times[i]);
            v.push_back(traj.observables[i].j_z_weighted);
        }
    }
    if (t.size() < 5)
        throw OscillationError("extract_oscillation: too few samples in window");

    // tail mean over the last quarter of the window approximates the value
    // the oscillation decays toward
    double tail_mean = 0.0;
    std::size_t tail_n = 0;
    const double t_tail = t_hi - 0.25 * (t_hi - t_lo);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_tail) {
            tail_mean += v[i];
            ++tail_n;
        }
    }
    tail_mean /= static_cast<double>(tail_n);

    std::vector<double> ext_t, ext_amp;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double dl = v[i] - v[i - 1];
        const double dr = v[i + 1] - v[i];
        if ((dl > 0.0 && dr <= 0.0) || (dl < 0.0 && dr >= 0.0)) {
            double tv, yv;
            parabola_vertex(t[i - 1], v[i - 1], t[i], v[i], t[i + 1], v[i + 1], tv, yv);
            ext_t.push_back(tv);
            ext_amp.push_back(std::abs(yv - tail_mean));
        }
    }
    if (ext_t.size() < 3)
        throw OscillationError("extract_oscillation: fewer than 3 extrema in window");

    double spacing = 0.0;
    for (std::size_t i = 1; i < ext_t.size(); ++i) spacing += ext_t[i] - ext_t[i - 1];
    spacing /= static_cast<double>(ext_t.size() - 1);

    // successive extrema are half a period apart
    OscillationFit fit;
    fit.frequency = std::numbers::pi / spacing;
    fit.n_extrema = static_cast<int>(ext_t.size());

    // extrema that have decayed below 1% of the peak are dominated by the
    // error of the tail-mean baseline; their log-ratios are noise
    double amp_floor = 0.0;
    for (double a : ext_amp) amp_floor = std::max(amp_floor, a);
    amp_floor *= 1e-2;
    double rate = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 1; i < ext_t.size(); ++i) {
        if (ext_amp[i] > amp_floor && ext_amp[i - 1] > amp_floor) {
            rate += std::log(ext_amp[i - 1] / ext_amp[i]) / (ext_t[i] - ext_t[i - 1]);
            ++pairs;
        }
    }
    if (pairs == 0)
        throw OscillationError("extract_oscillation: peak amplitudes too small");
    fit.decay_rate = rate / static_cast<double>(pairs);
    return fit;
}

Observables tail_average(const Trajectory& traj, double fraction) {
    if (traj.times.empty()) throw DomainError("tail_average: empty trajectory");
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw DomainError("tail_average: fraction must be in (0, 1]");
    if (traj.times.size() == 1) return traj.observables.front();

    const double t_end = traj.times.back();
    const double t_cut = t_end - fraction * (t_end - traj.times.front());
    std::size_t first = 0;
    while (first < traj.times.size() &&
           traj.times[first] < t_cut - 1e-15 * std::abs(t_end))
        ++first;
    if (first + 1 >= traj.times.size()) return traj.observables.back();

    double span = 0.0;
    double jz = 0.0, trans = 0.0;
    cplx jm{0.0, 0.0}, osr{0.0, 0.0};
    for (std::size_t i = first + 1; i < traj.times.size(); ++i) {
        const double dt = traj.times[i] - traj.times[i - 1];
        const Observables& a = traj.observables[i - 1];
        const Observables& b = traj.observables[i];
        jz += 0.5 * dt * (a.j_z_weighted + b.j_z_weighted);
        trans += 0.5 * dt * (a.transmission + b.transmission);
        jm += 0.5 * dt * (a.j_minus_weighted + b.j_minus_weighted);
        osr += 0.5 * dt * (a.omega_sr + b.omega_sr);
        span += dt;
    }
    Observables avg;
    avg.j_z_weighted = jz / span;
    avg.transmission = trans / span;
    avg.j_minus_weighted = jm / span;
    avg.omega_sr = osr / span;
    return avg;
}

} // namespace crf
