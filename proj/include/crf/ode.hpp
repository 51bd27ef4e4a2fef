#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "crf/errors.hpp"

namespace crf {

struct OdeOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h_max = 0.0;             // 0 → span of the integration interval
    double h_init = 0.0;            // 0 → automatic
    std::size_t max_steps = 5'000'000;
};

// Embedded Dormand-Prince 5(4) pair with FSAL, PI step-size control and a
// quartic dense-output interpolant. State is a flat vector of doubles; the
// right-hand side is rhs(t, y, dydt). Samples are taken from the dense
// interpolant at the (sorted, in-range) times in t_samples via
// on_sample(sample_index, t, y_at_t). Throws StiffnessError when the step
// size underflows or the step budget is exhausted.
template <class Rhs, class Sampler>
void integrate_dopri5(Rhs&& rhs, double t0, double t1, std::vector<double>& y,
                      const std::vector<double>& t_samples, Sampler&& on_sample,
                      const OdeOptions& opt = {}) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    // weights of the embedded 4th-order error estimate (b5 - b4)
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // dense-output coefficients
    static constexpr double d1 = -12715105075.0 / 11282082432.0,
                            d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0,
                            d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0,
                            d7 = 69997945.0 / 29380423.0;
    static constexpr double beta = 0.04;
    static constexpr double expo1 = 0.2 - beta * 0.75;
    static constexpr double safe = 0.9;
    static constexpr double facc1 = 5.0;   // max shrink factor per step
    static constexpr double facc2 = 0.1;   // max growth factor is 1/facc2

    if (!(t1 > t0)) throw DomainError("integrate_dopri5: need t1 > t0");
    const std::size_t n = y.size();
    const double hmax = opt.h_max > 0.0 ? opt.h_max : t1 - t0;
    const double uround = std::numeric_limits<double>::epsilon();

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    std::vector<double> ytmp(n), ynew(n);
    std::vector<double> rc1(n), rc2(n), rc3(n), rc4(n), rc5(n);

    double t = t0;
    rhs(t, y, k1);

    // automatic initial step (standard two-derivative heuristic)
    double h = opt.h_init;
    if (h <= 0.0) {
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            dnf += (k1[i] / sc) * (k1[i] / sc);
            dny += (y[i] / sc) * (y[i] / sc);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, hmax);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * k1[i];
        rhs(t + h, ytmp, k2);
        double der2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            der2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(der2, std::sqrt(dnf));
        const double h1 = (der12 <= 1e-15) ? std::max(1e-6, h * 1e-3)
                                           : std::pow(0.01 / der12, 0.2);
        h = std::min({100.0 * h, h1, hmax});
    }

    std::size_t sample_idx = 0;
    // samples exactly at t0 come straight from the initial state
    while (sample_idx < t_samples.size() && t_samples[sample_idx] <= t0) {
        on_sample(sample_idx, t_samples[sample_idx], y);
        ++sample_idx;
    }

    double facold = 1e-4;
    bool rejected = false;
    std::size_t steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps)
            throw StiffnessError("integrate_dopri5: step budget exhausted", t, 0.0);
        if (0.1 * std::abs(h) <= std::abs(t) * uround) {
            double norm = 0.0;
            for (double v : y) norm += v * v;
            throw StiffnessError("integrate_dopri5: step size underflow", t,
                                 std::sqrt(norm));
        }
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        rhs(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        rhs(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        rhs(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        rhs(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                  a64 * k4[i] + a65 * k5[i]);
        rhs(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] +
                                  a75 * k5[i] + a76 * k6[i]);
        rhs(t + h, ynew, k7);  // FSAL: becomes k1 of the next step

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                                   e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double sc =
                opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (ei / sc) * (ei / sc);
        }
        err = std::sqrt(err / static_cast<double>(n));
        if (!std::isfinite(err)) err = 2.0;  // force rejection on NaN/Inf

        const double fac11 = std::pow(err, expo1);
        double fac = fac11 / std::pow(facold, beta);
        fac = std::max(facc2, std::min(facc1, fac / safe));
        double hnew = h / fac;

        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            // dense-output interpolant for this step
            const bool want_dense = sample_idx < t_samples.size() &&
                                    t_samples[sample_idx] <= t + h + 1e-14 * hmax;
            if (want_dense) {
                for (std::size_t i = 0; i < n; ++i) {
                    const double ydiff = ynew[i] - y[i];
                    const double bspl = h * k1[i] - ydiff;
                    rc1[i] = y[i];
                    rc2[i] = ydiff;
                    rc3[i] = bspl;
                    rc4[i] = ydiff - h * k7[i] - bspl;
                    rc5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] +
                                  d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                }
                while (sample_idx < t_samples.size()) {
                    const double ts = t_samples[sample_idx];
                    if (ts > t + h && !(last && ts <= t1 + 1e-14 * hmax)) break;
                    const double theta = std::clamp((ts - t) / h, 0.0, 1.0);
                    const double th1 = 1.0 - theta;
                    for (std::size_t i = 0; i < n; ++i)
                        ytmp[i] = rc1[i] +
                                  theta * (rc2[i] +
                                           th1 * (rc3[i] +
                                                  theta * (rc4[i] + th1 * rc5[i])));
                    on_sample(sample_idx, ts, ytmp);
                    ++sample_idx;
                }
            }
            k1.swap(k7);
            y.swap(ynew);
            t += h;
            if (rejected) hnew = std::min(std::abs(hnew), std::abs(h));
            rejected = false;
            h = std::min(hnew, hmax);
            if (last && sample_idx >= t_samples.size()) break;
        } else {
            hnew = h / std::min(facc1, fac11 / safe);
            rejected = true;
            h = hnew;
        }
    }
    // flush samples that coincide with the endpoint up to rounding
    while (sample_idx < t_samples.size()) {
        const double ts = t_samples[sample_idx];
        if (ts > t1 + 1e-12 * (t1 - t0))
            throw DomainError("integrate_dopri5: sample time beyond interval end");
        on_sample(sample_idx, ts, y);
        ++sample_idx;
    }
}

// Convenience: integrate to t1 with no sampling.
template <class Rhs>
void integrate_dopri5(Rhs&& rhs, double t0, double t1, std::vector<double>& y,
                      const OdeOptions& opt = {}) {
    integrate_dopri5(std::forward<Rhs>(rhs), t0, t1, y, {},
                     [](std::size_t, double, const std::vector<double>&) {}, opt);
}

} // namespace crf
