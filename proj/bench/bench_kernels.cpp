// Timing comparison between the serial reference kernels and the OpenMP
// paths: blocked reductions, the full-model right-hand side via integrate(),
// and the sweep worker pool. Prints a table, asserts nothing.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "crf/distributions.hpp"
#include "crf/dynamics.hpp"
#include "crf/parallel.hpp"
#include "crf/params.hpp"
#include "crf/state.hpp"
#include "crf/sweep.hpp"

namespace {

using namespace crf;
using clock_type = std::chrono::steady_clock;

template <class Fn>
double time_ms(Fn&& fn, int reps = 1) {
    const auto t0 = clock_type::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = clock_type::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i)
        out[i] = lo + (hi - lo) * static_cast<double>(i) / (n - 1);
    return out;
}

void bench_reductions() {
    std::printf("blocked_sum (deterministic reduction)\n");
    std::printf("%-24s %12s %12s %9s %10s\n", "size", "serial ms", "parallel ms",
                "speedup", "bitwise");
    for (std::size_t n : {std::size_t(100000), std::size_t(1000000),
                          std::size_t(10000000)}) {
        auto term = [](std::size_t i) {
            const double x = 1e-6 * static_cast<double>(i);
            return std::sin(x) / (1.0 + x * x);
        };
        const int reps = n >= 10000000 ? 20 : 200;
        volatile double sink = 0.0;
        double serial_val = 0.0, parallel_val = 0.0;
        const double ts = time_ms(
            [&] { sink = serial_val = blocked_sum(n, term, ExecMode::Serial); },
            reps);
        const double tp = time_ms(
            [&] { sink = parallel_val = blocked_sum(n, term, ExecMode::Parallel); },
            reps);
        (void)sink;
        std::printf("%-24zu %12.3f %12.3f %8.2fx %10s\n", n, ts, tp, ts / tp,
                    serial_val == parallel_val ? "identical" : "DIFFER");
    }
    std::printf("\n");
}

void bench_rhs(int n_phi, int n_delta) {
    PhysicalParams p;
    const EnsembleGrid grid = ensemble_grid(n_phi, n_delta, p);
    const double och = derive_params(p).omega_c_h;
    const DriveProtocol proto{DriveShape::Ramp, 0.6 * och, 5e-6, 9.3e-6};
    const std::vector<double> times = linspace(0.0, proto.t_hold, 200);

    IntegrateOptions opt;
    opt.keep_states = false;
    double jz_serial = 0.0, jz_parallel = 0.0;
    opt.mode = ExecMode::Serial;
    const double ts = time_ms([&] {
        jz_serial = integrate(ground_state(grid), p, proto, times, opt)
                        .observables.back()
                        .j_z_weighted;
    });
    opt.mode = ExecMode::Parallel;
    const double tp = time_ms([&] {
        jz_parallel = integrate(ground_state(grid), p, proto, times, opt)
                          .observables.back()
                          .j_z_weighted;
    });
    std::printf("%-24s %12.1f %12.1f %8.2fx %10s\n",
                (std::to_string(n_phi) + "x" + std::to_string(n_delta) + " groups")
                    .c_str(),
                ts, tp, ts / tp, jz_serial == jz_parallel ? "identical" : "DIFFER");
}

void bench_sweep() {
    SweepSpec spec;
    spec.axis = SweepAxis::OmegaD;
    for (int i = 0; i < 8; ++i) spec.values.push_back(0.3 + 0.1 * i);
    spec.protocol = DriveProtocol{DriveShape::Ramp, 0.0, 5e-6, 9.3e-6};
    spec.n_samples = 400;
    spec.mode = ExecMode::Serial;  // isolate the worker pool from the kernels

    SweepResult r1, rn;
    const double t1 = time_ms([&] { r1 = run_sweep(spec, "", 1); });
    const double tn = time_ms([&] { rn = run_sweep(spec, "", max_threads()); });
    bool identical = true;
    for (std::size_t i = 0; i < r1.rows.size(); ++i)
        identical = identical && r1.rows[i].jz_tail == rn.rows[i].jz_tail &&
                    r1.rows[i].transmission_tail == rn.rows[i].transmission_tail;
    std::printf("sweep worker pool (8 points, serial kernels)\n");
    std::printf("%-24s %12s %12s %9s %10s\n", "jobs", "1 job ms",
                ("  " + std::to_string(max_threads()) + " jobs ms").c_str(),
                "speedup", "bitwise");
    std::printf("%-24s %12.1f %12.1f %8.2fx %10s\n", "full-model point", t1, tn,
                t1 / tn, identical ? "identical" : "DIFFER");
}

} // namespace

int main() {
    std::printf("kernel benchmark, %d OpenMP threads available\n\n", max_threads());

    bench_reductions();

    std::printf("full-model integration (ramp 5 us + hold 9.3 us, N = 1e4)\n");
    std::printf("%-24s %12s %12s %9s %10s\n", "grid", "serial ms", "parallel ms",
                "speedup", "bitwise");
    bench_rhs(20, 40);
    bench_rhs(80, 160);
    std::printf("\n");

    bench_sweep();
    return 0;
}
