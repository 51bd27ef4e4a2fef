#include "doctest.h"

#include <cmath>
#include <vector>

#include "crf/dynamics.hpp"
#include "crf/errors.hpp"
#include "crf/state.hpp"
#include "crf/steady_state.hpp"

using namespace crf;

namespace {

EnsembleGrid single_group_grid() {
    return EnsembleGrid{{GridNode{1.0, 0.0, 1.0}}, 0.0, 0.0};
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
    return out;
}

} // namespace

TEST_CASE("weighted observables from a hand-built state") {
    EnsembleState state;
    state.groups.push_back({1.0, 0.0, 0.5, cplx(0, 0), -0.5});
    state.groups.push_back({0.5, 0.0, 0.5, cplx(0, 0), 0.0});
    // 2 * (0.5*1*(-0.5) + 0.5*0.25*0) / (0.5*1 + 0.5*0.25) = -0.8
    CHECK(weighted_inversion(state) == doctest::Approx(-0.8).epsilon(1e-14));

    PhysicalParams p;
    // alpha*sqrt(N) = omega_d/(2 g) is the resonant empty-cavity amplitude
    const double omega_d = from_2pi_hz(50e3);
    const cplx alpha{omega_d / (2.0 * p.g_rms * std::sqrt(p.n_atoms)), 0.0};
    CHECK(transmission_fraction(alpha, omega_d, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(transmission_fraction(alpha, 0.0, p), DomainError);
}

TEST_CASE("driven ensemble relaxes onto the lossless uniform branch") {
    PhysicalParams p;
    p.gamma = 0.0;
    const double r = 0.6;
    DriveProtocol proto;
    proto.shape = DriveShape::Ramp;
    proto.omega_d = r * derive_params(p).omega_c_h;
    proto.t_ramp = 5e-6;
    proto.t_hold = 65e-6;

    Trajectory traj = integrate(ground_state(single_group_grid()), p, proto,
                                linspace(0.0, proto.t_hold, 600));
    double jz_tail = tail_average(traj, 0.2).j_z_weighted;
    CHECK(jz_tail == doctest::Approx(-std::sqrt(1.0 - r * r)).epsilon(2e-3));
}

TEST_CASE("spin length is conserved without spontaneous emission") {
    PhysicalParams p;
    p.gamma = 0.0;
    EnsembleGrid grid = ensemble_grid(20, 40, p);
    DriveProtocol proto;
    proto.shape = DriveShape::Ramp;
    proto.omega_d = 0.5 * derive_params(p).omega_c_h;
    proto.t_ramp = 5e-6;
    proto.t_hold = 100e-6;

    auto worst_defect = [&](double rtol) {
        IntegrateOptions opt;
        opt.rtol = rtol;
        opt.atol = rtol * 1e-3;
        Trajectory traj = integrate(ground_state(grid), p, proto,
                                    linspace(0.0, proto.t_hold, 11), opt);
        double worst = 0.0;
        for (const auto& state : traj.states)
            worst = std::max(worst, max_spin_length_defect(state));
        return worst;
    };
    // the defect is pure integrator error, so it sits at tolerance scale and
    // shrinks when the tolerance tightens (measured 1e-7 / 7e-10 here)
    const double coarse = worst_defect(1e-9);
    const double fine = worst_defect(1e-11);
    CHECK(coarse < 1e-6);
    CHECK(fine < 5e-9);
    CHECK(fine < 0.1 * coarse);
}

TEST_CASE("quadrature-accumulation reduction matches the full model") {
    // gamma = 0 and no Stark broadening: the per-group phase is eta*g*sqrt(N)*Q
    PhysicalParams p;
    p.gamma = 0.0;
    p.delta_max = 0.0;
    EnsembleGrid grid = ensemble_grid(20, 1, p);
    DriveProtocol proto;
    proto.shape = DriveShape::Ramp;
    proto.omega_d = 0.5 * derive_params(p).omega_c_h;
    proto.t_ramp = 5e-6;
    proto.t_hold = 20e-6;
    std::vector<double> samples = linspace(0.0, proto.t_hold, 200);

    Trajectory full = integrate(ground_state(grid), p, proto, samples);
    IdealTrajectory reduced = integrate_ideal(grid, p, proto, samples);

    double max_dev = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i)
        max_dev = std::max(max_dev, std::abs(full.observables[i].j_z_weighted -
                                             reduced.jz_weighted[i]));
    CHECK(max_dev < 1e-6);

    // the reconstructed inversion matches the trajectory's own bookkeeping
    CHECK(ideal_inversion_from_q(grid, p, reduced.q.back()) ==
          doctest::Approx(reduced.jz_weighted.back()).epsilon(1e-12));
}

TEST_CASE("collective reduction conserves the spin-sphere radius") {
    const double omega_d = 2.0, gamma_c = 0.7;
    const cplx j{0.3, 0.1};
    const double z = -0.4;
    CrfReducedDeriv d = rhs_crf_reduced(j, z, omega_d, gamma_c);
    // d/dt (|J-|^2 + Jz^2) vanishes identically
    double growth = 2.0 * (j.real() * d.dj_minus.real() +
                           j.imag() * d.dj_minus.imag()) +
                    2.0 * z * d.dj_z;
    CHECK(std::abs(growth) < 1e-15);
}

TEST_CASE("adiabatic collective model matches the full dynamics") {
    // deep cavity-elimination regime: kappa = 20 g sqrt(N)
    PhysicalParams p;
    p.gamma = 0.0;
    p.n_atoms = 100;
    p.g_rms = from_2pi_hz(1e3);
    p.kappa = 20.0 * p.g_rms * std::sqrt(p.n_atoms);
    DerivedParams d = derive_params(p);
    const double omega_d = 0.5 * d.omega_c_h;

    DriveProtocol proto;
    proto.shape = DriveShape::Quench;
    proto.omega_d = omega_d;
    proto.t_hold = 1.5e-3;
    std::vector<double> samples = linspace(0.0, proto.t_hold, 200);

    Trajectory full =
        integrate(ground_state(single_group_grid()), p, proto, samples);
    CrfReducedTrajectory reduced = integrate_crf_reduced(
        cplx(0, 0), -0.5 * p.n_atoms, omega_d, d.gamma_collective, samples);

    double max_dev = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double jz_red = reduced.j_z[i] / (0.5 * p.n_atoms);
        max_dev = std::max(
            max_dev, std::abs(full.observables[i].j_z_weighted - jz_red));
    }
    CHECK(max_dev < 0.02);
}

TEST_CASE("oscillation fit recovers a damped cosine") {
    const double freq = from_2pi_hz(100e3);
    const double tau = 4e-6;
    Trajectory traj;
    for (int i = 0; i <= 4096; ++i) {
        double t = 40e-6 * i / 4096.0;
        traj.times.push_back(t);
        Observables obs;
        obs.j_z_weighted = -0.7 + 0.2 * std::exp(-t / tau) * std::cos(freq * t);
        traj.observables.push_back(obs);
    }
    OscillationFit fit = extract_oscillation(traj, 0.0, 40e-6);
    CHECK(fit.frequency == doctest::Approx(freq).epsilon(0.01));
    CHECK(fit.decay_rate == doctest::Approx(1.0 / tau).epsilon(0.05));
    CHECK(fit.n_extrema >= 3);
}

TEST_CASE("oscillation fit refuses monotonic data") {
    Trajectory traj;
    for (int i = 0; i <= 100; ++i) {
        traj.times.push_back(1e-6 * i);
        Observables obs;
        obs.j_z_weighted = -1.0 + 0.001 * i;
        traj.observables.push_back(obs);
    }
    CHECK_THROWS_AS(extract_oscillation(traj, 0.0, 100e-6), OscillationError);
}

TEST_CASE("tail average is the trapezoid mean of the window") {
    Trajectory traj;
    for (int i = 0; i <= 40; ++i) {
        traj.times.push_back(i / 40.0);
        Observables obs;
        obs.j_z_weighted = i / 40.0;  // linear, so the trapezoid rule is exact
        traj.observables.push_back(obs);
    }
    CHECK(tail_average(traj, 0.5).j_z_weighted == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(tail_average(traj, 1.0).j_z_weighted == doctest::Approx(0.5).epsilon(1e-12));

    Trajectory single;
    single.times.push_back(2.0);
    Observables obs;
    obs.j_z_weighted = -0.25;
    single.observables.push_back(obs);
    CHECK(tail_average(single, 0.5).j_z_weighted == doctest::Approx(-0.25));
}

TEST_CASE("integration rejects malformed sample lists") {
    PhysicalParams p;
    EnsembleGrid grid = ensemble_grid(4, 2, p);
    DriveProtocol proto;
    proto.shape = DriveShape::Constant;
    proto.omega_d = 1e3;
    proto.t_hold = 1e-6;

    CHECK_THROWS_AS(integrate(ground_state(grid), p, proto, {}), DomainError);
    CHECK_THROWS_AS(integrate(ground_state(grid), p, proto, {0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(integrate(ground_state(grid), p, proto, {0.0, 2e-6}), DomainError);
}

TEST_CASE("observables-only mode skips state storage") {
    PhysicalParams p;
    EnsembleGrid grid = ensemble_grid(4, 2, p);
    DriveProtocol proto;
    proto.shape = DriveShape::Constant;
    proto.omega_d = 0.1 * derive_params(p).omega_c_h;
    proto.t_hold = 2e-6;

    IntegrateOptions opt;
    opt.keep_states = false;
    Trajectory traj =
        integrate(ground_state(grid), p, proto, linspace(0.0, 2e-6, 20), opt);
    CHECK(traj.states.empty());
    CHECK(traj.observables.size() == 20);
    CHECK(traj.times.size() == 20);
}

TEST_CASE("serial and parallel derivative kernels agree bitwise") {
    PhysicalParams p;
    EnsembleGrid grid = ensemble_grid(80, 80, p);  // above the auto threshold
    REQUIRE(grid.nodes.size() >= 4096);

    EnsembleState state = ground_state(grid);
    // displace the state so every term in the kernel is exercised
    state.alpha = cplx(3e-3, -1e-3);
    for (std::size_t k = 0; k < state.groups.size(); ++k) {
        auto& g = state.groups[k];
        g.s = cplx(0.1 * std::sin(0.37 * static_cast<double>(k + 1)),
                   0.1 * std::cos(0.59 * static_cast<double>(k + 1)));
        g.z = -0.5 + 0.3 * std::abs(std::sin(0.11 * static_cast<double>(k)));
    }
    DriveProtocol proto;
    proto.shape = DriveShape::Constant;
    proto.omega_d = 0.4 * derive_params(p).omega_c_h;
    proto.t_hold = 1e-6;

    EnsembleState ds = rhs_full(state, 0.5e-6, p, proto, ExecMode::Serial);
    EnsembleState dp = rhs_full(state, 0.5e-6, p, proto, ExecMode::Parallel);

    CHECK(ds.alpha.real() == dp.alpha.real());
    CHECK(ds.alpha.imag() == dp.alpha.imag());
    bool identical = true;
    for (std::size_t k = 0; k < ds.groups.size(); ++k) {
        identical = identical && ds.groups[k].s == dp.groups[k].s &&
                    ds.groups[k].z == dp.groups[k].z;
    }
    CHECK(identical);
}
