#include "doctest.h"

#include <cmath>
#include <vector>

#include "crf/errors.hpp"
#include "crf/longtime.hpp"

using namespace crf;

TEST_CASE("drift fixed point below the emission-limited threshold") {
    auto u = drift_fixed_point(0.5);
    REQUIRE(u.has_value());
    CHECK(*u == doctest::Approx(-(1.0 + std::sqrt(0.5)) / 2.0).epsilon(1e-12));

    CHECK(drift_fixed_point(1.0 / std::sqrt(2.0)).has_value());
    CHECK_FALSE(drift_fixed_point(0.7072).has_value());

    // the ground state is stationary without drive
    DriftState ground;
    PhysicalParams p;
    CHECK(std::abs(drift_rhs(ground, p)) < 1e-20);
}

TEST_CASE("drift rhs guards its domain") {
    PhysicalParams p;
    DriftState s;
    s.u = 0.0;
    s.r = 0.5;
    CHECK_THROWS_AS(drift_rhs(s, p), SingularDriftError);
    s.u = 0.5;
    CHECK_THROWS_AS(drift_rhs(s, p), DomainError);
}

TEST_CASE("equilibration time against the closed form") {
    struct {
        double r, gamma_t;
    } golden[] = {
        {0.720000, 12.13923846},
        {0.749533, 4.82776708},
        {0.780000, 2.76707595},
        {0.799031, 2.06775327},
        {0.850000, 1.00727016},
        {0.950000, 0.17088418},
        {0.990000, 0.02461963},
    };
    for (const auto& g : golden)
        CHECK(equilibration_time(g.r) == doctest::Approx(g.gamma_t).epsilon(1e-7));

    CHECK_THROWS_AS(equilibration_time(0.7071), DomainError);
    CHECK_THROWS_AS(equilibration_time(1.0), DomainError);
}

TEST_CASE("square-root divergence of the equilibration time") {
    std::vector<double> scaled;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        double r = std::sqrt(0.5 + eps);
        scaled.push_back(equilibration_time(r) * std::sqrt(eps));
    }
    CHECK(scaled[0] == doctest::Approx(1.795069).epsilon(1e-5));
    CHECK(scaled[1] == doctest::Approx(2.085705).epsilon(1e-5));
    CHECK(scaled[2] == doctest::Approx(2.178489).epsilon(1e-5));
    CHECK(scaled[0] < scaled[1]);
    CHECK(scaled[1] < scaled[2]);
    // limiting constant pi/sqrt(2)
    CHECK(scaled[2] == doctest::Approx(3.14159265358979 / std::sqrt(2.0)).epsilon(0.02));
}

TEST_CASE("drift integration settles onto the fixed point") {
    PhysicalParams p;
    const double r = 0.5;
    // relaxation rate near the fixed point is 0.83*gamma, so 20/gamma leaves
    // a residual ~ 1e-8
    std::vector<double> samples;
    for (int i = 0; i <= 100; ++i) samples.push_back(20.0 / p.gamma * i / 100.0);

    DriftTrajectory traj = integrate_drift(-0.95, r, p.gamma, samples);
    REQUIRE(traj.times.size() == samples.size());
    CHECK(traj.u.back() == doctest::Approx(*drift_fixed_point(r)).epsilon(1e-6));
}

TEST_CASE("drift without a fixed point truncates at depolarization") {
    PhysicalParams p;
    const double r = 0.9;  // above 1/sqrt(2): u runs to zero in finite time
    std::vector<double> samples;
    for (int i = 0; i <= 200; ++i) samples.push_back(3.0 / p.gamma * i / 200.0);

    DriftTrajectory traj = integrate_drift(-0.5, r, p.gamma, samples);
    CHECK(traj.times.size() < samples.size());
    REQUIRE(!traj.u.empty());
    CHECK(traj.u.back() > -0.15);

    // expected depolarization time: gamma*T for this r plus the leg from
    // u=-sqrt(1-r^2)... the truncation must occur before the full window
    CHECK(traj.times.back() < samples.back());
}

TEST_CASE("remnant field follows the surviving coherence") {
    PhysicalParams p;
    EnsembleState state;
    state.groups.push_back({1.0, 0.0, 1.0, cplx(0.0, -0.2), -0.3});
    // homogeneous resonant group: alpha = gamma*s / (2 i g sqrt(N) jz_w)
    cplx alpha = remnant_field(state, p);
    const double jz_w = -0.6;  // 2 * 1 * (-0.3)
    cplx expected = p.gamma * cplx(0.0, -0.2) /
                    (cplx(0.0, 2.0) * p.g_rms * std::sqrt(p.n_atoms) * jz_w);
    CHECK(alpha.real() == doctest::Approx(expected.real()).epsilon(1e-12));
    CHECK(alpha.imag() == doctest::Approx(expected.imag()).epsilon(1e-12));

    // fully depolarized ensemble has no reference inversion
    state.groups[0].z = 0.0;
    CHECK_THROWS_AS(remnant_field(state, p), SingularDriftError);

    // gamma -> 0 stays finite when detuning carries the numerator
    PhysicalParams p0 = p;
    p0.gamma = 0.0;
    EnsembleState detuned;
    detuned.groups.push_back({1.0, from_2pi_hz(10e3), 1.0, cplx(0.1, 0.0), -0.4});
    cplx a0 = remnant_field(detuned, p0);
    CHECK(std::isfinite(a0.real()));
    CHECK(std::isfinite(a0.imag()));
    CHECK(std::abs(a0) > 0.0);
}
