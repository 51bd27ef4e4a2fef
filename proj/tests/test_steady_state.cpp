#include "doctest.h"

#include <cmath>

#include "crf/dynamics.hpp"
#include "crf/errors.hpp"
#include "crf/steady_state.hpp"

using namespace crf;

TEST_CASE("bessel helper against tabulated values") {
    CHECK(bessel_j(0, 0.0) == doctest::Approx(1.0));
    CHECK(bessel_j(1, 0.0) == doctest::Approx(0.0));
    CHECK(bessel_j(1, 1.8412) == doctest::Approx(0.5818652242).epsilon(1e-9));
    CHECK(bessel_j(2, 3.0517) == doctest::Approx(0.4864977881).epsilon(1e-9));
    // negative arguments via parity: J1 odd, J0/J2 even
    CHECK(bessel_j(1, -1.0) == doctest::Approx(-bessel_j(1, 1.0)).epsilon(1e-14));
    CHECK(bessel_j(2, -1.0) == doctest::Approx(bessel_j(2, 1.0)).epsilon(1e-14));
}

TEST_CASE("lossless uniform branch") {
    PhysicalParams p;
    p.gamma = 0.0;
    SteadyStateSolution sol = ss_ideal_homog(0.6, p);
    REQUIRE(sol.exists);
    CHECK(*sol.j_z_weighted == doctest::Approx(-0.8).epsilon(1e-12));
    CHECK(std::sin(p.g_rms * std::sqrt(p.n_atoms) * *sol.q_ss) ==
          doctest::Approx(0.6).epsilon(1e-12));

    CHECK(ss_ideal_homog(1.0, p).exists);
    CHECK(*ss_ideal_homog(1.0, p).j_z_weighted == doctest::Approx(0.0).epsilon(1e-6));
    CHECK_FALSE(ss_ideal_homog(1.02, p).exists);
    CHECK(critical_drive(Regime::IdealHomog).value == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("lossless cosine-coupling branch") {
    PhysicalParams p;
    p.gamma = 0.0;
    // first-branch root of J1(x) = r/sqrt(2) and the resulting inversion
    struct {
        double r, x, jz;
    } golden[] = {
        {0.41145, 0.609785083259, -0.864122598972},
        {0.60000, 0.952560576730, -0.680617111834},
        {0.82000, 1.741625084807, -0.081933277834},
    };
    const double scale = std::sqrt(2.0) * p.g_rms * std::sqrt(p.n_atoms);
    for (const auto& g : golden) {
        SteadyStateSolution sol = ss_ideal_inhomog(g.r, p);
        REQUIRE(sol.exists);
        CHECK(*sol.q_ss * scale == doctest::Approx(g.x).epsilon(1e-9));
        CHECK(*sol.j_z_weighted == doctest::Approx(g.jz).epsilon(1e-9));
    }

    CriticalDrive crit = critical_drive(Regime::IdealInhomog);
    CHECK(crit.value == doctest::Approx(0.8228816917).epsilon(1e-8));
    // the branch survives arbitrarily close below the critical drive (the
    // rounded critical itself lies ~5e-11 above the true maximum of sqrt2*J1)
    CHECK(ss_ideal_inhomog(crit.value * (1.0 - 1e-9), p).exists);
    CHECK_FALSE(ss_ideal_inhomog(0.8228816917, p).exists);
    CHECK_FALSE(ss_ideal_inhomog(0.83, p).exists);
}

TEST_CASE("emission-limited uniform branch") {
    SteadyStateSolution sol = ss_se_homog(0.5);
    REQUIRE(sol.exists);
    CHECK(std::abs(*sol.beta) ==
          doctest::Approx((1.0 - std::sqrt(0.5)) / (std::sqrt(2.0) * 0.5))
              .epsilon(1e-12));
    CHECK(*sol.j_z_weighted ==
          doctest::Approx(-0.5 * (1.0 + std::sqrt(0.5))).epsilon(1e-12));

    CHECK(critical_drive(Regime::SeHomog).value ==
          doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-9));
    CHECK_FALSE(ss_se_homog(0.72).exists);
}

TEST_CASE("emission-limited cosine-coupling branch") {
    CriticalDrive crit = critical_drive(Regime::SeInhomog);
    CHECK(crit.value == doctest::Approx(0.6005662120).epsilon(1e-8));

    // sqrt(2)(1 - 1/sqrt(3)) is hit by two roots of the field equation; the
    // physical branch (continuously connected to the ground state as r -> 0)
    // is the one below the maximum at beta = 0.8995
    const double r_two_roots = 0.5977169814;
    SteadyStateSolution sol = ss_se_inhomog(r_two_roots);
    REQUIRE(sol.exists);
    CHECK(std::abs(*sol.beta) == doctest::Approx(0.8096043685).epsilon(1e-8));
    // phi-quadrature inversion equals the closed form -r/(sqrt(2) |beta|)
    CHECK(*sol.j_z_weighted ==
          doctest::Approx(-r_two_roots / (std::sqrt(2.0) * std::abs(*sol.beta)))
              .epsilon(1e-9));
    CHECK(*sol.j_z_weighted == doctest::Approx(-0.5220447755).epsilon(1e-8));

    CHECK_FALSE(ss_se_inhomog(0.61).exists);
}

TEST_CASE("broadened critical drive shifts with the Stark cap") {
    PhysicalParams p;
    struct {
        double delta_max_hz, crit;
    } golden[] = {
        {100e3, 0.293359},
        {125e3, 0.261157},
        {150e3, 0.237397},
    };
    for (const auto& g : golden) {
        p.delta_max = from_2pi_hz(g.delta_max_hz);
        EnsembleGrid grid = ensemble_grid(20, 40, p);
        CriticalDrive crit = critical_drive(Regime::SeBroadened, &grid, &p);
        CHECK(crit.value == doctest::Approx(g.crit).epsilon(1e-5));
    }

    // grid refinement moves the default threshold by < 0.1%
    p.delta_max = from_2pi_hz(125e3);
    EnsembleGrid fine = ensemble_grid(40, 80, p);
    CHECK(critical_drive(Regime::SeBroadened, &fine, &p).value ==
          doctest::Approx(0.2613598).epsilon(1e-5));
}

TEST_CASE("broadened branch inversion converges under grid doubling") {
    PhysicalParams p;
    EnsembleGrid coarse = ensemble_grid(20, 40, p);
    EnsembleGrid fine = ensemble_grid(40, 80, p);
    SteadyStateSolution a = ss_broadened(0.13, coarse, p);
    SteadyStateSolution b = ss_broadened(0.13, fine, p);
    REQUIRE(a.exists);
    REQUIRE(b.exists);
    CHECK(std::abs(*a.j_z_weighted - *b.j_z_weighted) /
              std::abs(*b.j_z_weighted) <
          5e-3);
}

TEST_CASE("embedded steady states balance the equations of motion") {
    PhysicalParams p;
    DerivedParams d = derive_params(p);
    EnsembleGrid grid = ensemble_grid(20, 40, p);

    for (double r : {0.15, 0.22}) {
        SteadyStateSolution sol = ss_broadened(r, grid, p);
        REQUIRE(sol.exists);
        EnsembleState state = embed_steady_state(sol, grid, p);

        DriveProtocol proto;
        proto.shape = DriveShape::Constant;
        proto.omega_d = r * d.omega_c_h;
        proto.t_hold = 1.0;
        EnsembleState deriv = rhs_full(state, 0.5, p, proto);

        // spin equations are satisfied by construction (machine precision
        // relative to the decay scale); the field equation carries the
        // dropped kappa*gamma/(4 g^2 N) backaction term, bounded by 1% of
        // the drive at these parameters
        double spin_scale = p.gamma;
        for (const auto& g : deriv.groups) {
            CHECK(std::abs(g.s) / spin_scale < 1e-9);
            CHECK(std::abs(g.z) / spin_scale < 1e-9);
        }
        const double drive_term =
            p.kappa * proto.omega_d / (4.0 * p.g_rms * std::sqrt(p.n_atoms));
        CHECK(std::abs(deriv.alpha) / drive_term < 1e-2);

        // with the backaction term kept the field balances too
        SteadyStateSolution exact = ss_broadened(r, grid, p, true);
        EnsembleState state2 = embed_steady_state(exact, grid, p);
        EnsembleState deriv2 = rhs_full(state2, 0.5, p, proto);
        CHECK(std::abs(deriv2.alpha) / drive_term < 1e-8);
    }
}

TEST_CASE("lossless embeds put every spin on its cone") {
    PhysicalParams p;
    p.gamma = 0.0;
    p.delta_max = 0.0;
    EnsembleGrid grid = ensemble_grid(20, 1, p);
    SteadyStateSolution sol = ss_ideal_inhomog(0.6, p);
    EnsembleState state = embed_steady_state(sol, grid, p);

    CHECK(std::abs(state.alpha) < 1e-15);
    for (const auto& g : state.groups) {
        double theta = g.eta * p.g_rms * std::sqrt(p.n_atoms) * *sol.q_ss;
        CHECK(g.z == doctest::Approx(-0.5 * std::cos(theta)).epsilon(1e-12));
        CHECK(g.s.imag() == doctest::Approx(-0.5 * std::sin(theta)).epsilon(1e-12));
        CHECK(g.s.real() == doctest::Approx(0.0));
    }
    CHECK(weighted_inversion(state) == doctest::Approx(*sol.j_z_weighted).epsilon(1e-9));
}

TEST_CASE("finite-time threshold sits above the stationary ones") {
    PhysicalParams p;
    EnsembleGrid grid = ensemble_grid(20, 40, p);
    double rc = dynamic_critical(p, grid);
    CHECK(rc == doctest::Approx(0.7104).epsilon(5e-3));
}

TEST_CASE("threshold table lists every regime with its reference") {
    PhysicalParams p;
    EnsembleGrid grid = ensemble_grid(20, 40, p);
    auto rows = critical_table(p, grid, false);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].label == "ideal, uniform coupling");
    CHECK(rows[0].value == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(rows[0].reference == doctest::Approx(1.0));
    CHECK(rows[1].value == doctest::Approx(0.8228816917).epsilon(1e-6));
    CHECK(rows[2].value == doctest::Approx(0.7071067812).epsilon(1e-6));
    CHECK(rows[3].value == doctest::Approx(0.6005662120).epsilon(1e-6));
    CHECK(rows[4].value == doctest::Approx(0.261157).epsilon(1e-4));
    for (const auto& row : rows)
        CHECK(std::abs(row.value - row.reference) < 0.011);
}
