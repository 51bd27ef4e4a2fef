#include "doctest.h"

#include <cmath>

#include "crf/errors.hpp"
#include "crf/params.hpp"

using namespace crf;

TEST_CASE("derived quantities at default parameters") {
    PhysicalParams p;
    DerivedParams d = derive_params(p);

    // C = 4 g^2 / (kappa gamma) with the default rates
    CHECK(d.cooperativity == doctest::Approx(0.2120784).epsilon(1e-6));
    // Gamma = 4 g^2 / kappa
    CHECK(to_2pi_hz(d.gamma_collective) == doctest::Approx(1590.588235).epsilon(1e-9));
    // Omega_c^h = 2 N g^2 / kappa
    CHECK(to_2pi_hz(d.omega_c_h) == doctest::Approx(7952941.176).epsilon(1e-9));
    // the two expressions for the critical drive agree
    CHECK(d.omega_c_h ==
          doctest::Approx(p.n_atoms * d.cooperativity * p.gamma / 2.0).epsilon(1e-12));
    CHECK(to_2pi_hz(d.vrs) == doctest::Approx(2.0 * 7800.0 * 100.0).epsilon(1e-12));
    CHECK(d.alpha_empty == doctest::Approx(1.0 / (2.0 * p.g_rms)).epsilon(1e-12));
}

TEST_CASE("cooperativity is infinite without spontaneous emission") {
    PhysicalParams p;
    p.gamma = 0.0;
    CHECK(std::isinf(derive_params(p).cooperativity));
}

TEST_CASE("parameter validation rejects unphysical values") {
    PhysicalParams p;
    CHECK_NOTHROW(validate(p));

    PhysicalParams bad = p;
    bad.kappa = 0.0;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = p;
    bad.gamma = -1.0;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = p;
    bad.g_rms = 0.0;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = p;
    bad.n_atoms = 0.5;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = p;
    bad.delta_max = -1.0;
    CHECK_THROWS_AS(validate(bad), DomainError);
    bad = p;
    bad.trap_depth_ratio = 1.0;
    CHECK_THROWS_AS(validate(bad), DomainError);
}

TEST_CASE("unit helpers convert both ways") {
    CHECK(to_2pi_hz(from_2pi_hz(153e3)) == doctest::Approx(153e3).epsilon(1e-15));
    CHECK(from_2pi_hz(1.0) == doctest::Approx(two_pi).epsilon(1e-15));
}

TEST_CASE("drive schedule follows the protocol shape") {
    DriveProtocol ramp;
    ramp.shape = DriveShape::Ramp;
    ramp.omega_d = 10.0;
    ramp.t_ramp = 4.0;
    ramp.t_hold = 10.0;
    validate(ramp);
    CHECK(drive_amplitude(ramp, 0.0) == doctest::Approx(0.0));
    CHECK(drive_amplitude(ramp, 2.0) == doctest::Approx(5.0));
    CHECK(drive_amplitude(ramp, 4.0) == doctest::Approx(10.0));
    CHECK(drive_amplitude(ramp, 9.0) == doctest::Approx(10.0));

    DriveProtocol quench;
    quench.shape = DriveShape::Quench;
    quench.omega_d = 10.0;
    quench.t_hold = 5.0;
    validate(quench);
    CHECK(drive_amplitude(quench, 0.0) == doctest::Approx(10.0));
    CHECK(drive_amplitude(quench, 5.0) == doctest::Approx(10.0));

    CHECK_THROWS_AS(drive_amplitude(quench, -1.0), DomainError);
    CHECK_THROWS_AS(drive_amplitude(quench, 5.1), DomainError);
}

TEST_CASE("protocol validation enforces ramp bounds") {
    DriveProtocol proto;
    proto.shape = DriveShape::Quench;
    proto.omega_d = 1.0;
    proto.t_ramp = 1.0;  // a quench cannot have a rise time
    proto.t_hold = 2.0;
    CHECK_THROWS_AS(validate(proto), DomainError);

    proto.shape = DriveShape::Ramp;
    proto.t_ramp = 3.0;  // longer than the total duration
    CHECK_THROWS_AS(validate(proto), DomainError);

    proto.t_ramp = 1.0;
    proto.omega_d = -1.0;
    CHECK_THROWS_AS(validate(proto), DomainError);
}

TEST_CASE("drive shape names round-trip") {
    for (DriveShape s :
         {DriveShape::Quench, DriveShape::Ramp, DriveShape::Constant})
        CHECK(drive_shape_from_string(to_string(s)) == s);
    CHECK_THROWS_AS(drive_shape_from_string("sawtooth"), SpecError);
}
