#pragma once
#include <string>

#include "crf/units.hpp"

namespace crf {

// Physical rates of the driven atom-cavity system; the single source of truth
// for every other module. All frequencies are angular (rad/s); see units.hpp
// for the serialization convention.
struct PhysicalParams {
    double kappa = from_2pi_hz(153e3);     // cavity FWHM linewidth
    double gamma = from_2pi_hz(7.5e3);     // atomic spontaneous decay rate
    double g_rms = from_2pi_hz(7.8e3);     // r.m.s. single-atom coupling
    double n_atoms = 1e4;                  // effective atom number N
    double delta_ca = 0.0;                 // cavity-atom detuning
    double trap_depth_ratio = 6.34;        // U0/(kB T): Stark-shift power-law exponent
    double delta_max = from_2pi_hz(125e3); // maximum AC-Stark shift
};

// Throws DomainError unless kappa > 0, gamma >= 0, g_rms > 0, n_atoms >= 1,
// delta_max >= 0 and trap_depth_ratio > 1.
void validate(const PhysicalParams& p);

struct DerivedParams {
    double cooperativity;    // C = 4 g^2 / (kappa * gamma); +inf when gamma = 0
    double gamma_collective; // Gamma = 4 g^2 / kappa
    double omega_c_h;        // Omega_c^h = 2 N g^2 / kappa (= N C gamma / 2)
    double vrs;              // vacuum Rabi splitting 2 g sqrt(N)
    double alpha_empty;      // |alpha * sqrt(N)| per unit drive: 1 / (2 g)
};

DerivedParams derive_params(const PhysicalParams& p);

enum class DriveShape { Quench, Ramp, Constant };

std::string to_string(DriveShape shape);
DriveShape drive_shape_from_string(const std::string& name);

// Time-dependent drive schedule. t_hold is the TOTAL drive duration; a Ramp
// rises linearly over [0, t_ramp] and stays at omega_d until t_hold.
struct DriveProtocol {
    DriveShape shape = DriveShape::Ramp;
    double omega_d = 0.0; // target Rabi drive (rad/s)
    double t_ramp = 0.0;  // linear-rise duration (s); must be 0 for Quench
    double t_hold = 0.0;  // total drive duration (s)
};

// Throws DomainError unless 0 <= t_ramp <= t_hold, omega_d >= 0, and the
// ramp duration is zero for Quench/Constant shapes.
void validate(const DriveProtocol& proto);

// Omega_d(t). Throws DomainError for t outside [0, t_hold].
double drive_amplitude(const DriveProtocol& proto, double t);

} // namespace crf
