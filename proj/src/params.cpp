#include "crf/params.hpp"

#include <cmath>
#include <limits>

#include "crf/errors.hpp"

namespace crf {

void validate(const PhysicalParams& p) {
    if (!(p.kappa > 0.0)) throw DomainError("kappa must be > 0");
    if (!(p.gamma >= 0.0)) throw DomainError("gamma must be >= 0");
    if (!(p.g_rms > 0.0)) throw DomainError("g_rms must be > 0");
    if (!(p.n_atoms >= 1.0)) throw DomainError("n_atoms must be >= 1");
    if (!(p.delta_max >= 0.0)) throw DomainError("delta_max must be >= 0");
    if (!(p.trap_depth_ratio > 1.0)) throw DomainError("trap_depth_ratio must be > 1");
    if (!std::isfinite(p.kappa) || !std::isfinite(p.gamma) || !std::isfinite(p.g_rms) ||
        !std::isfinite(p.n_atoms) || !std::isfinite(p.delta_ca) ||
        !std::isfinite(p.trap_depth_ratio) || !std::isfinite(p.delta_max))
        throw DomainError("physical parameters must be finite");
}

DerivedParams derive_params(const PhysicalParams& p) {
    validate(p);
    DerivedParams d{};
    const double g2 = p.g_rms * p.g_rms;
    d.cooperativity = p.gamma > 0.0 ? 4.0 * g2 / (p.kappa * p.gamma)
                                    : std::numeric_limits<double>::infinity();
    d.gamma_collective = 4.0 * g2 / p.kappa;
    d.omega_c_h = 2.0 * p.n_atoms * g2 / p.kappa;
    d.vrs = 2.0 * p.g_rms * std::sqrt(p.n_atoms);
    d.alpha_empty = 1.0 / (2.0 * p.g_rms);
    return d;
}

std::string to_string(DriveShape shape) {
    switch (shape) {
        case DriveShape::Quench: return "Quench";
        case DriveShape::Ramp: return "Ramp";
        case DriveShape::Constant: return "Constant";
    }
    throw DomainError("unknown drive shape");
}

DriveShape drive_shape_from_string(const std::string& name) {
    if (name == "Quench" || name == "quench") return DriveShape::Quench;
    if (name == "Ramp" || name == "ramp") return DriveShape::Ramp;
    if (name == "Constant" || name == "constant") return DriveShape::Constant;
    throw SpecError("unknown drive shape '" + name + "' (expected Quench, Ramp or Constant)");
}

void validate(const DriveProtocol& proto) {
    if (!(proto.omega_d >= 0.0) || !std::isfinite(proto.omega_d))
        throw DomainError("omega_d must be finite and >= 0");
    if (!(proto.t_ramp >= 0.0) || !(proto.t_hold >= proto.t_ramp))
        throw DomainError("drive protocol needs 0 <= t_ramp <= t_hold");
    if (proto.shape != DriveShape::Ramp && proto.t_ramp != 0.0)
        throw DomainError("t_ramp must be 0 unless shape is Ramp");
}

double drive_amplitude(const DriveProtocol& proto, double t) {
    if (t < 0.0 || t > proto.t_hold)
        throw DomainError("drive_amplitude: t outside [0, t_hold]");
    switch (proto.shape) {
        case DriveShape::Quench:
        case DriveShape::Constant:
            return proto.omega_d;
        case DriveShape::Ramp:
            if (t < proto.t_ramp) return proto.omega_d * (t / proto.t_ramp);
            return proto.omega_d;
    }
    throw DomainError("unknown drive shape");
}

} // namespace crf
