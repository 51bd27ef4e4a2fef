#include "crf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "crf/errors.hpp"
#include "crf/roots.hpp"

namespace crf {

namespace {

using Mat = Eigen::MatrixXcd;

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// column-major vec convention: vec(AρB) = (Bᵀ ⊗ A) vec(ρ)
Mat liouvillian_matrix(const Mat& h, const std::vector<Mat>& jumps) {
    const Eigen::Index d = h.rows();
    const Mat id = Mat::Identity(d, d);
    const cplx im{0.0, 1.0};
    Mat gen = -im * (kron(id, h) - kron(h.transpose(), id));
    for (const Mat& l : jumps) {
        const Mat ldl = l.adjoint() * l;
        gen += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) -
               0.5 * kron(ldl.transpose(), id);
    }
    return gen;
}

DensityMatrix hermitize_normalize(Mat rho) {
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-300)
        throw DegenerateNullSpaceError("density matrix has vanishing trace");
    rho /= tr;
    DensityMatrix dm;
    dm.dimension = static_cast<int>(rho.rows());
    dm.rho = std::move(rho);
    return dm;
}

} // namespace

DickeOperators dicke_operators(int n_atoms) {
    if (n_atoms < 1 || n_atoms > 200)
        throw DimensionError("dicke_operators: n_atoms must be in [1, 200]");
    const int d = n_atoms + 1;
    const double j = 0.5 * n_atoms;
    DickeOperators ops;
    ops.dimension = d;
    ops.j_minus = Mat::Zero(d, d);
    ops.j_z = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const double m = i - j;
        ops.j_z(i, i) = m;
        if (i > 0)  // ⟨m−1|Ĵ⁻|m⟩ = √(J(J+1) − m(m−1))
            ops.j_minus(i - 1, i) = std::sqrt(j * (j + 1.0) - m * (m - 1.0));
    }
    ops.j_plus = ops.j_minus.adjoint();
    ops.j_x = 0.5 * (ops.j_plus + ops.j_minus);
    return ops;
}

DensityDiagnostics check_density_matrix(const DensityMatrix& dm) {
    DensityDiagnostics diag;
    diag.hermiticity_defect =
        (dm.rho - dm.rho.adjoint()).cwiseAbs().maxCoeff();
    diag.trace_defect = std::abs(dm.rho.trace() - cplx(1.0, 0.0));
    const Eigen::SelfAdjointEigenSolver<Mat> es(
        (0.5 * (dm.rho + dm.rho.adjoint())).eval());
    diag.min_eigenvalue = es.eigenvalues().minCoeff();
    return diag;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    if (a.dimension != b.dimension)
        throw DimensionError("trace_distance: dimension mismatch");
    const Mat diff = 0.5 * ((a.rho - b.rho) + (a.rho - b.rho).adjoint());
    const Eigen::SelfAdjointEigenSolver<Mat> es(diff);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

CrfSolution crf_exact_steady_state(int n_atoms, double r) {
    if (!(r > 0.0))
        throw DomainError("crf_exact_steady_state: needs r > 0 (shift must be"
                          " invertible)");
    const DickeOperators ops = dicke_operators(n_atoms);
    const int d = ops.dimension;
    const double lambda = 0.5 * r * n_atoms;  // Ω_d/Γ
    const Mat shifted = ops.j_minus + cplx(0.0, lambda) * Mat::Identity(d, d);

    // The shifted operator is upper bidiagonal, so the solve needs no
    // pivoting and is componentwise stable even though the condition number
    // grows like (N/2λ)^N deep in the cooperative phase. The normalized
    // density matrix stays accurate; rcond is kept as a diagnostic only and
    // the gate below is operational (finite, positive-trace result).
    const Eigen::PartialPivLU<Mat> lu(shifted);
    const double rcond = lu.rcond();
    const Mat inv = lu.solve(Mat::Identity(d, d));
    const Mat unnormalized = inv * inv.adjoint();
    const double weight = unnormalized.real().trace();
    if (!inv.allFinite() || !unnormalized.allFinite() ||
        !(weight > 0.0 && std::isfinite(weight)))
        throw IllConditionedError("crf_exact_steady_state: inverse overflowed"
                                  " (drive too weak for this atom number)",
                                  rcond > 0.0 ? 1.0 / rcond : 0.0);
    CrfSolution sol;
    sol.rho = hermitize_normalize(unnormalized);
    sol.rcond = rcond;
    sol.jz_norm = 2.0 / n_atoms * (sol.rho.rho * ops.j_z).trace().real();
    sol.j_minus_exp = (sol.rho.rho * ops.j_minus).trace();
    sol.jx2 = (sol.rho.rho * ops.j_x * ops.j_x).trace().real();
    return sol;
}

double crf_generator_residual(int n_atoms, double r, const DensityMatrix& dm) {
    const DickeOperators ops = dicke_operators(n_atoms);
    if (dm.dimension != ops.dimension)
        throw DimensionError("crf_generator_residual: dimension mismatch");
    const double lambda = 0.5 * r * n_atoms;  // Γ = 1, Ω_d = λ
    const Mat h = 0.5 * lambda * (ops.j_plus + ops.j_minus);
    const cplx im{0.0, 1.0};
    const Mat jdj = ops.j_plus * ops.j_minus;
    const Mat drho = -im * (h * dm.rho - dm.rho * h) +
                     ops.j_minus * dm.rho * ops.j_plus -
                     0.5 * (jdj * dm.rho + dm.rho * jdj);
    return drho.norm() / dm.rho.norm();
}

LiouvillianSolution liouvillian_steady_state(int n_atoms, int n_max_photons,
                                             const PhysicalParams& p,
                                             double omega_d) {
    validate(p);
    if (n_atoms < 1 || n_atoms > 4)
        throw DimensionError("liouvillian_steady_state: n_atoms must be 1..4");
    if (n_max_photons < 1)
        throw DimensionError("liouvillian_steady_state: need n_max_photons >= 1");
    if (!(omega_d >= 0.0))
        throw DomainError("liouvillian_steady_state: omega_d must be >= 0");
    const int nf = n_max_photons + 1;
    if ((n_atoms + 1) * nf > 500)
        throw DimensionError(
            "liouvillian_steady_state: Dicke-sector dimension exceeds 500");

    const bool full_space = p.gamma > 0.0;
    const int na = full_space ? (1 << n_atoms) : (n_atoms + 1);
    const int dim = na * nf;
    // dense eigendecomposition of the (dim²)×(dim²) superoperator caps the
    // practical Hilbert dimension well below the formal 500
    if (dim * dim > 2500)
        throw DimensionError(
            "liouvillian_steady_state: superoperator too large for dense"
            " eigendecomposition (need dim^2 <= 2500)");

    // cavity operators, Fock basis 0..n_max
    Mat a_op = Mat::Zero(nf, nf);
    for (int n = 1; n < nf; ++n) a_op(n - 1, n) = std::sqrt(double(n));

    // atomic operators on the chosen atom space
    Mat jm_at, jz_at;
    std::vector<Mat> sm_at;  // individual lowering operators (γ>0 only)
    if (!full_space) {
        const DickeOperators ops = dicke_operators(n_atoms);
        jm_at = ops.j_minus;
        jz_at = ops.j_z;
    } else {
        Mat sm2 = Mat::Zero(2, 2);  // qubit basis {ground, excited}
        sm2(0, 1) = 1.0;
        Mat sz2 = Mat::Zero(2, 2);
        sz2(0, 0) = -0.5;
        sz2(1, 1) = 0.5;
        const Mat id2 = Mat::Identity(2, 2);
        jm_at = Mat::Zero(na, na);
        jz_at = Mat::Zero(na, na);
        for (int k = 0; k < n_atoms; ++k) {
            Mat op_m = Mat::Identity(1, 1), op_z = Mat::Identity(1, 1);
            for (int slot = 0; slot < n_atoms; ++slot) {
                op_m = kron(op_m, slot == k ? sm2 : id2);
                op_z = kron(op_z, slot == k ? sz2 : id2);
            }
            sm_at.push_back(op_m);
            jm_at += op_m;
            jz_at += op_z;
        }
    }

    const Mat id_at = Mat::Identity(na, na);
    const Mat id_f = Mat::Identity(nf, nf);
    const Mat a_full = kron(id_at, a_op);
    const Mat jm_full = kron(jm_at, id_f);
    const double drive = p.kappa * omega_d / (4.0 * p.g_rms);
    const cplx im{0.0, 1.0};
    Mat h = p.delta_ca * (a_full.adjoint() * a_full) +
            p.g_rms * (a_full * jm_full.adjoint() + a_full.adjoint() * jm_full) +
            im * drive * (a_full.adjoint() - a_full);

    std::vector<Mat> jumps;
    jumps.push_back(std::sqrt(p.kappa) * a_full);
    if (full_space)
        for (const Mat& sm : sm_at)
            jumps.push_back(std::sqrt(p.gamma) * kron(sm, id_f));

    const Mat gen = liouvillian_matrix(h, jumps);
    const double gen_norm = gen.norm();
    const Eigen::ComplexEigenSolver<Mat> es(gen);
    if (es.info() != Eigen::Success)
        throw ConvergenceError(
            "liouvillian_steady_state: eigendecomposition failed");

    Eigen::Index best = 0, second = 1;
    const auto& vals = es.eigenvalues();
    if (std::abs(vals(1)) < std::abs(vals(0))) std::swap(best, second);
    for (Eigen::Index i = 2; i < vals.size(); ++i) {
        if (std::abs(vals(i)) < std::abs(vals(best))) {
            second = best;
            best = i;
        } else if (std::abs(vals(i)) < std::abs(vals(second))) {
            second = i;
        }
    }
    if (!(std::abs(vals(best)) < 1e-8 * gen_norm))
        throw ConvergenceError(
            "liouvillian_steady_state: no null eigenvalue found");
    if (std::abs(vals(second)) < 1e-8 * gen_norm)
        throw DegenerateNullSpaceError(
            "liouvillian_steady_state: null space is degenerate");

    const Eigen::VectorXcd v = es.eigenvectors().col(best);
    const Mat rho_raw = Eigen::Map<const Mat>(v.data(), dim, dim);

    LiouvillianSolution sol;
    sol.rho_full = hermitize_normalize(rho_raw);
    sol.null_eigenvalue_mag = std::abs(vals(best)) / gen_norm;

    double top = 0.0;
    for (int at = 0; at < na; ++at)
        top += sol.rho_full.rho(at * nf + (nf - 1), at * nf + (nf - 1)).real();
    sol.top_fock_population = top;
    if (!(top < 1e-6))
        throw TruncationError(
            "liouvillian_steady_state: photon truncation inadequate", top);

    sol.rho_atoms.dimension = na;
    sol.rho_atoms.rho = Mat::Zero(na, na);
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j)
            for (int n = 0; n < nf; ++n)
                sol.rho_atoms.rho(i, j) += sol.rho_full.rho(i * nf + n, j * nf + n);
    sol.rho_field.dimension = nf;
    sol.rho_field.rho = Mat::Zero(nf, nf);
    for (int n = 0; n < nf; ++n)
        for (int m = 0; m < nf; ++m)
            for (int at = 0; at < na; ++at)
                sol.rho_field.rho(n, m) += sol.rho_full.rho(at * nf + n, at * nf + m);

    sol.a_exp = (sol.rho_full.rho * a_full).trace();
    sol.jz_norm = 2.0 / n_atoms * (sol.rho_atoms.rho * jz_at).trace().real();
    return sol;
}

namespace {

// ∫ f(cosθ, φ) sinθ dθ dφ by Gauss-Legendre in cosθ × trapezoid in φ
template <class F>
double sphere_integral(const F& f, int n_quad) {
    const QuadratureRule rule = gauss_legendre(n_quad);
    double total = 0.0;
    for (int i = 0; i < n_quad; ++i) {
        const double x = rule.nodes[static_cast<std::size_t>(i)];
        double phi_acc = 0.0;
        for (int k = 0; k < n_quad; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / n_quad;
            phi_acc += f(x, phi);
        }
        total += rule.weights[static_cast<std::size_t>(i)] * phi_acc *
                 (2.0 * std::numbers::pi / n_quad);
    }
    return total;
}

double unnormalized_p(double r, double cos_theta, double phi) {
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    const cplx field = sin_theta * std::exp(cplx(0.0, phi)) + cplx(0.0, r);
    return 1.0 / std::norm(field);
}

} // namespace

double SphericalDistribution::operator()(double theta, double phi) const {
    return unnormalized_p(r, std::cos(theta), phi) / normalization;
}

SphericalDistribution normal_phase_distribution(double r, int n_quad) {
    if (!(r > 1.0))
        throw DomainError("normal_phase_distribution: defined for r > 1");
    if (n_quad < 64)
        throw DomainError("normal_phase_distribution: need n_quad >= 64");
    auto z_of = [&](int n) {
        return sphere_integral(
            [&](double x, double phi) { return unnormalized_p(r, x, phi); }, n);
    };
    const double z1 = z_of(n_quad);
    const double z2 = z_of(2 * n_quad);
    if (std::abs(z2 - z1) > 1e-6 * std::abs(z2))
        throw ConvergenceError(
            "normal_phase_distribution: quadrature not converged");
    SphericalDistribution dist;
    dist.r = r;
    dist.normalization = z2;
    return dist;
}

NormalMoments normal_phase_moments(double r, int n_quad) {
    const SphericalDistribution dist = normal_phase_distribution(r, n_quad);
    const int n = 2 * n_quad;  // match the resolution the normalization passed at
    NormalMoments mom;
    mom.normalization_check = sphere_integral(
        [&](double x, double phi) {
            return unnormalized_p(r, x, phi) / dist.normalization;
        },
        n);
    // south pole θ=0 is the ground state: Jz/(N/2) = −cosθ
    mom.jz_norm = sphere_integral(
        [&](double x, double phi) {
            return -x * unnormalized_p(r, x, phi) / dist.normalization;
        },
        n);
    mom.jminus_sq_norm = sphere_integral(
        [&](double x, double phi) {
            return (1.0 - x * x) * unnormalized_p(r, x, phi) / dist.normalization;
        },
        n);
    return mom;
}

} // namespace crf
