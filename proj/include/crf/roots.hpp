#pragma once
#include <functional>
#include <utility>
#include <vector>

namespace crf {

// Bracketed root finding (Brent's method). f(lo) and f(hi) must have opposite
// signs; throws DomainError otherwise. Converges to |interval| < tol.
double brent_root(const std::function<double(double)>& f, double lo, double hi,
                  double tol = 1e-12, int max_iter = 200);

// Golden-section maximizer on [lo, hi] for a unimodal function. Returns the
// maximizing argument to within arg_tol.
double golden_max(const std::function<double(double)>& f, double lo, double hi,
                  double arg_tol = 1e-10);

struct QuadratureRule {
    std::vector<double> nodes;   // on [-1, 1]
    std::vector<double> weights;
};

// Gauss-Legendre nodes and weights on [-1, 1], computed by Newton iteration
// on the Legendre polynomial. Exact for polynomials up to degree 2n-1.
QuadratureRule gauss_legendre(int n);

// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
double gauss_legendre_integrate(const std::function<double(double)>& f, double a,
                                double b, int n);

} // namespace crf
