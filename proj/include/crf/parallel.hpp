#pragma once
#include <cstddef>
#include <vector>

#ifdef CRF_HAVE_OPENMP
#include <omp.h>
#endif

namespace crf {

// Execution mode for the data-parallel kernels. Serial is the reference
// implementation; Parallel forces OpenMP; Auto picks Parallel only for
// problem sizes where the fork/join overhead pays off. All three produce
// bitwise-identical results (see blocked_sum).
enum class ExecMode { Serial, Parallel, Auto };

inline constexpr std::size_t parallel_threshold = 4096;

inline bool run_parallel(ExecMode mode, std::size_t n) {
#ifdef CRF_HAVE_OPENMP
    switch (mode) {
        case ExecMode::Serial: return false;
        case ExecMode::Parallel: return true;
        case ExecMode::Auto: return n >= parallel_threshold;
    }
    return false;
#else
    (void)mode;
    (void)n;
    return false;
#endif
}

inline int max_threads() {
#ifdef CRF_HAVE_OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int n) {
#ifdef CRF_HAVE_OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

namespace detail {
inline constexpr std::size_t sum_block = 1024;
}

// Deterministic blocked reduction: partial sums over fixed-size blocks are
// computed (in parallel when it pays) and then combined in block order. The
// summation tree therefore does not depend on the thread count, and serial
// and parallel runs give bitwise-identical results.
template <class Term>
double blocked_sum(std::size_t n, Term&& term, ExecMode mode = ExecMode::Auto) {
    const std::size_t nb = (n + detail::sum_block - 1) / detail::sum_block;
    if (nb <= 1 || !run_parallel(mode, n)) {
        double total = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const std::size_t hi = std::min(n, (b + 1) * detail::sum_block);
            double part = 0.0;
            for (std::size_t i = b * detail::sum_block; i < hi; ++i) part += term(i);
            total += part;
        }
        return total;
    }
    std::vector<double> parts(nb, 0.0);
#ifdef CRF_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long b = 0; b < static_cast<long long>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * detail::sum_block;
        const std::size_t hi = std::min(n, lo + detail::sum_block);
        double part = 0.0;
        for (std::size_t i = lo; i < hi; ++i) part += term(i);
        parts[static_cast<std::size_t>(b)] = part;
    }
    double total = 0.0;
    for (double part : parts) total += part;
    return total;
}

// Two-component variant (one pass for e.g. the real and imaginary part of a
// complex reduction). Same determinism guarantee as blocked_sum.
template <class Term>
void blocked_sum2(std::size_t n, Term&& term, double& out_a, double& out_b,
                  ExecMode mode = ExecMode::Auto) {
    const std::size_t nb = (n + detail::sum_block - 1) / detail::sum_block;
    if (nb <= 1 || !run_parallel(mode, n)) {
        double ta = 0.0, tb = 0.0;
        for (std::size_t b = 0; b < nb; ++b) {
            const std::size_t hi = std::min(n, (b + 1) * detail::sum_block);
            double pa = 0.0, pb = 0.0;
            for (std::size_t i = b * detail::sum_block; i < hi; ++i) term(i, pa, pb);
            ta += pa;
            tb += pb;
        }
        out_a = ta;
        out_b = tb;
        return;
    }
    std::vector<double> parts_a(nb, 0.0), parts_b(nb, 0.0);
#ifdef CRF_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long b = 0; b < static_cast<long long>(nb); ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * detail::sum_block;
        const std::size_t hi = std::min(n, lo + detail::sum_block);
        double pa = 0.0, pb = 0.0;
        for (std::size_t i = lo; i < hi; ++i) term(i, pa, pb);
        parts_a[static_cast<std::size_t>(b)] = pa;
        parts_b[static_cast<std::size_t>(b)] = pb;
    }
    double ta = 0.0, tb = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        ta += parts_a[b];
        tb += parts_b[b];
    }
    out_a = ta;
    out_b = tb;
}

// Element-wise parallel map over [0, n) with independent writes (no reduction,
// so determinism is trivial).
template <class Body>
void parallel_for(std::size_t n, Body&& body, ExecMode mode = ExecMode::Auto) {
    if (!run_parallel(mode, n)) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
#ifdef CRF_HAVE_OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        body(static_cast<std::size_t>(i));
}

} // namespace crf
