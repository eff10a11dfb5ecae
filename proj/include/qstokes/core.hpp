#pragma once

// Shared context and error taxonomy for the qstokes toolkit.
//
// Coefficients are extended-precision complex numbers: formal gauges in this
// domain have q-Gevrey growth (|q|^{n^2/2}), which exceeds double range well
// inside the coefficient windows we care about.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qstokes {

using real = long double;
using cplx = std::complex<real>;

// Input/shape violations. CLI maps these to exit code 2.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Mathematically meaningful refusals: prohibited divisors, borderline
// certifications, inconclusive classifications. CLI exit code 3.
struct refusal_error : std::runtime_error {
    explicit refusal_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numeric breakdowns: overflow, non-convergence, near-resonance. Exit code 4.
struct numeric_error : std::runtime_error {
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct QContext {
    cplx q;
    int window_halfwidth = 40;  // coefficient windows live in [-N, N]
    real tol = 1e-10L;          // default relative tolerance

    QContext(cplx q_, int halfwidth = 40, real tolerance = 1e-10L)
        : q(q_), window_halfwidth(halfwidth), tol(tolerance) {
        if (!(std::abs(q) > 1.0L + 1e-6L))
            throw validation_error("QContext: |q| must exceed 1 + 1e-6, got |q| = " +
                                   std::to_string(static_cast<double>(std::abs(q))));
        if (window_halfwidth < 4)
            throw validation_error("QContext: window halfwidth must be >= 4");
        if (!(tol > 0.0L) || !std::isfinite(tol))
            throw validation_error("QContext: tolerance must be a positive finite number");
    }

    real abs_q() const { return std::abs(q); }
    real log_abs_q() const { return std::log(std::abs(q)); }
};

// q^e for integer e, kept in extended precision.
inline cplx qpow(const QContext& ctx, long long e) {
    return std::pow(ctx.q, static_cast<real>(e));
}

// q^{-n(n+1)/2}-style weights show up everywhere; exponents are formed in
// long long to keep n ~ 10^4 safe.
inline long long tri(long long n) { return n * (n + 1) / 2; }       // n(n+1)/2
inline long long tri_down(long long n) { return n * (n - 1) / 2; }  // n(n-1)/2

}  // namespace qstokes
