#pragma once

// Jacobi theta series theta_q(z) = sum q^{-n(n+1)/2} z^n and its multiplicative
// translates theta_{q,c}(z) = theta_q(z/c), as coefficient windows and as
// robust point evaluations.

#include "laurent.hpp"

namespace qstokes {

inline cplx ipow(cplx b, long long e) {
    if (e < 0) return cplx(1) / ipow(b, -e);
    cplx r(1);
    while (e > 0) {
        if (e & 1) r *= b;
        b *= b;
        e >>= 1;
    }
    return r;
}

// Coefficient window of theta_{q,c}: coefficient n is q^{-n(n+1)/2} c^{-n}.
inline WindowedLaurent theta_coeffs(const QContext& ctx, cplx c = cplx(1)) {
    if (c == cplx(0)) throw validation_error("theta_coeffs: shift c must be nonzero");
    const int N = ctx.window_halfwidth;
    if (ctx.abs_q() < 1.5L && N < 80)
        throw validation_error("theta_coeffs: |q| < 1.5 requires a window halfwidth of at least 80");
    const real shift = std::log(std::abs(c)) / ctx.log_abs_q();
    if (std::abs(shift) > static_cast<real>(N) / 2)
        throw validation_error("theta_coeffs: shift is too far from the fundamental annulus for this window");

    std::vector<cplx> v(static_cast<size_t>(2 * N + 1));
    const cplx cinv = cplx(1) / c;
    real peak = 0;
    for (int n = -N; n <= N; ++n) {
        const cplx val = qpow(ctx, -tri(n)) * ipow(cinv, n);
        v[static_cast<size_t>(n + N)] = val;
        peak = std::max(peak, std::abs(val));
    }
    WindowedLaurent f = make_series(-N, std::move(v));
    const real edge = std::max(std::abs(f.at(-N)), std::abs(f.at(N)));
    if (edge > ctx.tol * peak) {  // truncation visible at this window
        f.xlo = -N;
        f.xhi = N;
        f.lossy = true;
    }
    return f;
}

// theta_{q,c}(z), evaluated by reducing z/c into the fundamental annulus with
// the functional equation theta(q^m x) = x^m q^{m(m-1)/2} theta(x). Stable for
// arguments far along the q-spirals (deep rays toward 0 included).
inline cplx theta_eval(const QContext& ctx, cplx c, cplx z) {
    if (std::abs(z) == 0.0L) throw validation_error("theta_eval: z must be nonzero");
    const cplx x = z / c;
    const long long m = static_cast<long long>(
        std::floor(std::log(std::abs(x)) / ctx.log_abs_q()));
    const cplx xr = x * qpow(ctx, -m);  // |xr| in [1, |q|) up to rounding

    const int N = ctx.window_halfwidth;
    cplx sum(0);
    for (int n = N; n >= -N; --n) sum += qpow(ctx, -tri(n)) * ipow(xr, n);
    return ipow(xr, m) * qpow(ctx, tri_down(m)) * sum;
}

}  // namespace qstokes
