#pragma once

// Complex Laurent series truncated to finite coefficient windows: the carrier
// for every series computation in the toolkit.
//
// Exactness semantics: a series carries an interval [xlo, xhi] (with +-inf
// sentinels) of indices whose stored coefficients are trusted, relative to the
// context tolerance. Tails that are certified negligible (theta windows and
// their products) count as exact; clipping that drops significant mass narrows
// the interval and raises the `lossy` flag.

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <vector>

#include "core.hpp"

namespace qstokes {

constexpr int kExactInf = 1 << 28;   // exactness sentinel
constexpr int kValInf = 1 << 28;     // valuation of the (numerically) zero series

struct WindowedLaurent {
    int lo = 0;
    int hi = -1;                  // lo > hi encodes the empty (zero) series
    std::vector<cplx> c;          // coefficient n lives at c[n - lo]
    int xlo = -kExactInf;
    int xhi = kExactInf;
    bool lossy = false;

    bool empty() const { return lo > hi; }

    cplx at(int n) const {
        if (n < lo || n > hi) return cplx(0);
        return c[static_cast<size_t>(n - lo)];
    }

    void set(int n, cplx v) {
        if (n < lo || n > hi) throw validation_error("WindowedLaurent::set: index outside window");
        c[static_cast<size_t>(n - lo)] = v;
    }
};

inline WindowedLaurent series_zero() { return WindowedLaurent{}; }

inline WindowedLaurent make_series(int lo, std::vector<cplx> coeffs) {
    WindowedLaurent f;
    f.lo = lo;
    f.hi = lo + static_cast<int>(coeffs.size()) - 1;
    f.c = std::move(coeffs);
    for (const cplx& v : f.c)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw validation_error("make_series: non-finite coefficient");
    return f;
}

inline WindowedLaurent monomial(int n, cplx v) { return make_series(n, {v}); }
inline WindowedLaurent constant(cplx v) { return monomial(0, v); }

inline real max_abs(const WindowedLaurent& f) {
    real m = 0;
    for (const cplx& v : f.c) m = std::max(m, std::abs(v));
    return m;
}

namespace detail {

inline int sat_add(int a, int b) {
    if (a <= -kExactInf || b <= -kExactInf) return -kExactInf;
    if (a >= kExactInf || b >= kExactInf) return kExactInf;
    long long s = static_cast<long long>(a) + b;
    if (s >= kExactInf) return kExactInf;
    if (s <= -kExactInf) return -kExactInf;
    return static_cast<int>(s);
}

}  // namespace detail

inline WindowedLaurent add(const WindowedLaurent& f, const WindowedLaurent& g) {
    if (f.empty()) return g;
    if (g.empty()) return f;
    WindowedLaurent r;
    r.lo = std::min(f.lo, g.lo);
    r.hi = std::max(f.hi, g.hi);
    r.c.assign(static_cast<size_t>(r.hi - r.lo + 1), cplx(0));
    for (int n = r.lo; n <= r.hi; ++n) r.c[static_cast<size_t>(n - r.lo)] = f.at(n) + g.at(n);
    r.xlo = std::max(f.xlo, g.xlo);
    r.xhi = std::min(f.xhi, g.xhi);
    r.lossy = f.lossy || g.lossy;
    return r;
}

inline WindowedLaurent scale(const WindowedLaurent& f, cplx s) {
    WindowedLaurent r = f;
    for (cplx& v : r.c) v *= s;
    return r;
}

inline WindowedLaurent neg(const WindowedLaurent& f) { return scale(f, cplx(-1)); }

inline WindowedLaurent sub(const WindowedLaurent& f, const WindowedLaurent& g) {
    return add(f, neg(g));
}

// Multiply by z^k. Window shifts; never clips.
inline WindowedLaurent shift(const WindowedLaurent& f, int k) {
    WindowedLaurent r = f;
    if (r.empty()) return r;
    r.lo += k;
    r.hi += k;
    r.xlo = detail::sat_add(r.xlo, k);
    r.xhi = detail::sat_add(r.xhi, k);
    return r;
}

// Product with the window clipped to [-N, N]. Dropped coefficients set the
// lossy flag; if they carry significant mass the exactness interval shrinks to
// the clip edge.
inline WindowedLaurent mul(const QContext& ctx, const WindowedLaurent& f, const WindowedLaurent& g) {
    if (f.empty() || g.empty()) return series_zero();
    const int N = ctx.window_halfwidth;
    const int slo = f.lo + g.lo, shi = f.hi + g.hi;
    const int rlo = std::max(slo, -N), rhi = std::min(shi, N);

    WindowedLaurent r;
    // A factor's unknown region (outside its exactness interval) contaminates
    // the product through the other factor's support edges.
    r.xlo = std::max(detail::sat_add(f.xlo, g.hi), detail::sat_add(g.xlo, f.hi));
    r.xhi = std::min(detail::sat_add(f.xhi, g.lo), detail::sat_add(g.xhi, f.lo));
    r.lossy = f.lossy || g.lossy;
    if (rlo > rhi) {
        // everything clipped away
        r.lossy = true;
        return r;
    }
    r.lo = rlo;
    r.hi = rhi;
    r.c.assign(static_cast<size_t>(rhi - rlo + 1), cplx(0));

    real kept_scale = 0, dropped_lo = 0, dropped_hi = 0;
    for (int n = slo; n <= shi; ++n) {
        cplx acc(0);
        const int i0 = std::max(f.lo, n - g.hi), i1 = std::min(f.hi, n - g.lo);
        for (int i = i0; i <= i1; ++i) acc += f.c[static_cast<size_t>(i - f.lo)] * g.at(n - i);
        if (n < rlo)
            dropped_lo = std::max(dropped_lo, std::abs(acc));
        else if (n > rhi)
            dropped_hi = std::max(dropped_hi, std::abs(acc));
        else {
            r.c[static_cast<size_t>(n - rlo)] = acc;
            kept_scale = std::max(kept_scale, std::abs(acc));
        }
    }
    if (slo < rlo || shi > rhi) {
        r.lossy = true;
        const real sig = ctx.tol * std::max(kept_scale, static_cast<real>(1e-300L));
        if (dropped_lo > sig) r.xlo = std::max(r.xlo, rlo);
        if (dropped_hi > sig) r.xhi = std::min(r.xhi, rhi);
    }
    return r;
}

// sigma_q^m: coefficient n picks up the factor q^{mn}; window unchanged.
inline WindowedLaurent sigma_q(const QContext& ctx, const WindowedLaurent& f, int m = 1) {
    WindowedLaurent r = f;
    for (int n = r.lo; n <= r.hi; ++n)
        r.c[static_cast<size_t>(n - r.lo)] *= qpow(ctx, static_cast<long long>(m) * n);
    return r;
}

// Window-relative valuation: least n with |c_n| > tol * max|c|; kValInf when
// every coefficient sits below the threshold.
inline int valuation(const WindowedLaurent& f, real tol) {
    const real thr = tol * max_abs(f);
    for (int n = f.lo; n <= f.hi; ++n)
        if (std::abs(f.at(n)) > thr && max_abs(f) > 0) return n;
    return kValInf;
}

// Horner evaluation, split between the z and 1/z halves of the window.
inline cplx evaluate(const WindowedLaurent& f, cplx z) {
    if (std::abs(z) == 0.0L) throw validation_error("evaluate: z must be nonzero");
    if (f.empty()) return cplx(0);

    cplx pos(0);  // sum over n >= 0
    for (int n = f.hi; n >= std::max(f.lo, 0); --n) pos = pos * z + f.at(n);
    for (int n = 0; n < f.lo; ++n) pos *= z;  // window entirely above 0

    cplx negacc(0);  // sum over n < 0, Horner in 1/z
    if (f.lo < 0) {
        const cplx w = cplx(1) / z;
        for (int n = f.lo; n <= std::min(f.hi, -1); ++n) negacc = negacc * w + f.at(n);
        for (int n = std::min(f.hi, -1); n < -1; ++n) negacc *= w;
        negacc *= w;
    }
    cplx val = pos + negacc;
    if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
        // locate the largest offender for the report
        int bad = f.lo;
        real best = -1;
        const real lz = std::log(std::abs(z));
        for (int n = f.lo; n <= f.hi; ++n) {
            const real a = std::abs(f.at(n));
            if (a == 0.0L) continue;
            const real mag = std::log(a) + static_cast<real>(n) * lz;
            if (mag > best) { best = mag; bad = n; }
        }
        throw numeric_error("evaluate: evaluation overflow at index " + std::to_string(bad));
    }
    return val;
}

// Largest |f_n - g_n| over the trusted part of the union support: indices
// lying in both exactness intervals count, absent coefficients read as zero.
inline real max_diff_on_exact(const WindowedLaurent& f, const WindowedLaurent& g) {
    if (f.empty() && g.empty()) return 0;
    const int slo = f.empty() ? g.lo : (g.empty() ? f.lo : std::min(f.lo, g.lo));
    const int shi = f.empty() ? g.hi : (g.empty() ? f.hi : std::max(f.hi, g.hi));
    const int a = std::max({slo, f.xlo, g.xlo});
    const int b = std::min({shi, f.xhi, g.xhi});
    real m = 0;
    for (int n = a; n <= b; ++n) m = std::max(m, std::abs(f.at(n) - g.at(n)));
    return m;
}

}  // namespace qstokes
