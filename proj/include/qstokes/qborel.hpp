#pragma once

// Formal q-Borel-Ramis transforms and the obstruction invariant nu. At level d
// the transform rescales coefficients by q^{-d n(n-1)/2}, turning q-Gevrey
// growth into superfast decay.

#include "laurent.hpp"

namespace qstokes {

inline WindowedLaurent qborel(const QContext& ctx, const WindowedLaurent& f, int level = 1) {
    if (level < 1) throw validation_error("qborel: level must be a positive integer");
    WindowedLaurent r = f;
    for (int n = r.lo; n <= r.hi; ++n)
        r.c[static_cast<size_t>(n - r.lo)] *= qpow(ctx, -static_cast<long long>(level) * tri_down(n));
    return r;
}

namespace detail {

// Certifies that the out-of-window tail of a weighted sum stays below
// tol_scale, extrapolating geometrically from the edge term with the given
// outward step ratio. Fails when the ratio does not contract.
inline bool certify_weighted_tail(real edge_term, real step_ratio, real tol_scale) {
    if (edge_term <= tol_scale) return true;
    if (!(step_ratio < 0.75L)) return false;
    return edge_term * step_ratio / (1.0L - step_ratio) <= tol_scale;
}

// Outward ratio of consecutive weights |q|^{-d m(m-1)/2 - r m} at the window
// edge, with a |q|^{d/2} growth allowance for the unseen coefficients.
inline real weight_step_ratio(const QContext& ctx, int level, int residue, long long m_edge,
                              bool high_side) {
    const real e = high_side
                       ? (-static_cast<real>(level) * m_edge - residue + 0.5L * level)
                       : (static_cast<real>(level) * (m_edge - 1) + residue + 0.5L * level);
    return std::exp(e * ctx.log_abs_q());
}

}  // namespace detail

// Obstruction scalar of the scalar model equation on the residue-class
// subsequence u_{r + m d}: sum_m (q^d)^{-m(m-1)/2} q^{-r m} u_{r+md}. For
// (d, r) = (1, 0) this is the q-Borel transform evaluated at 1.
//
// Only trusted coefficients enter the sum. When the exactness interval is
// finite on a side (the series truncates an unseen germ there) the unseen
// weighted tail must certify below tolerance, else the window is too small.
inline cplx nu_invariant(const QContext& ctx, const WindowedLaurent& u, int level = 1,
                         int residue = 0) {
    if (level < 1) throw validation_error("nu_invariant: level must be a positive integer");
    if (residue < 0 || residue >= level)
        throw validation_error("nu_invariant: residue must lie in [0, level)");
    if (u.empty()) return cplx(0);

    const int lo = std::max(u.lo, u.xlo), hi = std::min(u.hi, u.xhi);
    cplx acc(0);
    real max_term = 0, first_term = -1, last_term = 0;
    long long m_first = 0, m_last = 0;
    for (int n = lo; n <= hi; ++n) {
        if (((n - residue) % level + level) % level != 0) continue;
        const long long m = (static_cast<long long>(n) - residue) / level;
        const cplx term = qpow(ctx, -level * tri_down(m) - static_cast<long long>(residue) * m) * u.at(n);
        acc += term;
        const real mag = std::abs(term);
        max_term = std::max(max_term, mag);
        if (first_term < 0) { first_term = mag; m_first = m; }
        last_term = mag;
        m_last = m;
    }
    const real tol_scale = ctx.tol * std::max(max_term, static_cast<real>(1e-300L));
    if (u.xlo > -kExactInf && first_term >= 0 &&
        !detail::certify_weighted_tail(first_term,
                                       detail::weight_step_ratio(ctx, level, residue, m_first, false),
                                       tol_scale))
        throw numeric_error("nu_invariant: window too small (weighted tail above tolerance)");
    if (u.xhi < kExactInf && first_term >= 0 &&
        !detail::certify_weighted_tail(last_term,
                                       detail::weight_step_ratio(ctx, level, residue, m_last, true),
                                       tol_scale))
        throw numeric_error("nu_invariant: window too small (weighted tail above tolerance)");
    return acc;
}

}  // namespace qstokes
