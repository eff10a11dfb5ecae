#pragma once

// Normal polynomial forms: the pairwise reduction Red, the multi-block
// Birkhoff-Guenther induction, its extension to two-sided germs on (C*, 0),
// and the formal fixpoint gauge.
//
// Red solves the homological equation
//     (sigma_q F)(z^{-mu'} A') - (z^{-mu} A) F = V - U
// for the unique pair (F, V) with V supported on the d = mu - mu' degrees
// (mu', mu] (one slot per residue class of the coefficient recurrence) and F a
// convergent germ. The recurrence couples F-indices d apart, so it decouples
// into d scalar-model equations with base q^d; each is solved by the
// q-Borel-weighted tail sums, with the weights folded into the terms so that
// nothing q-Gevrey-sized is ever formed.

#include <vector>

#include "gauge.hpp"
#include "qborel.hpp"

namespace qstokes {

namespace detail {

inline CMat coef_at(const SeriesMatrix& m, int n) {
    CMat c(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) c(i, j) = m(i, j).at(n);
    return c;
}

// Assembles a SeriesMatrix from per-index coefficient matrices on [lo, hi],
// trimming all-zero edges. Exactness is the finite window: values beyond it
// are genuinely unknown (germs may grow).
inline SeriesMatrix from_coefs(int lo, const std::vector<CMat>& coefs, int rows, int cols) {
    SeriesMatrix m(rows, cols);
    const int hi = lo + static_cast<int>(coefs.size()) - 1;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            int a = lo, b = hi;
            while (a <= b && std::abs(coefs[static_cast<size_t>(a - lo)](i, j)) == 0.0L) ++a;
            while (b >= a && std::abs(coefs[static_cast<size_t>(b - lo)](i, j)) == 0.0L) --b;
            if (a > b) continue;
            std::vector<cplx> v;
            v.reserve(static_cast<size_t>(b - a + 1));
            for (int n = a; n <= b; ++n) v.push_back(coefs[static_cast<size_t>(n - lo)](i, j));
            WindowedLaurent f = make_series(a, std::move(v));
            f.xlo = lo;
            f.xhi = hi;
            m(i, j) = f;
        }
    return m;
}

inline SeriesMatrix mul_const_left(const CMat& a, const SeriesMatrix& m) {
    SeriesMatrix r(a.rows, m.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            WindowedLaurent acc;
            for (int k = 0; k < a.cols; ++k)
                if (a(i, k) != cplx(0) && !m(k, j).empty()) acc = add(acc, scale(m(k, j), a(i, k)));
            r(i, j) = acc;
        }
    return r;
}

inline SeriesMatrix mul_const_right(const SeriesMatrix& m, const CMat& a) {
    SeriesMatrix r(m.rows, a.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < a.cols; ++j) {
            WindowedLaurent acc;
            for (int k = 0; k < m.cols; ++k)
                if (a(k, j) != cplx(0) && !m(i, k).empty()) acc = add(acc, scale(m(i, k), a(k, j)));
            r(i, j) = acc;
        }
    return r;
}

inline SeriesMatrix sm_shift(const SeriesMatrix& m, int k) {
    SeriesMatrix r = m;
    for (auto& f : r.e) f = shift(f, k);
    return r;
}

// Geometric-mean successive ratio over the top (or bottom) quarter of the
// window, skipping sub-floor coefficients. Returns -1 when the tail is
// numerically zero.
inline real tail_ratio(const WindowedLaurent& f, bool positive_side) {
    if (f.empty()) return -1;
    const real floor_mag = 1e-280L * std::max(max_abs(f), static_cast<real>(1e-200L));
    const int span = f.hi - f.lo + 1;
    const int quarter = std::max(2, span / 4);
    real logsum = 0;
    int count = 0;
    if (positive_side) {
        for (int n = f.hi - quarter + 1; n < f.hi; ++n) {
            const real a = std::abs(f.at(n)), b = std::abs(f.at(n + 1));
            if (a > floor_mag && b > floor_mag) { logsum += std::log(b / a); ++count; }
        }
    } else {
        for (int n = f.lo; n < f.lo + quarter; ++n) {
            const real a = std::abs(f.at(n)), b = std::abs(f.at(n + 1));
            if (a > floor_mag && b > floor_mag) { logsum += std::log(a / b); ++count; }
        }
    }
    if (count == 0) return -1;
    return std::exp(logsum / count);
}

}  // namespace detail

enum class TailVerdict { converging, borderline, diverging };

// Ratio test against the |q|^{1/2} threshold. On the positive side this
// separates convergent germs from q-Gevrey divergence; on the negative side
// (toward z^{-inf}) a germ on (C*, 0) must decay faster than geometrically.
inline TailVerdict tail_verdict(const QContext& ctx, const WindowedLaurent& f, bool positive_side) {
    const real r = detail::tail_ratio(f, positive_side);
    if (r < 0) return TailVerdict::converging;  // numerically zero tail
    const real thr = positive_side ? std::sqrt(ctx.abs_q()) : 1.0L / std::sqrt(ctx.abs_q());
    if (r <= thr * 0.999L) return TailVerdict::converging;
    if (r <= thr * 1.25L) return TailVerdict::borderline;
    return TailVerdict::diverging;
}

struct RedResult {
    SeriesMatrix gauge;   // F, a convergent (two-sided) germ
    SeriesMatrix normal;  // V, supported on degrees (mu', mu]
    real residual;        // homological-equation residual, relative
};

inline RedResult red_pair(const QContext& ctx, int mu, const CMat& a, int mup, const CMat& ap,
                          const SeriesMatrix& u) {
    if (mu <= mup) throw validation_error("red_pair: need mu > mu'");
    if (a.rows != a.cols || ap.rows != ap.cols || u.rows != a.rows || u.cols != ap.rows)
        throw validation_error("red_pair: dimension mismatch");
    const int d = mu - mup;
    const int rows = u.rows, cols = u.cols;
    const int N = ctx.window_halfwidth;

    // trusted data window of U (empty input handled as all-zero); sides with
    // finite exactness truncate an unseen germ and need tail certification
    int wlo = kExactInf, whi = -kExactInf;
    bool lower_open = false, upper_open = false;
    for (const auto& f : u.e) {
        if (f.empty()) continue;
        wlo = std::min(wlo, std::max(f.lo, f.xlo));
        whi = std::max(whi, std::min(f.hi, f.xhi));
        lower_open = lower_open || f.xlo > -kExactInf;
        upper_open = upper_open || f.xhi < kExactInf;
    }
    if (wlo > whi) { wlo = mup + 1; whi = mu; }

    const CMat ainv = inverse(a, "red_pair");
    const CMat apinv = inverse(ap, "red_pair");
    const int pmax = (2 * N + std::abs(mu) + std::abs(mup)) / d + 4;
    std::vector<CMat> apw{CMat::identity(rows)}, anw{CMat::identity(rows)};
    std::vector<CMat> bpw{CMat::identity(cols)}, bnw{CMat::identity(cols)};
    for (int p = 1; p <= pmax; ++p) {
        apw.push_back(apw.back() * a);
        anw.push_back(anw.back() * ainv);
        bpw.push_back(bpw.back() * ap);
        bnw.push_back(bnw.back() * apinv);
    }
    const auto apow = [&](int e) -> const CMat& {
        return e >= 0 ? apw[static_cast<size_t>(e)] : anw[static_cast<size_t>(-e)];
    };
    const auto bpow = [&](int e) -> const CMat& {
        return e >= 0 ? bpw[static_cast<size_t>(e)] : bnw[static_cast<size_t>(-e)];
    };

    // slot matrices V_kappa, one residue class each
    std::vector<CMat> slot(static_cast<size_t>(d), CMat(rows, cols));
    std::vector<int> slot_kappa(static_cast<size_t>(d), 0);

    for (int r0 = 0; r0 < d; ++r0) {
        int kappa = mup + 1;
        while (((kappa - (r0 - mu)) % d + d) % d != 0) ++kappa;
        slot_kappa[static_cast<size_t>(r0)] = kappa;
        const long long m0 = (static_cast<long long>(kappa) + mu - r0) / d;

        // V_kappa = sum_i q^{-r0 i - d i(2 m0 + i - 1)/2} A^i U_n A'^{-i},
        // n = kappa + i d; the i = 0 term is U_kappa itself.
        CMat acc(rows, cols);
        real max_term = 0, first_term = -1, last_term = 0;
        long long m_first = 0, m_last = 0;
        for (int n = wlo; n <= whi; ++n) {
            if ((((n - kappa) % d) + d) % d != 0) continue;
            const long long i = (static_cast<long long>(n) - kappa) / d;
            const long long e = -static_cast<long long>(r0) * i - d * (i * (2 * m0 + i - 1)) / 2;
            const cplx w = qpow(ctx, e);
            const CMat un = detail::coef_at(u, n);
            real mag = 0;
            if (std::abs(w) > 0.0L) {
                const CMat term = w * (apow(static_cast<int>(i)) * un * bpow(static_cast<int>(-i)));
                acc = acc + term;
                mag = norm_inf(term);
            }
            max_term = std::max(max_term, mag);
            if (first_term < 0) { first_term = mag; m_first = m0 + i; }
            last_term = mag;
            m_last = m0 + i;
        }
        const real tol_scale = ctx.tol * std::max(max_term, static_cast<real>(1e-300L));
        if (lower_open && first_term >= 0 &&
            !detail::certify_weighted_tail(
                first_term, detail::weight_step_ratio(ctx, d, r0, m_first, false), tol_scale))
            throw numeric_error("red_pair: window too small (weighted obstruction tail above tolerance)");
        if (upper_open && first_term >= 0 &&
            !detail::certify_weighted_tail(
                last_term, detail::weight_step_ratio(ctx, d, r0, m_last, true), tol_scale))
            throw numeric_error("red_pair: window too small (weighted obstruction tail above tolerance)");
        slot[static_cast<size_t>(r0)] = acc;
    }

    // W = V - U as a coefficient lookup
    const auto w_at = [&](int n) -> CMat {
        CMat w = cplx(-1) * detail::coef_at(u, n);
        for (int r0 = 0; r0 < d; ++r0)
            if (slot_kappa[static_cast<size_t>(r0)] == n) w = w + slot[static_cast<size_t>(r0)];
        return w;
    };
    const int dlo = std::min(wlo, mup + 1), dhi = std::max(whi, mu);  // indices where W can live

    // gauge coefficients F_j on [-N, N], tail sums per residue class
    std::vector<CMat> fc(static_cast<size_t>(2 * N + 1), CMat(rows, cols));
    for (int j0 = -N; j0 <= N; ++j0) {
        const int r0 = ((j0 % d) + d) % d;
        const long long m = (static_cast<long long>(j0) - r0) / d;
        CMat x(rows, cols);
        if (m >= 0) {
            // x_m = sum_{j>=1} q^{-r0 j - d j(2m+j-1)/2} A^{j-1} W_n A'^{-j}, n = r0+(m+j)d-mu
            for (long long j = 1;; ++j) {
                const long long n = r0 + (m + j) * d - mu;
                if (n > dhi) break;
                if (n < dlo) continue;
                const long long e = -static_cast<long long>(r0) * j - d * (j * (2 * m + j - 1)) / 2;
                const cplx w = qpow(ctx, e);
                if (std::abs(w) == 0.0L) break;  // weights only shrink from here
                x = x + w * (apow(static_cast<int>(j - 1)) * w_at(static_cast<int>(n)) *
                             bpow(static_cast<int>(-j)));
            }
        } else {
            // x_m = -sum_{j>=0} q^{r0 j + d j(2m-j-1)/2} A^{-j-1} W_n A'^{j}, n = r0+(m-j)d-mu
            for (long long j = 0;; ++j) {
                const long long n = r0 + (m - j) * d - mu;
                if (n < dlo) break;
                if (n > dhi) continue;
                const long long e = static_cast<long long>(r0) * j + d * (j * (2 * m - j - 1)) / 2;
                const cplx w = qpow(ctx, e);
                if (std::abs(w) == 0.0L) break;
                x = x - w * (apow(static_cast<int>(-j - 1)) * w_at(static_cast<int>(n)) *
                             bpow(static_cast<int>(j)));
            }
        }
        fc[static_cast<size_t>(j0 + N)] = x;
    }

    RedResult out;
    out.gauge = detail::from_coefs(-N, fc, rows, cols);

    std::vector<CMat> vc(static_cast<size_t>(d));
    for (int r0 = 0; r0 < d; ++r0) vc[static_cast<size_t>(slot_kappa[static_cast<size_t>(r0)] - (mup + 1))] = slot[static_cast<size_t>(r0)];
    out.normal = detail::from_coefs(mup + 1, vc, rows, cols);
    for (auto& f : out.normal.e) { f.xlo = -kExactInf; f.xhi = kExactInf; }

    for (const auto& f : out.gauge.e)
        if (tail_verdict(ctx, f, true) == TailVerdict::diverging)
            throw numeric_error("red_pair: window too small (gauge fails the convergence ratio test)");

    // residual of the homological equation, on the trusted window
    const SeriesMatrix lhs = detail::sm_shift(
        detail::mul_const_right(sm_sigma(ctx, out.gauge), ap), -mup);
    const SeriesMatrix rhs = detail::sm_shift(detail::mul_const_left(a, out.gauge), -mu);
    const SeriesMatrix target = sm_sub(out.normal, u);
    const real scale = std::max({sm_norm(u), sm_norm(out.normal), static_cast<real>(1)});
    out.residual = sm_max_diff(sm_sub(lhs, rhs), target) / scale;
    return out;
}

struct NormalFormResult {
    GaugeElement gauge;
    BlockMatrix normal;  // V_{i,j} supported on degrees (mu_j, mu_i]
    real residual;       // || F[A_U] - A_V || relative, trusted window
};

namespace detail {

inline NormalFormResult normalize_blocks(const QContext& ctx, const BlockMatrix& u,
                                         bool reverse_sweep = false) {
    const BlockShape& s = u.shape;
    const int k = s.block_count();
    NormalFormResult out{GaugeElement(s), BlockMatrix(s), 0};

    for (int gap = 1; gap < k; ++gap)
        for (int step = 0; step + gap < k; ++step) {
            const int i = reverse_sweep ? (k - 1 - gap - step) : step;
            const int j = i + gap;
            SeriesMatrix rhs = u.at(i, j);
            for (int l = i + 1; l < j; ++l) {
                rhs = sm_add(rhs, sm_mul(ctx, sm_sigma(ctx, out.gauge.at(i, l)), u.at(l, j)));
                rhs = sm_sub(rhs, sm_mul(ctx, out.normal.at(i, l), out.gauge.at(l, j)));
            }
            RedResult red = red_pair(ctx, s.slopes[static_cast<size_t>(i)],
                                     s.constants[static_cast<size_t>(i)],
                                     s.slopes[static_cast<size_t>(j)],
                                     s.constants[static_cast<size_t>(j)], rhs);
            out.gauge.at(i, j) = red.gauge;
            out.normal.at(i, j) = red.normal;
        }

    const SeriesMatrix acted = gauge_action(ctx, out.gauge, system_matrix(u));
    const real scale = std::max(sm_norm(system_matrix(u)), static_cast<real>(1));
    out.residual = sm_max_diff(acted, system_matrix(out.normal)) / scale;
    return out;
}

}  // namespace detail

// Birkhoff-Guenther normal form of a canonical system over convergent germs.
// The induction at equal block gap is order-independent; `reverse_sweep`
// exists so tests can certify that.
inline NormalFormResult birkhoff_guenther(const QContext& ctx, const BlockMatrix& u,
                                          bool reverse_sweep = false) {
    for (const auto& blk : u.blocks)
        for (const auto& f : blk.e)
            if (tail_verdict(ctx, f, true) == TailVerdict::diverging)
                throw validation_error("birkhoff_guenther: block entry fails the convergence ratio test");
    return detail::normalize_blocks(ctx, u, reverse_sweep);
}

// Same normalization for blocks that are two-sided germs on (C*, 0); both
// coefficient tails must decay at the window edges.
inline NormalFormResult ocstar_normalize(const QContext& ctx, const BlockMatrix& u) {
    for (const auto& blk : u.blocks)
        for (const auto& f : blk.e) {
            if (tail_verdict(ctx, f, true) == TailVerdict::diverging ||
                tail_verdict(ctx, f, false) == TailVerdict::diverging)
                throw validation_error("ocstar_normalize: block entry is not a germ on (C*, 0)");
            if (tail_verdict(ctx, f, false) == TailVerdict::borderline)
                throw refusal_error("ocstar_normalize: borderline tail decay; refusing to certify");
        }
    NormalFormResult out = detail::normalize_blocks(ctx, u);
    for (const auto& blk : out.gauge.blocks)
        for (const auto& f : blk.e)
            if (tail_verdict(ctx, f, false) == TailVerdict::diverging)
                throw numeric_error("ocstar_normalize: gauge entry fails the two-sided growth contract");
    return out;
}

// The formal fixpoint gauge: iterates F <- A_U^{-1} (sigma_q F) A_0 from the
// identity until a sweep changes nothing above tolerance. Returns F with
// F[A_0] - A_U vanishing through the requested order.
inline GaugeElement formal_fixpoint(const QContext& ctx, const BlockMatrix& u, int order) {
    const BlockShape& s = u.shape;
    if (order < 0) throw validation_error("formal_fixpoint: order must be nonnegative");
    if (order > ctx.window_halfwidth)
        throw validation_error("formal_fixpoint: order exceeds the window halfwidth");

    const QContext wctx(ctx.q, std::max(4, order), ctx.tol);
    // clip blocks into the working window
    BlockMatrix uw(s);
    int vmin = 0;
    const int k = s.block_count();
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            SeriesMatrix blk = u.at(i, j);
            for (auto& f : blk.e) {
                if (f.empty()) continue;
                f = mul(wctx, f, constant(cplx(1)));  // reclip to the working window
                if (!f.empty()) vmin = std::min(vmin, f.lo);
            }
            uw.at(i, j) = blk;
        }

    const SeriesMatrix au = system_matrix(uw);
    const SeriesMatrix a0 = graded_system_matrix(s);
    const SeriesMatrix au_inv = invert_block_upper(wctx, au, s);

    SeriesMatrix f = sm_identity(s.dim());
    const int max_sweeps = (order - vmin) + 10;
    bool stable = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        const SeriesMatrix next = sm_mul(wctx, sm_mul(wctx, au_inv, sm_sigma(wctx, f)), a0);
        real change = 0;
        for (size_t e = 0; e < next.e.size(); ++e) {
            const WindowedLaurent& nf = next.e[e];
            const WindowedLaurent& of = f.e[e];
            const int lo = std::min(nf.empty() ? 0 : nf.lo, of.empty() ? 0 : of.lo);
            const int hi = std::max(nf.empty() ? 0 : nf.hi, of.empty() ? 0 : of.hi);
            for (int n = lo; n <= hi; ++n) {
                const real delta = std::abs(nf.at(n) - of.at(n));
                if (delta == 0.0L) continue;
                change = std::max(change, delta / std::max(std::abs(nf.at(n)), static_cast<real>(1)));
            }
        }
        f = next;
        if (change <= wctx.tol) { stable = true; break; }
    }
    if (!stable)
        throw numeric_error("formal_fixpoint: iteration failed to stabilize (contraction violated)");

    GaugeElement out(s);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            SeriesMatrix blk = detail::take_block(f, s, i, j);
            for (auto& g : blk.e) {
                if (g.empty()) continue;
                g.xlo = std::max(g.xlo, -wctx.window_halfwidth);
                g.xhi = std::min(g.xhi, wctx.window_halfwidth);
            }
            out.at(i, j) = blk;
        }
    return out;
}

}  // namespace qstokes
