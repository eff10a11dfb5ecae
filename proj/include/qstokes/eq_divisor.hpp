#pragma once

// Points and effective divisors on the elliptic curve E_q = C*/q^Z, stored by
// canonical representatives in the fundamental annulus 1 <= |z| < |q|.

#include <limits>
#include <utility>
#include <vector>

#include "core.hpp"

namespace qstokes {

constexpr real kPointTol = 1e-8L;  // relative point-equality tolerance on E_q

struct EqPoint {
    cplx rep;  // 1 <= |rep| < |q|
};

// The unique q-power translate landing in the fundamental annulus.
inline EqPoint normalize_point(const QContext& ctx, cplx a) {
    if (std::abs(a) == 0.0L) throw validation_error("normalize_point: zero is not a point of C*");
    long long m = -static_cast<long long>(std::floor(std::log(std::abs(a)) / ctx.log_abs_q()));
    cplx r = a * qpow(ctx, m);
    // one floating-point correction step at the annulus boundary
    while (std::abs(r) < 1.0L) r *= ctx.q;
    while (std::abs(r) >= ctx.abs_q()) r /= ctx.q;
    return EqPoint{r};
}

// Relative distance on E_q: compare normalized representatives across the
// annulus seam.
inline real eq_distance(const QContext& ctx, cplx a, cplx b) {
    const cplx pa = normalize_point(ctx, a).rep;
    const cplx pb = normalize_point(ctx, b).rep;
    real best = std::numeric_limits<real>::infinity();
    for (int m = -1; m <= 1; ++m) {
        const cplx pbm = pb * qpow(ctx, m);
        best = std::min(best, std::abs(pa - pbm) / std::max(std::abs(pa), std::abs(pbm)));
    }
    return best;
}

inline bool eq_equal(const QContext& ctx, cplx a, cplx b, real tol = kPointTol) {
    return eq_distance(ctx, a, b) <= tol;
}

struct EqDivisor {
    struct Term {
        EqPoint point;
        int multiplicity;
    };
    std::vector<Term> terms;

    int degree() const {
        int d = 0;
        for (const Term& t : terms) d += t.multiplicity;
        return d;
    }
};

// Builds a divisor from raw points (with multiplicities), normalizing and
// merging representatives that agree on E_q.
inline EqDivisor make_divisor(const QContext& ctx, const std::vector<std::pair<cplx, int>>& raw) {
    EqDivisor d;
    for (const auto& [pt, mult] : raw) {
        if (mult < 1) throw validation_error("make_divisor: multiplicities must be >= 1");
        const EqPoint p = normalize_point(ctx, pt);
        bool merged = false;
        for (auto& t : d.terms)
            if (eq_equal(ctx, t.point.rep, p.rep)) {
                t.multiplicity += mult;
                merged = true;
                break;
            }
        if (!merged) d.terms.push_back({p, mult});
    }
    return d;
}

inline EqDivisor divisor_sum(const QContext& ctx, const EqDivisor& a, const EqDivisor& b) {
    std::vector<std::pair<cplx, int>> raw;
    for (const auto& t : a.terms) raw.emplace_back(t.point.rep, t.multiplicity);
    for (const auto& t : b.terms) raw.emplace_back(t.point.rep, t.multiplicity);
    return make_divisor(ctx, raw);
}

// Evaluation with the multiplicative group law on C*/q^Z. Renormalizes along
// the way so high multiplicities cannot overflow.
inline EqPoint ev_Eq(const QContext& ctx, const EqDivisor& d) {
    cplx prod(1);
    for (const auto& t : d.terms)
        for (int i = 0; i < t.multiplicity; ++i)
            prod = normalize_point(ctx, prod * t.point.rep).rep;
    return normalize_point(ctx, prod);
}

}  // namespace qstokes
