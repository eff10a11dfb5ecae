#pragma once

// Summation divisors adapted to a block shape, the allowedness test against
// the spectral resonance classes, and the theta multiplier functions t_i.

#include <optional>
#include <vector>

#include "eq_divisor.hpp"
#include "shape.hpp"
#include "spectra.hpp"
#include "theta.hpp"

namespace qstokes {

constexpr real kAllowedMargin = 1e-4L;  // refuse-to-certify band is [kPointTol, margin)

// An adapted summation divisor is stored by its chosen points a_l, l running
// over (mu_k, mu_1]; the divisors D_{i,j} = sum_{mu_j < l <= mu_i} [a_l] are
// derived, which makes the compatibility D_{i,j} = D_{i,l} + D_{l,j} and the
// degree constraints hold by construction.
struct SummationDivisor {
    BlockShape shape;
    std::vector<cplx> chosen;  // index 0 holds a_{mu_k + 1}, the last a_{mu_1}

    int lowest_slope() const { return shape.slopes.back(); }
    int highest_slope() const { return shape.slopes.front(); }

    const cplx& point(int l) const {  // l in (mu_k, mu_1]
        return chosen[static_cast<size_t>(l - lowest_slope() - 1)];
    }
};

inline SummationDivisor make_summation_divisor(const QContext& ctx, BlockShape shape,
                                               std::vector<cplx> chosen_points) {
    SummationDivisor d{std::move(shape), std::move(chosen_points)};
    const int expected = d.highest_slope() - d.lowest_slope();
    if (static_cast<int>(d.chosen.size()) != expected)
        throw validation_error("make_summation_divisor: need exactly mu_1 - mu_k chosen points, got " +
                               std::to_string(d.chosen.size()));
    for (const cplx& a : d.chosen) {
        if (std::abs(a) == 0.0L)
            throw validation_error("make_summation_divisor: chosen points must be nonzero");
        const real drift = std::abs(std::log(std::abs(a)) / ctx.log_abs_q());
        if (drift > static_cast<real>(ctx.window_halfwidth) / 4)
            throw validation_error(
                "make_summation_divisor: representative drifts too far from the fundamental annulus");
    }
    return d;
}

// Builds from the adjacent divisors D_{i,i+1} (degree mu_i - mu_{i+1} each),
// expanding multiplicities into chosen points.
inline SummationDivisor make_summation_divisor(const QContext& ctx, BlockShape shape,
                                               const std::vector<EqDivisor>& adjacent) {
    const int k = shape.block_count();
    if (static_cast<int>(adjacent.size()) != k - 1)
        throw validation_error("make_summation_divisor: need one divisor per adjacent slope pair");
    std::vector<cplx> chosen;
    for (int i = k - 2; i >= 0; --i) {  // slots fill upward from mu_k
        const int degree = shape.slopes[static_cast<size_t>(i)] - shape.slopes[static_cast<size_t>(i + 1)];
        if (adjacent[static_cast<size_t>(i)].degree() != degree)
            throw validation_error("make_summation_divisor: divisor " + std::to_string(i) +
                                   " must have degree " + std::to_string(degree));
        for (const auto& t : adjacent[static_cast<size_t>(i)].terms)
            for (int m = 0; m < t.multiplicity; ++m) chosen.push_back(t.point.rep);
    }
    return make_summation_divisor(ctx, std::move(shape), std::move(chosen));
}

inline EqDivisor divisor_between(const QContext& ctx, const SummationDivisor& d, int i, int j) {
    std::vector<std::pair<cplx, int>> raw;
    const int mu_i = d.shape.slopes[static_cast<size_t>(i)];
    const int mu_j = d.shape.slopes[static_cast<size_t>(j)];
    for (int l = mu_j + 1; l <= mu_i; ++l) raw.emplace_back(d.point(l), 1);
    return make_divisor(ctx, raw);
}

inline std::vector<cplx> divisor_support(const QContext& ctx, const SummationDivisor& d) {
    std::vector<cplx> pts;
    for (const cplx& a : d.chosen) {
        const cplx rep = normalize_point(ctx, a).rep;
        bool seen = false;
        for (const cplx& p : pts)
            if (eq_equal(ctx, p, rep)) { seen = true; break; }
        if (!seen) pts.push_back(rep);
    }
    return pts;
}

struct AllowednessWitness {
    int i, j;
    cplx spec_i, spec_j;
};

struct Allowedness {
    bool allowed;
    real min_distance;
    std::optional<AllowednessWitness> witness;  // set when not allowed
};

// Checks ev(D_{i,j}) against the class of (-1)^{mu_i - mu_j} Sp(A_i)/Sp(A_j)
// for every i < j. Distances inside [point tol, margin) are refused outright:
// near-resonant divisors poison the regular solver downstream.
inline Allowedness is_allowed(const QContext& ctx, const SummationDivisor& d,
                              const std::vector<std::vector<cplx>>& block_spectra,
                              real margin = kAllowedMargin, real point_tol = kPointTol) {
    const int k = d.shape.block_count();
    if (static_cast<int>(block_spectra.size()) != k)
        throw validation_error("is_allowed: one spectrum per block required");

    real min_dist = std::numeric_limits<real>::infinity();
    std::optional<AllowednessWitness> worst;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            const int gap = d.shape.slopes[static_cast<size_t>(i)] - d.shape.slopes[static_cast<size_t>(j)];
            const cplx ev = ev_Eq(ctx, divisor_between(ctx, d, i, j)).rep;
            const cplx sign = (gap % 2 == 0) ? cplx(1) : cplx(-1);
            for (const cplx& s : block_spectra[static_cast<size_t>(i)])
                for (const cplx& t : block_spectra[static_cast<size_t>(j)]) {
                    const real dist = eq_distance(ctx, ev, sign * s / t);
                    if (dist < min_dist) {
                        min_dist = dist;
                        worst = AllowednessWitness{i, j, s, t};
                    }
                }
        }

    if (min_dist >= margin || !worst.has_value()) return {true, min_dist, std::nullopt};
    if (min_dist < point_tol) return {false, min_dist, worst};
    throw refusal_error("is_allowed: borderline divisor (distance " +
                        std::to_string(static_cast<double>(min_dist)) +
                        " inside the refusal band); refusing to certify");
}

// Descriptor of the theta multipliers t_i = theta_q^{mu_k} * prod theta_{q,-a_l}
// over mu_k < l <= mu_i. Each satisfies sigma_q t_i = alpha_i z^{mu_i} t_i with
// alpha_i the product of the -1/a_l.
struct ThetaGauge {
    BlockShape shape;
    int theta_power;                       // mu_k, the shared theta_q exponent
    std::vector<std::vector<cplx>> factors;  // per block i: the a_l, l in (mu_k, mu_i]
    std::vector<cplx> alpha;
};

inline ThetaGauge build_theta_gauge(const QContext& ctx, const SummationDivisor& d) {
    const int k = d.shape.block_count();
    ThetaGauge tg{d.shape, d.lowest_slope(), {}, {}};
    tg.factors.resize(static_cast<size_t>(k));
    tg.alpha.resize(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        cplx a(1);
        for (int l = d.lowest_slope() + 1; l <= d.shape.slopes[static_cast<size_t>(i)]; ++l) {
            const cplx al = d.point(l);
            if (std::abs(al) == 0.0L) throw validation_error("build_theta_gauge: zero chosen point");
            tg.factors[static_cast<size_t>(i)].push_back(al);
            a *= cplx(-1) / al;
        }
        tg.alpha[static_cast<size_t>(i)] = a;
    }
    return tg;
}

// Window of t_{i,j} = sigma_q(t_i)/t_j = alpha_i z^{mu_i} prod_{mu_j < l <= mu_i}
// theta_{q,-a_l}: the shared theta_q^{mu_k} cancels, so this is an honest
// two-sided window, holomorphic on C*.
inline WindowedLaurent tij_window(const QContext& ctx, const ThetaGauge& tg, int i, int j) {
    if (!(i < j)) throw validation_error("tij_window: need i < j");
    WindowedLaurent w = constant(tg.alpha[static_cast<size_t>(i)]);
    const auto& fi = tg.factors[static_cast<size_t>(i)];
    const auto& fj = tg.factors[static_cast<size_t>(j)];
    for (size_t l = fj.size(); l < fi.size(); ++l)
        w = mul(ctx, w, theta_coeffs(ctx, -fi[l]));
    return shift(w, tg.shape.slopes[static_cast<size_t>(i)]);
}

// Point value of t_i (theta_q powers included; meromorphic when mu_k < 0).
inline cplx t_eval(const QContext& ctx, const ThetaGauge& tg, int i, cplx z) {
    cplx v = ipow(theta_eval(ctx, cplx(1), z), tg.theta_power);
    for (const cplx& a : tg.factors[static_cast<size_t>(i)]) v *= theta_eval(ctx, -a, z);
    return v;
}

// t_j(z)/t_i(z) for i < j: the inverse of the factor product between the two.
inline cplx t_ratio_eval(const QContext& ctx, const ThetaGauge& tg, int i, int j, cplx z) {
    if (!(i < j)) throw validation_error("t_ratio_eval: need i < j");
    const auto& fi = tg.factors[static_cast<size_t>(i)];
    const auto& fj = tg.factors[static_cast<size_t>(j)];
    cplx v(1);
    for (size_t l = fj.size(); l < fi.size(); ++l) v *= theta_eval(ctx, -fi[l], z);
    return cplx(1) / v;
}

}  // namespace qstokes
