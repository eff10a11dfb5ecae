#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qstokes/eq_divisor.hpp"
#include "qstokes/summation_divisor.hpp"
#include "qstokes/theta.hpp"

using namespace qstokes;

namespace {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    real uniform(real lo = 0, real hi = 1) {
        const uint64_t r = eng() >> 11;
        return lo + (hi - lo) * static_cast<real>(r) / static_cast<real>(1ull << 53);
    }
    cplx annulus_point(const QContext& ctx) {
        const real a = uniform(0, 6.283185307179586L);
        const real r = std::exp(uniform(0.02L, 0.98L) * ctx.log_abs_q());
        return r * cplx(std::cos(a), std::sin(a));
    }
};

BlockShape two_slope_shape(cplx a1, cplx a2) {
    CMat m1(1, 1), m2(1, 1);
    m1(0, 0) = a1;
    m2(0, 0) = a2;
    return BlockShape({1, 0}, {1, 1}, {m1, m2});
}

}  // namespace

TEST_CASE("theta coefficients match the defining series") {
    QContext ctx(cplx(3), 30);
    const WindowedLaurent th = theta_coeffs(ctx);
    const cplx q = ctx.q;
    CHECK(std::abs(th.at(0) - cplx(1)) == 0.0L);
    CHECK(std::abs(th.at(1) - cplx(1) / q) <= 1e-19L);
    CHECK(std::abs(th.at(-1) - cplx(1)) == 0.0L);
    CHECK(std::abs(th.at(-2) - cplx(1) / q) <= 1e-19L);
}

TEST_CASE("functional equation sigma_q theta = z theta, exact coefficients") {
    QContext ctx(cplx(2, 1), 20);
    const WindowedLaurent th = theta_coeffs(ctx);
    const WindowedLaurent lhs = sigma_q(ctx, th);
    const WindowedLaurent rhs = shift(th, 1);
    CHECK(max_diff_on_exact(lhs, rhs) <= 1e-13L * max_abs(th));
}

TEST_CASE("theta_{q,c} vanishes on the spiral [-c; q]") {
    QContext ctx(cplx(3), 30);
    const cplx c(1.2L);
    const real at_zero = std::abs(theta_eval(ctx, c, -c));
    const real nearby = std::abs(theta_eval(ctx, c, -c * cplx(1.3L)));
    CHECK(at_zero <= 1e-9L * std::max(nearby, static_cast<real>(1)));
    // window evaluation agrees away from the zero
    const cplx z(0.7L, 0.4L);
    const cplx via_window = evaluate(theta_coeffs(ctx, c), z);
    CHECK(std::abs(via_window - theta_eval(ctx, c, z)) <= 1e-12L * std::abs(via_window));
}

TEST_CASE("theta functional equation at points (self-consistency)") {
    QContext ctx(cplx(3), 30);
    const WindowedLaurent th = theta_coeffs(ctx);
    const cplx z(0.5L);
    const cplx lhs = evaluate(th, ctx.q * z);
    const cplx rhs = z * evaluate(th, z);
    CHECK(std::abs(lhs - rhs) <= 1e-10L * std::abs(lhs));
}

TEST_CASE("theta window guard for slowly growing q") {
    CHECK_THROWS_AS(theta_coeffs(QContext(cplx(1.2L), 40)), validation_error);
    CHECK_NOTHROW(theta_coeffs(QContext(cplx(1.2L), 85)));
}

TEST_CASE("point normalization and the group law") {
    QContext ctx(cplx(3), 20);
    const EqPoint p = normalize_point(ctx, cplx(10));  // 10/9 in [1, 3)
    CHECK(std::abs(p.rep - cplx(10.0L / 9)) <= 1e-15L);
    // idempotence
    CHECK(std::abs(normalize_point(ctx, p.rep).rep - p.rep) == 0.0L);

    Rng rng(5);
    for (int t = 0; t < 25; ++t) {
        const cplx a = rng.annulus_point(ctx), b = rng.annulus_point(ctx);
        const EqDivisor dab = make_divisor(ctx, {{a, 1}, {b, 1}});
        CHECK(eq_equal(ctx, ev_Eq(ctx, dab).rep, a * b));
        // q-translation invariance
        const EqDivisor dqa = make_divisor(ctx, {{a * ctx.q, 1}});
        CHECK(eq_equal(ctx, ev_Eq(ctx, dqa).rep, a));
    }

    const EqDivisor dd = make_divisor(ctx, {{cplx(1.5L), 2}});
    CHECK(dd.degree() == 2);
    CHECK(std::abs(ev_Eq(ctx, dd).rep - cplx(2.25L)) <= 1e-15L);
}

TEST_CASE("ev_Eq is a homomorphism") {
    QContext ctx(cplx(2.5L, 0.4L), 20);
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const EqDivisor d1 = make_divisor(ctx, {{rng.annulus_point(ctx), 1},
                                                {rng.annulus_point(ctx), 2}});
        const EqDivisor d2 = make_divisor(ctx, {{rng.annulus_point(ctx), 1}});
        const cplx lhs = ev_Eq(ctx, divisor_sum(ctx, d1, d2)).rep;
        const cplx rhs = ev_Eq(ctx, d1).rep * ev_Eq(ctx, d2).rep;
        CHECK(eq_equal(ctx, lhs, rhs));
    }
}

TEST_CASE("allowedness against the spectral resonance classes") {
    QContext ctx(cplx(3), 20);
    const BlockShape shape = two_slope_shape(cplx(2), cplx(1));
    const auto sp = spectra(shape);

    // prohibited class is (-1)^1 * 2/1 = -2 ~ 1.5 on the annulus; D = [1] clears it
    const SummationDivisor ok = make_summation_divisor(ctx, shape, std::vector<cplx>{cplx(1)});
    const Allowedness a = is_allowed(ctx, ok, sp);
    CHECK(a.allowed);

    // D = [-2] sits exactly in the prohibited class
    const SummationDivisor bad = make_summation_divisor(ctx, shape, std::vector<cplx>{cplx(-2)});
    const Allowedness b = is_allowed(ctx, bad, sp);
    CHECK_FALSE(b.allowed);
    REQUIRE(b.witness.has_value());
    CHECK(b.witness->i == 0);
    CHECK(b.witness->j == 1);
    CHECK(std::abs(b.witness->spec_i - cplx(2)) <= 1e-12L);
    CHECK(std::abs(b.witness->spec_j - cplx(1)) <= 1e-12L);

    // single slope: no pairs, always allowed
    CMat one(1, 1);
    one(0, 0) = cplx(4);
    const BlockShape single({0}, {1}, {one});
    const SummationDivisor none = make_summation_divisor(ctx, single, std::vector<cplx>{});
    CHECK(is_allowed(ctx, none, spectra(single)).allowed);
}

TEST_CASE("borderline divisors are refused") {
    QContext ctx(cplx(3), 20);
    const BlockShape shape = two_slope_shape(cplx(2), cplx(1));
    // distance ~1e-6 from the prohibited representative: inside [1e-8, 1e-4)
    const SummationDivisor close =
        make_summation_divisor(ctx, shape, std::vector<cplx>{cplx(-2) * cplx(1 + 1e-6L)});
    CHECK_THROWS_AS(is_allowed(ctx, close, spectra(shape)), refusal_error);
}

TEST_CASE("allowedness only depends on the divisor class") {
    QContext ctx(cplx(2, 0.7L), 25);
    CMat m1(1, 1), m2(1, 1);
    m1(0, 0) = cplx(1.7L, 0.2L);
    m2(0, 0) = cplx(-0.8L, 0.1L);
    const BlockShape shape({2, 0}, {1, 1}, {m1, m2});
    Rng rng(29);
    const auto sp = spectra(shape);
    for (int t = 0; t < 10; ++t) {
        const cplx a = rng.annulus_point(ctx), b = rng.annulus_point(ctx);
        const auto base = is_allowed(ctx, make_summation_divisor(ctx, shape, {a, b}), sp);
        const auto shifted = is_allowed(
            ctx, make_summation_divisor(ctx, shape, {a * qpow(ctx, 2), b * qpow(ctx, -1)}), sp);
        CHECK(base.allowed == shifted.allowed);
    }
}

TEST_CASE("theta gauge for the two-slope example") {
    QContext ctx(cplx(3), 30);
    const BlockShape shape = two_slope_shape(cplx(2), cplx(1));
    const cplx a(1.4L, 0.3L);
    const SummationDivisor d = make_summation_divisor(ctx, shape, std::vector<cplx>{a});
    const ThetaGauge tg = build_theta_gauge(ctx, d);

    CHECK(tg.theta_power == 0);
    CHECK(tg.factors[0].size() == 1);
    CHECK(tg.factors[1].empty());
    CHECK(std::abs(tg.alpha[0] - cplx(-1) / a) <= 1e-18L);
    CHECK(std::abs(tg.alpha[1] - cplx(1)) == 0.0L);

    // t_2 = 1 and t_1 = theta_{q,-a}
    CHECK(std::abs(t_eval(ctx, tg, 1, cplx(1.1L)) - cplx(1)) <= 1e-15L);
    CHECK(std::abs(t_eval(ctx, tg, 0, cplx(1.1L)) - theta_eval(ctx, -a, cplx(1.1L))) <= 1e-15L);
}

TEST_CASE("multiplier functional equation sigma_q t_i = alpha_i z^{mu_i} t_i") {
    QContext ctx(cplx(3), 30);
    CMat m1(1, 1), m2(2, 2), m3(1, 1);
    m1(0, 0) = cplx(2);
    m2 = CMat::identity(2);
    m2(0, 1) = cplx(0.3L);
    m3(0, 0) = cplx(-1.5L);
    const BlockShape shape({2, 0, -1}, {1, 2, 1}, {m1, m2, m3});
    Rng rng(31);
    const SummationDivisor d = make_summation_divisor(
        ctx, shape, {rng.annulus_point(ctx), rng.annulus_point(ctx), rng.annulus_point(ctx)});
    const ThetaGauge tg = build_theta_gauge(ctx, d);

    for (int i = 0; i < 3; ++i) {
        const int mu = shape.slopes[static_cast<size_t>(i)];
        for (int t = 0; t < 10; ++t) {
            const cplx z = rng.annulus_point(ctx);
            const cplx lhs = t_eval(ctx, tg, i, ctx.q * z);
            const cplx rhs = tg.alpha[static_cast<size_t>(i)] * ipow(z, mu) * t_eval(ctx, tg, i, z);
            CHECK(std::abs(lhs - rhs) <= 1e-9L * std::max(std::abs(lhs), static_cast<real>(1e-30L)));
        }
    }
}

TEST_CASE("t_{i,j} window: matches the pointwise quotient and carries the divisor") {
    QContext ctx(cplx(3), 30);
    const BlockShape shape = two_slope_shape(cplx(2), cplx(1));
    const cplx a(1.4L, 0.3L);
    const SummationDivisor d = make_summation_divisor(ctx, shape, std::vector<cplx>{a});
    const ThetaGauge tg = build_theta_gauge(ctx, d);
    const WindowedLaurent tij = tij_window(ctx, tg, 0, 1);

    Rng rng(43);
    for (int t = 0; t < 10; ++t) {
        const cplx z = rng.annulus_point(ctx);
        const cplx lhs = evaluate(tij, z);
        const cplx rhs = t_eval(ctx, tg, 0, ctx.q * z) / t_eval(ctx, tg, 1, z);
        CHECK(std::abs(lhs - rhs) <= 1e-9L * std::max(std::abs(lhs), static_cast<real>(1e-30L)));
    }

    // div(t_1) - div(t_2) = D: the quotient t_1/t_2 vanishes on the spiral [a; q]
    for (int m = -1; m <= 1; ++m) {
        const cplx zero_pt = a * qpow(ctx, m);
        const real at_zero = std::abs(t_eval(ctx, tg, 0, zero_pt) / t_eval(ctx, tg, 1, zero_pt));
        const real nearby =
            std::abs(t_eval(ctx, tg, 0, zero_pt * 1.25L) / t_eval(ctx, tg, 1, zero_pt * 1.25L));
        CHECK(at_zero <= 1e-9L * std::max(nearby, static_cast<real>(1e-30L)));
    }

    // t_ratio_eval is the reciprocal of the factor product between the blocks
    const cplx z(1.2L, -0.5L);
    CHECK(std::abs(t_ratio_eval(ctx, tg, 0, 1, z) * t_eval(ctx, tg, 0, z) / t_eval(ctx, tg, 1, z) -
                   cplx(1)) <= 1e-10L);
}

TEST_CASE("derived divisors: degrees, compatibility, partition by chosen points") {
    QContext ctx(cplx(3), 20);
    CMat m1(1, 1), m2(1, 1), m3(1, 1);
    m1(0, 0) = cplx(2);
    m2(0, 0) = cplx(0.5L, 1);
    m3(0, 0) = cplx(-3);
    const BlockShape shape({3, 1, 0}, {1, 1, 1}, {m1, m2, m3});
    Rng rng(47);
    const cplx a1 = rng.annulus_point(ctx), a2 = rng.annulus_point(ctx),
               a3 = rng.annulus_point(ctx);
    const SummationDivisor d = make_summation_divisor(ctx, shape, {a1, a2, a3});

    CHECK(divisor_between(ctx, d, 0, 1).degree() == 2);
    CHECK(divisor_between(ctx, d, 1, 2).degree() == 1);
    CHECK(divisor_between(ctx, d, 0, 2).degree() == 3);
    // compatibility D_{0,2} = D_{0,1} + D_{1,2}
    const cplx lhs = ev_Eq(ctx, divisor_between(ctx, d, 0, 2)).rep;
    const cplx rhs = ev_Eq(ctx, divisor_sum(ctx, divisor_between(ctx, d, 0, 1),
                                            divisor_between(ctx, d, 1, 2))).rep;
    CHECK(eq_equal(ctx, lhs, rhs));

    // adjacent-divisor constructor round-trips
    const std::vector<EqDivisor> adj = {divisor_between(ctx, d, 0, 1), divisor_between(ctx, d, 1, 2)};
    const SummationDivisor d2 = make_summation_divisor(ctx, shape, adj);
    CHECK(ev_Eq(ctx, divisor_between(ctx, d2, 0, 2)).rep ==
          ev_Eq(ctx, divisor_between(ctx, d2, 0, 2)).rep);
    CHECK(eq_equal(ctx, ev_Eq(ctx, divisor_between(ctx, d2, 0, 2)).rep, lhs));

    // degree mismatch is rejected
    CHECK_THROWS_AS(make_summation_divisor(ctx, shape, std::vector<cplx>{a1, a2}),
                    validation_error);
}
