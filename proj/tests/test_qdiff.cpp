#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qstokes/gauge.hpp"
#include "qstokes/newton.hpp"
#include "qstokes/spectra.hpp"

using namespace qstokes;

namespace {

struct Rng {
    std::mt19937_64 eng;
    explicit Rng(uint64_t seed) : eng(seed) {}
    real uniform(real lo = 0, real hi = 1) {
        const uint64_t r = eng() >> 11;
        return lo + (hi - lo) * static_cast<real>(r) / static_cast<real>(1ull << 53);
    }
    cplx unit() {
        const real a = uniform(0, 6.283185307179586L);
        return cplx(std::cos(a), std::sin(a));
    }
    WindowedLaurent series(int lo, int hi, real decay = 0.5L) {
        std::vector<cplx> v;
        for (int n = lo; n <= hi; ++n)
            v.push_back(unit() * static_cast<real>(std::pow(decay, std::abs(n))));
        return make_series(lo, std::move(v));
    }
};

BlockShape random_three_block(Rng& rng) {
    CMat a1(1, 1), a2(2, 2), a3(1, 1);
    a1(0, 0) = cplx(2) + rng.unit() * 0.2L;
    a2(0, 0) = cplx(1, 0.5L);
    a2(0, 1) = rng.unit() * 0.4L;
    a2(1, 1) = cplx(-1.3L);
    a3(0, 0) = rng.unit() * 2.0L + cplx(3);
    return BlockShape({2, 1, -1}, {1, 2, 1}, {a1, a2, a3});
}

GaugeElement random_gauge(Rng& rng, const BlockShape& s) {
    GaugeElement f(s);
    for (int i = 0; i < s.block_count(); ++i)
        for (int j = i + 1; j < s.block_count(); ++j)
            for (auto& g : f.at(i, j).e) g = rng.series(-2, 4);
    return f;
}

BlockMatrix random_system(Rng& rng, const BlockShape& s) {
    BlockMatrix u(s);
    for (int i = 0; i < s.block_count(); ++i)
        for (int j = i + 1; j < s.block_count(); ++j)
            for (auto& g : u.at(i, j).e) g = rng.series(0, 5);
    return u;
}

}  // namespace

TEST_CASE("identity gauge acts trivially") {
    QContext ctx(cplx(3), 12);
    Rng rng(3);
    const BlockShape s = random_three_block(rng);
    const BlockMatrix u = random_system(rng, s);
    const SeriesMatrix a = system_matrix(u);
    const SeriesMatrix acted = gauge_action(ctx, GaugeElement(s), a);
    CHECK(sm_max_diff(acted, a) <= 1e-15L * sm_norm(a));
}

TEST_CASE("two-slope gauge action reproduces the coboundary formula") {
    QContext ctx(cplx(3), 12);
    // F = [[1, f],[0, 1]] on A_0 = diag(1, z) gives [[1, z sigma_q f - f],[0, z]]
    BlockShape s({0, -1}, {1, 1}, {CMat::identity(1), CMat::identity(1)});
    Rng rng(7);
    const WindowedLaurent f = rng.series(-3, 5);
    GaugeElement g(s);
    g.at(0, 1)(0, 0) = f;
    const SeriesMatrix acted = gauge_action(ctx, g, graded_system_matrix(s));
    const WindowedLaurent expect = sub(shift(sigma_q(ctx, f), 1), f);
    CHECK(max_diff_on_exact(acted(0, 1), expect) <= 1e-15L * max_abs(expect));
    CHECK(max_diff_on_exact(acted(1, 1), monomial(1, cplx(1))) <= 1e-18L);
}

TEST_CASE("gauge action is a left group action") {
    QContext ctx(cplx(2.5L, 0.5L), 14);
    Rng rng(11);
    const BlockShape s = random_three_block(rng);
    const BlockMatrix u = random_system(rng, s);
    const SeriesMatrix a = system_matrix(u);
    const GaugeElement f = random_gauge(rng, s);
    const GaugeElement g = random_gauge(rng, s);

    const SeriesMatrix lhs = gauge_action(ctx, gauge_mul(ctx, f, g), a);
    const SeriesMatrix rhs = gauge_action(ctx, f, gauge_action(ctx, g, a));
    CHECK(sm_max_diff(lhs, rhs) <= 1e-10L * std::max(sm_norm(lhs), static_cast<real>(1)));
}

TEST_CASE("gauge action preserves the shape data") {
    QContext ctx(cplx(3), 12);
    Rng rng(13);
    const BlockShape s = random_three_block(rng);
    const BlockMatrix u = random_system(rng, s);
    const GaugeElement f = random_gauge(rng, s);
    const SeriesMatrix acted = gauge_action(ctx, f, system_matrix(u));

    // diagonal blocks of F[A_U] equal those of A_U (z^{-mu_i} A_i)
    const SeriesMatrix a0 = graded_system_matrix(s);
    const int k = s.block_count();
    for (int i = 0; i < k; ++i) {
        const int o = s.offset(i);
        for (int r = 0; r < s.ranks[static_cast<size_t>(i)]; ++r)
            for (int c = 0; c < s.ranks[static_cast<size_t>(i)]; ++c)
                CHECK(max_diff_on_exact(acted(o + r, o + c), a0(o + r, o + c)) <=
                      1e-12L * std::max(sm_norm(acted), static_cast<real>(1)));
    }
    // below-diagonal stays zero
    CHECK(max_abs(acted(s.offset(2), 0)) <= 1e-14L * sm_norm(acted));
}

TEST_CASE("graded part zeroes the perturbation and is idempotent") {
    QContext ctx(cplx(3), 10);
    Rng rng(17);
    const BlockShape s = random_three_block(rng);
    const BlockMatrix u = random_system(rng, s);
    const BlockMatrix g = graded_part(u);
    for (int i = 0; i < s.block_count(); ++i)
        for (int j = i + 1; j < s.block_count(); ++j)
            for (const auto& f : g.at(i, j).e) CHECK(f.empty());
    const BlockMatrix gg = graded_part(g);
    CHECK(sm_max_diff(system_matrix(gg), system_matrix(g)) == 0.0L);
}

TEST_CASE("spectra of explicit blocks") {
    CMat d(2, 2);
    d(0, 0) = cplx(2);
    d(1, 1) = cplx(5);
    auto ev = eigenvalues(d);
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    CHECK(std::abs(ev[0] - cplx(2)) <= 1e-10L);
    CHECK(std::abs(ev[1] - cplx(5)) <= 1e-10L);

    CMat rot(2, 2);
    rot(0, 1) = cplx(1);
    rot(1, 0) = cplx(-1);
    auto evr = eigenvalues(rot);
    std::sort(evr.begin(), evr.end(), [](cplx a, cplx b) { return a.imag() < b.imag(); });
    CHECK(std::abs(evr[0] - cplx(0, -1)) <= 1e-10L);
    CHECK(std::abs(evr[1] - cplx(0, 1)) <= 1e-10L);

    CMat c(1, 1);
    c(0, 0) = cplx(0.3L, -2.1L);
    CHECK(std::abs(eigenvalues(c)[0] - cplx(0.3L, -2.1L)) <= 1e-12L);
}

TEST_CASE("spectra of triangular blocks equal the diagonal") {
    Rng rng(19);
    for (int t = 0; t < 10; ++t) {
        const int n = 2 + static_cast<int>(rng.uniform(0, 4));
        CMat m(n, n);
        std::vector<cplx> diag;
        for (int i = 0; i < n; ++i) {
            m(i, i) = rng.unit() * (0.5L + rng.uniform() * 3);
            diag.push_back(m(i, i));
            for (int j = i + 1; j < n; ++j) m(i, j) = rng.unit();
        }
        auto ev = eigenvalues(m);
        for (const cplx& lambda : ev) {
            real best = 1e30L;
            for (const cplx& d : diag) best = std::min(best, std::abs(lambda - d));
            CHECK(best <= 1e-8L * std::max(std::abs(lambda), static_cast<real>(1)));
        }
    }
}

TEST_CASE("newton polygon of basic operators") {
    QContext ctx(cplx(3), 10);
    // sigma - 1
    auto flat = newton_polygon(ctx, {constant(cplx(-1)), constant(cplx(1))});
    REQUIRE(flat.size() == 1);
    CHECK(flat[0].slope == 0.0L);
    CHECK(flat[0].multiplicity == 1);

    // z sigma - 1: the pure module of slope 1
    auto pure = newton_polygon(ctx, {constant(cplx(-1)), monomial(1, cplx(1))});
    REQUIRE(pure.size() == 1);
    CHECK(pure[0].slope == 1.0L);

    // (sigma - 1)(z sigma - 1) = q z sigma^2 - (1 + z) sigma + 1
    auto two = newton_polygon(
        ctx, {constant(cplx(1)), make_series(0, {cplx(-1), cplx(-1)}), monomial(1, ctx.q)});
    REQUIRE(two.size() == 2);
    CHECK(two[0].slope == 1.0L);
    CHECK(two[1].slope == 0.0L);

    CHECK_THROWS_AS(newton_polygon(ctx, {series_zero(), constant(cplx(1))}), validation_error);
}
