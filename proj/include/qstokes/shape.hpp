#pragma once

// Block data of canonical q-difference systems: the graded shape (slopes,
// ranks, constant blocks), the strictly-upper perturbation, and unipotent
// gauge elements over that shape.

#include <vector>

#include "series_matrix.hpp"

namespace qstokes {

struct BlockShape {
    std::vector<int> slopes;       // strictly decreasing integers
    std::vector<int> ranks;        // r_i >= 1
    std::vector<CMat> constants;   // invertible r_i x r_i blocks

    BlockShape() = default;
    BlockShape(std::vector<int> mu, std::vector<int> r, std::vector<CMat> a)
        : slopes(std::move(mu)), ranks(std::move(r)), constants(std::move(a)) {
        validate();
    }

    int block_count() const { return static_cast<int>(slopes.size()); }

    int dim() const {
        int n = 0;
        for (int r : ranks) n += r;
        return n;
    }

    int offset(int i) const {  // row/col offset of block i in the full matrix
        int o = 0;
        for (int l = 0; l < i; ++l) o += ranks[static_cast<size_t>(l)];
        return o;
    }

    void validate() const {
        const size_t k = slopes.size();
        if (k == 0 || ranks.size() != k || constants.size() != k)
            throw validation_error("BlockShape: slopes/ranks/constants must be nonempty and aligned");
        for (size_t i = 0; i + 1 < k; ++i)
            if (slopes[i] <= slopes[i + 1])
                throw validation_error("BlockShape: slopes must be strictly decreasing");
        for (size_t i = 0; i < k; ++i) {
            if (ranks[i] < 1) throw validation_error("BlockShape: ranks must be positive");
            const CMat& a = constants[i];
            if (a.rows != ranks[i] || a.cols != ranks[i])
                throw validation_error("BlockShape: constant block dimension mismatch");
            const real scale = std::max(norm_inf(a), static_cast<real>(1));
            real dscale = 1;
            for (int p = 0; p < a.rows; ++p) dscale *= scale;
            if (std::abs(det(a)) <= 1e-12L * dscale)
                throw validation_error("BlockShape: constant block " + std::to_string(i) +
                                       " is numerically singular");
        }
    }
};

// The strictly-upper blocks U_{i,j} completing a canonical system A_U.
struct BlockMatrix {
    BlockShape shape;
    std::vector<SeriesMatrix> blocks;  // pair (i, j), i < j, row-major pair order

    BlockMatrix() = default;

    explicit BlockMatrix(BlockShape s) : shape(std::move(s)) {
        const int k = shape.block_count();
        blocks.resize(static_cast<size_t>(k * (k - 1) / 2));
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                at(i, j) = SeriesMatrix(shape.ranks[static_cast<size_t>(i)],
                                        shape.ranks[static_cast<size_t>(j)]);
    }

    size_t pair_index(int i, int j) const {
        const int k = shape.block_count();
        if (!(0 <= i && i < j && j < k)) throw validation_error("BlockMatrix: bad block pair");
        // number of pairs (a, b), a < i, plus offset within row i
        return static_cast<size_t>(i * (2 * k - i - 1) / 2 + (j - i - 1));
    }

    SeriesMatrix& at(int i, int j) { return blocks[pair_index(i, j)]; }
    const SeriesMatrix& at(int i, int j) const { return blocks[pair_index(i, j)]; }
};

// Unipotent gauge element: identity diagonal, strictly-upper blocks F_{i,j}.
struct GaugeElement {
    BlockShape shape;
    std::vector<SeriesMatrix> blocks;

    GaugeElement() = default;

    explicit GaugeElement(BlockShape s) : shape(std::move(s)) {
        const int k = shape.block_count();
        blocks.resize(static_cast<size_t>(k * (k - 1) / 2));
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j)
                at(i, j) = SeriesMatrix(shape.ranks[static_cast<size_t>(i)],
                                        shape.ranks[static_cast<size_t>(j)]);
    }

    size_t pair_index(int i, int j) const {
        const int k = shape.block_count();
        if (!(0 <= i && i < j && j < k)) throw validation_error("GaugeElement: bad block pair");
        return static_cast<size_t>(i * (2 * k - i - 1) / 2 + (j - i - 1));
    }

    SeriesMatrix& at(int i, int j) { return blocks[pair_index(i, j)]; }
    const SeriesMatrix& at(int i, int j) const { return blocks[pair_index(i, j)]; }
};

namespace detail {

inline void place_block(SeriesMatrix& full, const BlockShape& s, int i, int j,
                        const SeriesMatrix& b) {
    const int ro = s.offset(i), co = s.offset(j);
    for (int r = 0; r < b.rows; ++r)
        for (int c = 0; c < b.cols; ++c) full(ro + r, co + c) = b(r, c);
}

inline SeriesMatrix take_block(const SeriesMatrix& full, const BlockShape& s, int i, int j) {
    SeriesMatrix b(s.ranks[static_cast<size_t>(i)], s.ranks[static_cast<size_t>(j)]);
    const int ro = s.offset(i), co = s.offset(j);
    for (int r = 0; r < b.rows; ++r)
        for (int c = 0; c < b.cols; ++c) b(r, c) = full(ro + r, co + c);
    return b;
}

}  // namespace detail

// Full n x n series matrix of A_U: diagonal z^{-mu_i} A_i, upper blocks U_{i,j}.
inline SeriesMatrix system_matrix(const BlockMatrix& u) {
    const BlockShape& s = u.shape;
    const int k = s.block_count();
    SeriesMatrix full(s.dim(), s.dim());
    for (int i = 0; i < k; ++i) {
        const int o = s.offset(i);
        const CMat& a = s.constants[static_cast<size_t>(i)];
        for (int r = 0; r < a.rows; ++r)
            for (int c = 0; c < a.cols; ++c)
                if (a(r, c) != cplx(0))
                    full(o + r, o + c) = monomial(-s.slopes[static_cast<size_t>(i)], a(r, c));
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) detail::place_block(full, s, i, j, u.at(i, j));
    return full;
}

// The graded system A_0 (all off-diagonal blocks dropped).
inline SeriesMatrix graded_system_matrix(const BlockShape& s) {
    return system_matrix(BlockMatrix(s));
}

inline SeriesMatrix gauge_matrix(const GaugeElement& f) {
    const BlockShape& s = f.shape;
    const int k = s.block_count();
    SeriesMatrix full = sm_identity(s.dim());
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) detail::place_block(full, s, i, j, f.at(i, j));
    return full;
}

// Inverse of a unipotent gauge: finite Neumann series of the nilpotent part.
inline GaugeElement gauge_inverse(const QContext& ctx, const GaugeElement& f) {
    const BlockShape& s = f.shape;
    const int k = s.block_count();
    const int n = s.dim();
    SeriesMatrix nil(n, n);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) detail::place_block(nil, s, i, j, f.at(i, j));
    SeriesMatrix acc = sm_identity(n), power = sm_identity(n);
    for (int p = 1; p < k; ++p) {
        power = sm_mul(ctx, power, nil);
        acc = (p % 2 == 1) ? sm_sub(acc, power) : sm_add(acc, power);
    }
    GaugeElement inv(s);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) inv.at(i, j) = detail::take_block(acc, s, i, j);
    return inv;
}

inline GaugeElement gauge_mul(const QContext& ctx, const GaugeElement& f, const GaugeElement& g) {
    const BlockShape& s = f.shape;
    const int k = s.block_count();
    GaugeElement r(s);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            SeriesMatrix acc = sm_add(f.at(i, j), g.at(i, j));
            for (int l = i + 1; l < j; ++l)
                acc = sm_add(acc, sm_mul(ctx, f.at(i, l), g.at(l, j)));
            r.at(i, j) = acc;
        }
    return r;
}

// Inversion of a block-upper-triangular series matrix whose diagonal blocks
// are z^{-mu_i} A_i. Back-substitution; exact diagonal inverses z^{mu_i} A_i^{-1}.
inline SeriesMatrix invert_block_upper(const QContext& ctx, const SeriesMatrix& m,
                                       const BlockShape& s) {
    const int k = s.block_count();
    std::vector<CMat> ainv(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) {
        const CMat& a = s.constants[static_cast<size_t>(i)];
        const real scale = std::max(norm_inf(a), static_cast<real>(1));
        real dscale = 1;
        for (int p = 0; p < a.rows; ++p) dscale *= scale;
        if (std::abs(det(a)) <= ctx.tol * dscale)
            throw numeric_error("invert_block_upper: singular diagonal block " + std::to_string(i));
        ainv[static_cast<size_t>(i)] = inverse(a);
    }

    SeriesMatrix x(m.rows, m.cols);
    // diagonal blocks
    for (int i = 0; i < k; ++i) {
        const int o = s.offset(i);
        const CMat& ai = ainv[static_cast<size_t>(i)];
        for (int r = 0; r < ai.rows; ++r)
            for (int c = 0; c < ai.cols; ++c)
                if (ai(r, c) != cplx(0))
                    x(o + r, o + c) = monomial(s.slopes[static_cast<size_t>(i)], ai(r, c));
    }
    // off-diagonal by increasing j - i
    for (int gap = 1; gap < k; ++gap)
        for (int i = 0; i + gap < k; ++i) {
            const int j = i + gap;
            SeriesMatrix acc(s.ranks[static_cast<size_t>(i)], s.ranks[static_cast<size_t>(j)]);
            for (int l = i + 1; l <= j; ++l) {
                const SeriesMatrix mil = detail::take_block(m, s, i, l);
                const SeriesMatrix xlj = detail::take_block(x, s, l, j);
                acc = sm_add(acc, sm_mul(ctx, mil, xlj));
            }
            // X_{i,j} = -z^{mu_i} A_i^{-1} * acc
            SeriesMatrix blk = sm_mul(ctx, sm_from_const(ainv[static_cast<size_t>(i)]), acc);
            for (auto& f : blk.e) f = shift(scale(f, cplx(-1)), s.slopes[static_cast<size_t>(i)]);
            detail::place_block(x, s, i, j, blk);
        }
    return x;
}

}  // namespace qstokes
