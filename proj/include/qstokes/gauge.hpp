#pragma once

// The gauge action F[A] = (sigma_q F) A F^{-1} and the graded part of a
// canonical system.

#include "shape.hpp"

namespace qstokes {

// Action by a unipotent gauge element; the inverse is the exact finite
// Neumann series, so no series division is involved.
inline SeriesMatrix gauge_action(const QContext& ctx, const GaugeElement& f,
                                 const SeriesMatrix& a) {
    if (a.rows != f.shape.dim() || a.cols != f.shape.dim())
        throw validation_error("gauge_action: dimension mismatch");
    const SeriesMatrix fm = gauge_matrix(f);
    const SeriesMatrix fi = gauge_matrix(gauge_inverse(ctx, f));
    return sm_mul(ctx, sm_mul(ctx, sm_sigma(ctx, fm), a), fi);
}

// Action by a full series matrix. The inverse is computed by blockwise
// back-substitution, so F must be block upper triangular over `shape` with
// diagonal blocks z^{-mu_i} A_i (A_i constant invertible).
inline SeriesMatrix gauge_action(const QContext& ctx, const SeriesMatrix& f,
                                 const BlockShape& shape, const SeriesMatrix& a) {
    const SeriesMatrix fi = invert_block_upper(ctx, f, shape);
    return sm_mul(ctx, sm_mul(ctx, sm_sigma(ctx, f), a), fi);
}

inline BlockMatrix graded_part(const BlockMatrix& u) { return BlockMatrix(u.shape); }

}  // namespace qstokes
