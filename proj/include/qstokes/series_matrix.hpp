#pragma once

// Matrices with WindowedLaurent entries, plus the restricted inversion needed
// for the gauge action (block upper triangular with monomial diagonal blocks).

#include <vector>

#include "laurent.hpp"
#include "linalg.hpp"

namespace qstokes {

struct SeriesMatrix {
    int rows = 0, cols = 0;
    std::vector<WindowedLaurent> e;

    SeriesMatrix() = default;
    SeriesMatrix(int r, int c) : rows(r), cols(c), e(static_cast<size_t>(r) * c) {}

    WindowedLaurent& operator()(int i, int j) { return e[static_cast<size_t>(i) * cols + j]; }
    const WindowedLaurent& operator()(int i, int j) const {
        return e[static_cast<size_t>(i) * cols + j];
    }
};

inline SeriesMatrix sm_from_const(const CMat& m) {
    SeriesMatrix r(m.rows, m.cols);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            if (m(i, j) != cplx(0)) r(i, j) = constant(m(i, j));
    return r;
}

inline SeriesMatrix sm_identity(int n) { return sm_from_const(CMat::identity(n)); }

inline SeriesMatrix sm_add(const SeriesMatrix& x, const SeriesMatrix& y) {
    SeriesMatrix r(x.rows, x.cols);
    for (size_t k = 0; k < r.e.size(); ++k) r.e[k] = add(x.e[k], y.e[k]);
    return r;
}

inline SeriesMatrix sm_sub(const SeriesMatrix& x, const SeriesMatrix& y) {
    SeriesMatrix r(x.rows, x.cols);
    for (size_t k = 0; k < r.e.size(); ++k) r.e[k] = sub(x.e[k], y.e[k]);
    return r;
}

inline SeriesMatrix sm_scale(const SeriesMatrix& x, cplx s) {
    SeriesMatrix r = x;
    for (auto& f : r.e) f = scale(f, s);
    return r;
}

inline SeriesMatrix sm_mul(const QContext& ctx, const SeriesMatrix& x, const SeriesMatrix& y) {
    SeriesMatrix r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < y.cols; ++j) {
            WindowedLaurent acc;
            for (int k = 0; k < x.cols; ++k) {
                if (x(i, k).empty() || y(k, j).empty()) continue;
                acc = add(acc, mul(ctx, x(i, k), y(k, j)));
            }
            r(i, j) = acc;
        }
    return r;
}

inline SeriesMatrix sm_sigma(const QContext& ctx, const SeriesMatrix& x, int m = 1) {
    SeriesMatrix r = x;
    for (auto& f : r.e) f = sigma_q(ctx, f, m);
    return r;
}

inline CMat sm_eval(const SeriesMatrix& x, cplx z) {
    CMat r(x.rows, x.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) r(i, j) = x(i, j).empty() ? cplx(0) : evaluate(x(i, j), z);
    return r;
}

inline real sm_norm(const SeriesMatrix& x) {
    real m = 0;
    for (const auto& f : x.e) m = std::max(m, max_abs(f));
    return m;
}

// Largest trusted coefficient deviation between two series matrices.
inline real sm_max_diff(const SeriesMatrix& x, const SeriesMatrix& y) {
    real m = 0;
    for (size_t k = 0; k < x.e.size(); ++k) m = std::max(m, max_diff_on_exact(x.e[k], y.e[k]));
    return m;
}

}  // namespace qstokes
