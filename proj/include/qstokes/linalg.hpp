#pragma once

// Dense complex matrices at desk scale (block sizes <= 8, Sylvester systems
// <= 64). Partial-pivot LU covers every solve in the toolkit.

#include <vector>

#include "core.hpp"

namespace qstokes {

struct CMat {
    int rows = 0, cols = 0;
    std::vector<cplx> a;  // row-major

    CMat() = default;
    CMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, cplx(0)) {}

    cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static CMat identity(int n) {
        CMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = cplx(1);
        return m;
    }
};

inline CMat operator+(const CMat& x, const CMat& y) {
    CMat r = x;
    for (size_t k = 0; k < r.a.size(); ++k) r.a[k] += y.a[k];
    return r;
}

inline CMat operator-(const CMat& x, const CMat& y) {
    CMat r = x;
    for (size_t k = 0; k < r.a.size(); ++k) r.a[k] -= y.a[k];
    return r;
}

inline CMat operator*(const CMat& x, const CMat& y) {
    CMat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const cplx xv = x(i, k);
            if (xv == cplx(0)) continue;
            for (int j = 0; j < y.cols; ++j) r(i, j) += xv * y(k, j);
        }
    return r;
}

inline CMat operator*(cplx s, const CMat& x) {
    CMat r = x;
    for (cplx& v : r.a) v *= s;
    return r;
}

inline real norm_inf(const CMat& m) {
    real v = 0;
    for (const cplx& x : m.a) v = std::max(v, std::abs(x));
    return v;
}

inline real norm_one(const CMat& m) {  // max column sum
    real best = 0;
    for (int j = 0; j < m.cols; ++j) {
        real s = 0;
        for (int i = 0; i < m.rows; ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

namespace detail {

struct LU {
    CMat lu;
    std::vector<int> piv;
    int sign = 1;
    bool singular = false;
};

inline LU lu_factor(CMat m) {
    const int n = m.rows;
    LU f{std::move(m), std::vector<int>(static_cast<size_t>(n)), 1, false};
    for (int k = 0; k < n; ++k) {
        int p = k;
        real best = std::abs(f.lu(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(f.lu(i, k)) > best) { best = std::abs(f.lu(i, k)); p = i; }
        f.piv[static_cast<size_t>(k)] = p;
        if (best == 0.0L) { f.singular = true; continue; }
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(f.lu(k, j), f.lu(p, j));
            f.sign = -f.sign;
        }
        for (int i = k + 1; i < n; ++i) {
            f.lu(i, k) /= f.lu(k, k);
            const cplx m_ik = f.lu(i, k);
            for (int j = k + 1; j < n; ++j) f.lu(i, j) -= m_ik * f.lu(k, j);
        }
    }
    return f;
}

inline CMat lu_solve(const LU& f, CMat b) {
    const int n = f.lu.rows;
    for (int k = 0; k < n; ++k) {
        const int p = f.piv[static_cast<size_t>(k)];
        if (p != k)
            for (int j = 0; j < b.cols; ++j) std::swap(b(k, j), b(p, j));
        for (int i = k + 1; i < n; ++i)
            for (int j = 0; j < b.cols; ++j) b(i, j) -= f.lu(i, k) * b(k, j);
    }
    for (int k = n - 1; k >= 0; --k) {
        for (int j = 0; j < b.cols; ++j) b(k, j) /= f.lu(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < b.cols; ++j) b(i, j) -= f.lu(i, k) * b(k, j);
    }
    return b;
}

}  // namespace detail

inline cplx det(const CMat& m) {
    auto f = detail::lu_factor(m);
    if (f.singular) return cplx(0);
    cplx d(static_cast<real>(f.sign));
    for (int i = 0; i < m.rows; ++i) d *= f.lu(i, i);
    return d;
}

inline CMat solve(const CMat& m, const CMat& rhs, const char* what = "solve") {
    auto f = detail::lu_factor(m);
    if (f.singular) throw numeric_error(std::string(what) + ": singular system");
    return detail::lu_solve(f, rhs);
}

inline CMat inverse(const CMat& m, const char* what = "inverse") {
    return solve(m, CMat::identity(m.rows), what);
}

// One-norm condition number via the explicit inverse; fine at these sizes.
inline real cond_one(const CMat& m) {
    auto f = detail::lu_factor(m);
    if (f.singular) return std::numeric_limits<real>::infinity();
    const CMat inv = detail::lu_solve(f, CMat::identity(m.rows));
    return norm_one(m) * norm_one(inv);
}

inline CMat matpow(const CMat& m, int e) {  // e >= 0
    CMat r = CMat::identity(m.rows), b = m;
    for (int k = e; k > 0; k >>= 1) {
        if (k & 1) r = r * b;
        if (k > 1) b = b * b;
    }
    return r;
}

}  // namespace qstokes
