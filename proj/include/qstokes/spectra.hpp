#pragma once

// Eigenvalues of the constant blocks via Durand-Kerner iteration on the
// characteristic polynomial. Block sizes stay <= 8, where this is robust and
// dependency-free.

#include <vector>

#include "shape.hpp"

namespace qstokes {

// Monic characteristic polynomial by the Faddeev-LeVerrier recursion.
// Returns p with p[k] = coefficient of lambda^{n-k}, p[0] = 1.
inline std::vector<cplx> char_poly(const CMat& a) {
    const int n = a.rows;
    std::vector<cplx> p(static_cast<size_t>(n) + 1, cplx(0));
    p[0] = cplx(1);
    CMat m = a;
    for (int k = 1; k <= n; ++k) {
        cplx tr(0);
        for (int i = 0; i < n; ++i) tr += m(i, i);
        p[static_cast<size_t>(k)] = -tr / static_cast<real>(k);
        if (k < n) {
            CMat shifted = m;
            for (int i = 0; i < n; ++i) shifted(i, i) += p[static_cast<size_t>(k)];
            m = a * shifted;
        }
    }
    return p;
}

inline cplx poly_eval(const std::vector<cplx>& p, cplx x) {
    cplx v(0);
    for (const cplx& c : p) v = v * x + c;
    return v;
}

// All roots of a monic polynomial, multiplicity repeated.
inline std::vector<cplx> durand_kerner(const std::vector<cplx>& p, int max_iter = 2000) {
    const int n = static_cast<int>(p.size()) - 1;
    if (n <= 0) return {};
    real bound = 0;
    for (size_t k = 1; k < p.size(); ++k) bound = std::max(bound, std::abs(p[k]));
    const real radius = 1.0L + bound;  // Cauchy bound on root moduli

    std::vector<cplx> x(static_cast<size_t>(n));
    const cplx seed(0.4L, 0.9L);  // customary aperiodic start
    cplx w = seed;
    for (int i = 0; i < n; ++i, w *= seed) x[static_cast<size_t>(i)] = radius * w;

    for (int it = 0; it < max_iter; ++it) {
        real worst = 0;
        for (int i = 0; i < n; ++i) {
            cplx denom(1);
            for (int j = 0; j < n; ++j)
                if (j != i) denom *= x[static_cast<size_t>(i)] - x[static_cast<size_t>(j)];
            if (denom == cplx(0)) denom = cplx(1e-30L);
            const cplx delta = poly_eval(p, x[static_cast<size_t>(i)]) / denom;
            x[static_cast<size_t>(i)] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst <= 1e-17L * (1.0L + radius)) break;
    }

    for (const cplx& root : x) {
        real scale = std::max(static_cast<real>(1), std::abs(root));
        real pscale = 0, power = 1;
        for (int k = n; k >= 0; --k) {
            pscale = std::max(pscale, std::abs(p[static_cast<size_t>(k)]) * power);
            power *= scale;
        }
        if (std::abs(poly_eval(p, root)) > 1e-8L * pscale)
            throw numeric_error("spectra: root finder did not converge");
    }
    return x;
}

inline std::vector<cplx> eigenvalues(const CMat& a) {
    if (a.rows > 8)
        throw validation_error("spectra: constant blocks larger than 8x8 are unsupported");
    return durand_kerner(char_poly(a));
}

// Sp(A_i) for every block of the shape.
inline std::vector<std::vector<cplx>> spectra(const BlockShape& shape) {
    std::vector<std::vector<cplx>> sp;
    sp.reserve(shape.constants.size());
    for (const CMat& a : shape.constants) sp.push_back(eigenvalues(a));
    return sp;
}

}  // namespace qstokes
