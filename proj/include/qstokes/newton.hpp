#pragma once

// Newton polygon of a q-difference operator sum a_i(z) sigma^i: lower convex
// hull of the points (i, v(a_i)). Sign convention: the operator z sigma - 1
// (the pure module of slope 1) reports slope 1. Diagnostic only; the pipeline
// always receives systems already in canonical form.

#include <utility>
#include <vector>

#include "laurent.hpp"

namespace qstokes {

struct NewtonSlope {
    real slope;
    int multiplicity;  // horizontal extent of the hull segment
};

inline std::vector<NewtonSlope> newton_polygon(const QContext& ctx,
                                               const std::vector<WindowedLaurent>& coeffs) {
    if (coeffs.size() < 2) throw validation_error("newton_polygon: need at least two coefficients");

    std::vector<std::pair<int, int>> pts;  // (i, v(a_i)) for nonzero a_i
    for (size_t i = 0; i < coeffs.size(); ++i) {
        const int v = valuation(coeffs[i], ctx.tol);
        if (v != kValInf) pts.emplace_back(static_cast<int>(i), v);
    }
    if (pts.empty() || pts.front().first != 0 ||
        pts.back().first != static_cast<int>(coeffs.size()) - 1)
        throw validation_error("newton_polygon: leading and trailing coefficients must be nonzero");

    // lower hull, left to right (points already sorted by i)
    std::vector<std::pair<int, int>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            const long long cross = static_cast<long long>(b.first - a.first) * (p.second - a.second) -
                                    static_cast<long long>(b.second - a.second) * (p.first - a.first);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }

    std::vector<NewtonSlope> slopes;
    for (size_t s = 0; s + 1 < hull.size(); ++s) {
        const int dx = hull[s + 1].first - hull[s].first;
        const real sl = static_cast<real>(hull[s + 1].second - hull[s].second) / dx;
        slopes.push_back({sl, dx});
    }
    std::sort(slopes.begin(), slopes.end(),
              [](const NewtonSlope& a, const NewtonSlope& b) { return a.slope > b.slope; });
    return slopes;
}

}  // namespace qstokes
