#pragma once
#include <cmath>

#include "levyruin/errors.hpp"

namespace levyruin {

// Root of a strictly increasing function on [lo, hi] with g(lo) <= 0 <= g(hi):
// bisection until the bracket is tight, then a few Newton polish steps using a
// secant-estimated derivative. Residual-based stop: |g(x)| <= tol.
template <typename F>
inline double solve_increasing(const F& g, double lo, double hi, double tol = 1e-12,
                               int max_iter = 200) {
    double glo = g(lo);
    double ghi = g(hi);
    if (glo > 0.0 || ghi < 0.0) throw ConvergenceError("solve_increasing: root not bracketed");
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < max_iter; ++it) {
        const double gx = g(x);
        if (std::abs(gx) <= tol) return x;
        if (gx > 0.0) {
            hi = x;
            ghi = gx;
        } else {
            lo = x;
            glo = gx;
        }
        // Secant proposal, kept only when it stays inside the bracket.
        double xn = x - gx * (hi - lo) / (ghi - glo);
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi);
        x = xn;
        if (hi - lo <= 1e-16 * (1.0 + std::abs(x))) return x;
    }
    return x;
}

// Expands hi geometrically until g(hi) >= 0. g must be increasing with
// g(lo) <= 0 somewhere reachable; throws after max_expand doublings.
template <typename F>
inline double expand_upper_bracket(const F& g, double lo, double step0 = 1.0,
                                   int max_expand = 1000) {
    double hi = lo + step0;
    for (int i = 0; i < max_expand; ++i) {
        if (g(hi) >= 0.0) return hi;
        hi = lo + (hi - lo) * 2.0;
    }
    throw ConvergenceError("expand_upper_bracket: no sign change after expansion budget");
}

} // namespace levyruin
