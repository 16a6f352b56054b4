#pragma once
#include <cmath>
#include <cstddef>
#include <vector>

#include "levyruin/errors.hpp"

namespace levyruin {

// Adaptive Gauss-Kronrod (G7,K15) on finite intervals, bisecting the interval
// with the largest error estimate until the absolute-tolerance target holds.
namespace detail {
// Kronrod-15 nodes on [0,1] side (symmetric) and weights; Gauss-7 weights.
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526, 0.949107912342758524526189684048,
    0.864864423359769072789712788641, 0.741531185599394439863864773281,
    0.586087235467691130294144838259, 0.405845151377397166906606412077,
    0.207784955007898467600689403773, 0.0};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
} // namespace detail

template <typename F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * detail::kKronrodNodes[i]);
        fv[14 - i] = f(c + h * detail::kKronrodNodes[i]);
    }
    fv[7] = f(c);
    double kron = detail::kKronrodWeights[7] * fv[7];
    for (int i = 0; i < 7; ++i) kron += detail::kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    // Gauss-7 uses the odd Kronrod nodes (indices 1,3,5) plus the centre.
    double gauss = detail::kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i)
        gauss += detail::kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    result = kron * h;
    err = std::abs((kron - gauss) * h);
}

template <typename F>
inline double integrate(const F& f, double a, double b, double abs_tol = 1e-10,
                        std::size_t max_intervals = 4000) {
    if (!(b > a)) return 0.0;
    struct Seg {
        double a, b, val, err;
    };
    std::vector<Seg> segs;
    double v, e;
    gk15(f, a, b, v, e);
    segs.push_back({a, b, v, e});
    double total_err = e;
    while (total_err > abs_tol) {
        if (segs.size() >= max_intervals)
            throw ConvergenceError("integrate: interval budget exhausted before tolerance");
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].err > segs[worst].err) worst = i;
        Seg s = segs[worst];
        const double mid = 0.5 * (s.a + s.b);
        if (mid <= s.a || mid >= s.b) break; // interval at double resolution
        Seg left{s.a, mid, 0, 0}, right{mid, s.b, 0, 0};
        gk15(f, left.a, left.b, left.val, left.err);
        gk15(f, right.a, right.b, right.val, right.err);
        total_err += left.err + right.err - s.err;
        segs[worst] = left;
        segs.push_back(right);
    }
    double total = 0.0;
    for (const auto& s : segs) total += s.val;
    return total;
}

// Integral over [a, inf) of an integrand dominated by bound_scale*e^{-decay x}:
// truncates where the analytic tail bound drops below tail_tol and integrates
// the finite piece adaptively.
template <typename F>
inline double integrate_exp_tail(const F& f, double a, double decay, double bound_scale,
                                 double abs_tol = 1e-10, double tail_tol = 1e-12) {
    if (decay <= 0.0) throw DomainError("integrate_exp_tail: nonpositive decay rate");
    if (bound_scale <= 0.0) bound_scale = 1.0;
    double cut = a + std::log(bound_scale / (decay * tail_tol)) / decay;
    if (cut <= a) cut = a + 1.0 / decay;
    return integrate(f, a, cut, abs_tol);
}

} // namespace levyruin
