#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "uavcomp/error.hpp"

namespace uavcomp {

enum class Transform {
    none,         // finite interval only
    rational_map  // [a, inf) -> [0, 1) via t = a + s*u/(1-u)
};

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_subdivisions = 4000;
    Transform transform = Transform::rational_map;
};

// `scale` is the characteristic width of the integrand when upper is infinite.
struct Interval {
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
    double scale = 1.0;
};

struct QuadratureResult {
    double value = 0.0;
    double err_est = 0.0;
    bool converged = false;
    int evaluations = 0;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes on [-1, 1].
inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> gk15_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, err;
    bool operator<(const Segment& o) const { return err < o.err; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * gk15_wk[7];
    double gauss = fc * gk15_wg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * gk15_x[j];
        const double s = f(c - dx) + f(c + dx);
        kron += gk15_wk[j] * s;
        if (j % 2 == 1) gauss += gk15_wg[j / 2] * s;
    }
    kron *= h;
    gauss *= h;
    return {a, b, kron, std::abs(kron - gauss)};
}

template <class F>
QuadratureResult adaptive(F& f, double a, double b, const QuadratureSpec& spec) {
    std::priority_queue<Segment> heap;
    QuadratureResult out;
    // Start from a few panels so narrow features near an endpoint are not missed.
    constexpr int initial = 4;
    double value = 0.0, err = 0.0;
    for (int i = 0; i < initial; ++i) {
        const double lo = a + (b - a) * i / initial;
        const double hi = (i + 1 == initial) ? b : a + (b - a) * (i + 1) / initial;
        Segment s = gk15(f, lo, hi);
        value += s.value;
        err += s.err;
        heap.push(s);
    }
    out.evaluations = 15 * initial;
    for (int it = 0; it < spec.max_subdivisions; ++it) {
        if (!std::isfinite(value)) break;
        if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value))) {
            out.converged = true;
            break;
        }
        Segment worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            heap.push(worst);
            break;
        }
        Segment left = gk15(f, worst.a, mid);
        Segment right = gk15(f, mid, worst.b);
        out.evaluations += 30;
        value += left.value + right.value - worst.value;
        err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    // Re-sum to shed accumulated cancellation in the running totals.
    value = 0.0;
    err = 0.0;
    while (!heap.empty()) {
        value += heap.top().value;
        err += heap.top().err;
        heap.pop();
    }
    out.value = value;
    out.err_est = err;
    out.converged = out.converged || err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(value));
    if (!std::isfinite(value)) out.converged = false;
    return out;
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over `dom`. Never throws on slow
// convergence; callers inspect `converged`.
template <class F>
QuadratureResult integrate(F&& f, const Interval& dom, const QuadratureSpec& spec = {}) {
    if (std::isnan(dom.lower) || std::isnan(dom.upper) || !std::isfinite(dom.lower))
        throw DomainError("integrate: lower limit must be finite");
    if (dom.upper < dom.lower) throw DomainError("integrate: upper < lower");
    if (dom.upper == dom.lower) return {0.0, 0.0, true, 0};
    if (std::isfinite(dom.upper)) {
        auto g = [&](double x) { return f(x); };
        return detail::adaptive(g, dom.lower, dom.upper, spec);
    }
    if (spec.transform != Transform::rational_map)
        throw DomainError("integrate: infinite upper limit needs the rational map");
    if (!(dom.scale > 0.0) || !std::isfinite(dom.scale)) throw DomainError("integrate: scale must be positive");
    const double a = dom.lower;
    const double s = dom.scale;
    auto g = [&](double u) {
        const double w = 1.0 - u;
        if (w <= 0.0) return 0.0;
        const double v = f(a + s * u / w) * s / (w * w);
        return std::isfinite(v) ? v : 0.0;
    };
    return detail::adaptive(g, 0.0, 1.0, spec);
}

}  // namespace uavcomp
