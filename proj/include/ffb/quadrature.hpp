#ifndef FFB_QUADRATURE_HPP
#define FFB_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ffb/common.hpp"

namespace ffb {

// Nodes/weights for quadrature rules assembled from Gauss-Legendre panels.
struct QuadRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    template <class F>
    double integrate(F&& f) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) s += weights[i] * f(nodes[i]);
        return s;
    }
};

namespace detail {

// 12-point Gauss-Legendre on [-1, 1].
inline const double gl12_x[6] = {
    0.1252334085114689, 0.3678314989981802, 0.5873179542866175,
    0.7699026741943047, 0.9041172563704749, 0.9815606342467192};
inline const double gl12_w[6] = {
    0.2491470458134028, 0.2334925365383548, 0.2031674267230659,
    0.1600783285433462, 0.1069393259953184, 0.0471753363865118};

inline void append_panel(QuadRule& q, double lo, double hi) {
    const double c = 0.5 * (lo + hi);
    const double h = 0.5 * (hi - lo);
    for (int k = 0; k < 6; ++k) {
        q.nodes.push_back(c - h * gl12_x[k]);
        q.weights.push_back(h * gl12_w[k]);
        q.nodes.push_back(c + h * gl12_x[k]);
        q.weights.push_back(h * gl12_w[k]);
    }
}

} // namespace detail

// Panels of equal width over [lo, hi].
inline QuadRule uniform_rule(double lo, double hi, int panels) {
    QuadRule q;
    for (int p = 0; p < panels; ++p) {
        double a = lo + (hi - lo) * p / panels;
        double b = lo + (hi - lo) * (p + 1) / panels;
        detail::append_panel(q, a, b);
    }
    return q;
}

// Panels geometrically refined toward `hi` (singular endpoint on the right).
// The last panel has width ~ (hi-lo) * ratio^levels; integrable endpoint
// singularities converge exponentially in `levels`.
inline QuadRule graded_rule_right(double lo, double hi, int levels, double ratio = 0.5) {
    if (hi <= lo) throw param_error("graded_rule_right: empty interval");
    QuadRule q;
    double len = hi - lo;
    double cut = lo;
    for (int l = 0; l < levels; ++l) {
        double next = hi - len * std::pow(ratio, l + 1);
        detail::append_panel(q, cut, next);
        cut = next;
    }
    detail::append_panel(q, cut, hi);
    return q;
}

inline QuadRule graded_rule_left(double lo, double hi, int levels, double ratio = 0.5) {
    QuadRule right = graded_rule_right(-hi, -lo, levels, ratio);
    QuadRule q;
    for (std::size_t i = 0; i < right.nodes.size(); ++i) {
        q.nodes.push_back(-right.nodes[i]);
        q.weights.push_back(right.weights[i]);
    }
    return q;
}

// Graded toward both endpoints; used for kernels singular at each end.
inline QuadRule graded_rule_both(double lo, double hi, int levels, double ratio = 0.5) {
    double mid = 0.5 * (lo + hi);
    QuadRule a = graded_rule_left(lo, mid, levels, ratio);
    QuadRule b = graded_rule_right(mid, hi, levels, ratio);
    a.nodes.insert(a.nodes.end(), b.nodes.begin(), b.nodes.end());
    a.weights.insert(a.weights.end(), b.weights.begin(), b.weights.end());
    return a;
}

// Graded toward an interior point x0 from both sides, excluding a ball of
// radius `eps` around it (principal-value style near-field handling is done
// by the caller via Taylor subtraction; eps may be 0 when the integrand is
// already regularized).
inline QuadRule graded_rule_around(double lo, double hi, double x0, int levels,
                                   double eps = 0.0, double ratio = 0.5) {
    QuadRule q;
    if (x0 - eps > lo) {
        QuadRule l = graded_rule_right(lo, x0 - eps, levels, ratio);
        q.nodes.insert(q.nodes.end(), l.nodes.begin(), l.nodes.end());
        q.weights.insert(q.weights.end(), l.weights.begin(), l.weights.end());
    }
    if (x0 + eps < hi) {
        QuadRule r = graded_rule_left(x0 + eps, hi, levels, ratio);
        q.nodes.insert(q.nodes.end(), r.nodes.begin(), r.nodes.end());
        q.weights.insert(q.weights.end(), r.weights.begin(), r.weights.end());
    }
    return q;
}

} // namespace ffb

#endif
