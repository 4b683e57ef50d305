#ifndef FFB_BARRIER2_HPP
#define FFB_BARRIER2_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "ffb/ball.hpp"
#include "ffb/common.hpp"

namespace ffb {

// Radial quintic cutoff: 0 on [0, 1/2], 1 on [3/4, 1], monotone in between.
inline double barrier_cutoff(double r) {
    if (r <= 0.5) return 0.0;
    if (r >= 0.75) return 1.0;
    double t = (r - 0.5) / 0.25;
    return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

// Scalar inequality behind the subsolution energy comparison:
//   phi(s) = (s-t)(gamma t^{gamma-1} + M s^{gamma-1})/2  dominates
//   psi(s) = s^gamma - t^gamma  for s > t >= 0 when M >= 2.
struct DominanceCheck {
    bool holds = true;
    double worst_margin = 1e300;
    double worst_t = 0.0, worst_s = 0.0;
};

inline double phi_fn(double gamma, double M, double t, double s) {
    double tp = (t > 0) ? std::pow(t, gamma - 1.0) : 0.0; // gamma * t^{gamma-1} * (s-t) -> 0 as t -> 0
    return 0.5 * (s - t) * (gamma * tp + M * std::pow(s, gamma - 1.0));
}
inline double psi_fn(double gamma, double t, double s) {
    return std::pow(s, gamma) - ((t > 0) ? std::pow(t, gamma) : 0.0);
}

inline DominanceCheck phi_psi_dominance(double gamma, double M, double t,
                                        double s_max = 1e4, int s_samples = 200) {
    DominanceCheck out;
    for (double mult : logspace(1.0 + 1e-6, s_max, s_samples)) {
        double s = (t > 0) ? t * mult : (mult - 1.0);
        if (s <= t) continue;
        double margin = phi_fn(gamma, M, t, s) - psi_fn(gamma, t, s);
        double rel = margin / std::max(psi_fn(gamma, t, s), 1e-300);
        if (rel < out.worst_margin) {
            out.worst_margin = rel;
            out.worst_t = t;
            out.worst_s = s;
        }
        if (margin < -1e-12 * std::max(1.0, std::abs(psi_fn(gamma, t, s)))) out.holds = false;
    }
    return out;
}

inline DominanceCheck phi_psi_dominance_sweep(double gamma, double M) {
    DominanceCheck worst;
    std::vector<double> ts{0.0};
    for (double t : logspace(1e-6, 1e3, 60)) ts.push_back(t);
    for (double t : ts) {
        DominanceCheck c = phi_psi_dominance(gamma, M, t);
        if (!c.holds) worst.holds = false;
        if (c.worst_margin < worst.worst_margin) {
            worst.worst_margin = c.worst_margin;
            worst.worst_t = c.worst_t;
            worst.worst_s = c.worst_s;
        }
    }
    return worst;
}

struct Barrier2Report {
    double margin_core_lap = 0.0;    // min over B_{7/8} of (Lap_h w - 1)
    double margin_core_size = 0.0;   // min over B_{7/8} of w - 2^{1/(1-gamma)}
    double margin_annulus_pos = 0.0; // min over annulus of w2 + w3
    double margin_annulus_ratio = 0.0; // min closed-form Lap w1 / w1^{gamma-1} - 2
    double margin_nonneg = 0.0;      // min over ball of w
    double margin_direct = 0.0;      // min over {w > theta} of Lap_h w - 2 w^{gamma-1}
    double w_center = 0.0;
    bool cleared = false;
};

struct BarrierBundle2nd {
    double gamma = 0.0;
    double beta = 0.0;     // 2/(2-gamma)
    double lambda = 0.0;
    double mu = 0.0;
    double boundary_avg = 0.0;
    double cutoff_grad_bound = 0.0; // measured max |grad eta| on the grid
    double cutoff_lap_bound = 0.0;  // measured max |Lap eta|
    std::vector<double> w1, w2, w3, w;
    Barrier2Report report;
};

namespace detail {

inline double w1_radial(double r, double lambda, double beta) {
    double eta = barrier_cutoff(r);
    double core = (r < 1.0) ? std::pow(1.0 - r, beta) : 0.0;
    return lambda * (eta * core + (1.0 - eta));
}

// Lap w1 / w1^{gamma-1} in the pure-power region (eta = 1).
inline double w1_ratio(double r, double lambda, double beta, double gamma, int n) {
    return std::pow(lambda, 2.0 - gamma) * beta * ((beta - 1.0) - (n - 1) * (1.0 - r) / r);
}

} // namespace detail

// Builds w = w1 + w2 + w3 per the three-part construction: a boundary-layer
// power profile, a paraboloid pushing the Laplacian above 1, and the harmonic
// lift of the boundary data. lambda and mu come from doubling searches with
// grid verification; small boundary averages yield cleared == false rather
// than an error (bisection drivers rely on that).
inline BarrierBundle2nd build_barrier_2nd(const BallGrid& g,
                                          const std::function<double(std::array<double, 3>)>& data,
                                          double gamma) {
    if (!(gamma > 0 && gamma < 1)) throw param_error("build_barrier_2nd: gamma outside (0,1)");
    const int n = g.dim();
    BarrierBundle2nd B;
    B.gamma = gamma;
    B.beta = 2.0 / (2.0 - gamma);
    const std::size_t N = g.count();

    // boundary average of the data over stair nodes (projected to the sphere)
    {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (std::size_t p = 0; p < N; ++p)
            if (g.role(p) == BallGrid::Role::Boundary) {
                auto X = g.position(p);
                double r = std::sqrt(BallGrid::norm2(X));
                if (r > 0)
                    for (auto& c : X) c *= g.radius() / r;
                double v = data(X);
                if (v < 0) throw param_error("build_barrier_2nd: boundary data must be non-negative");
                acc += v;
                ++cnt;
            }
        B.boundary_avg = cnt ? acc / cnt : 0.0;
    }

    // lambda: smallest doubling/bisection value with the closed-form ratio
    // >= 2 on [7/8, 1) and the grid Laplacian dominating on the annulus
    auto lambda_ok = [&](double lam) {
        double worst = 1e300;
        for (double r : linspace(7.0 / 8.0, 1.0 - 1e-9, 257))
            worst = std::min(worst, detail::w1_ratio(r, lam, B.beta, gamma, n));
        return worst >= 2.0;
    };
    double lam = 1.0;
    int guard = 0;
    while (!lambda_ok(lam) && guard++ < 60) lam *= 2.0;
    if (guard >= 60) throw param_error("build_barrier_2nd: lambda search failed (n too large?)");
    {
        double lo = lam / 2.0, hi = lam;
        for (int k = 0; k < 20; ++k) {
            double mid = 0.5 * (lo + hi);
            (lambda_ok(mid) ? hi : lo) = mid;
        }
        lam = hi;
    }
    B.lambda = lam;

    B.w1.assign(N, 0.0);
    for (std::size_t p = 0; p < N; ++p) {
        auto X = g.position(p);
        B.w1[p] = detail::w1_radial(std::sqrt(BallGrid::norm2(X)), lam, B.beta);
    }

    // measured cutoff bounds (the construction only needs them finite)
    {
        std::vector<double> eta(N, 0.0);
        for (std::size_t p = 0; p < N; ++p)
            eta[p] = barrier_cutoff(std::sqrt(BallGrid::norm2(g.position(p))));
        double grad = 0.0, lap = 0.0;
        for (std::size_t p = 0; p < N; ++p) {
            if (g.role(p) != BallGrid::Role::Interior) continue;
            lap = std::max(lap, std::abs(g.laplacian(eta, p)));
            auto ix = g.unpack(p);
            for (int d = 0; d < g.dim(); ++d) {
                auto a = ix, b = ix;
                a[d] -= 1;
                b[d] += 1;
                grad = std::max(grad, std::abs(eta[g.pack(b)] - eta[g.pack(a)]) / (2 * g.h()));
            }
        }
        B.cutoff_grad_bound = grad;
        B.cutoff_lap_bound = lap;
    }

    // mu from the measured -Lap w1 bound inside B_{7/8}
    {
        double m1 = 0.0;
        for (std::size_t p = 0; p < N; ++p) {
            if (g.role(p) != BallGrid::Role::Interior) continue;
            auto X = g.position(p);
            if (BallGrid::norm2(X) > sqr(7.0 / 8.0)) continue;
            m1 = std::max(m1, -g.laplacian(B.w1, p));
        }
        B.mu = (1.0 + m1) / (2.0 * n) * (1.0 + 1e-9);
    }
    B.w2.assign(N, 0.0);
    for (std::size_t p = 0; p < N; ++p) {
        auto X = g.position(p);
        B.w2[p] = B.mu * (BallGrid::norm2(X) - 1.0);
    }

    B.w3 = ball_harmonic(g, data);

    B.w.assign(N, 0.0);
    for (std::size_t p = 0; p < N; ++p) B.w[p] = B.w1[p] + B.w2[p] + B.w3[p];
    return B;
}

// Grid verification through the split the construction is designed around:
// Lap w >= 1 >= 2 w^{gamma-1} inside B_{7/8}, and on the annulus
// Lap w >= Lap w1 >= 2 w1^{gamma-1} >= 2 w^{gamma-1} via w2 + w3 >= 0.
inline Barrier2Report verify_subsolution_2nd(const BallGrid& g, BarrierBundle2nd& B) {
    const std::size_t N = g.count();
    Barrier2Report r;
    const double size_req = std::pow(2.0, 1.0 / (1.0 - B.gamma));
    double theta = 1e-8 * (1.0 + *std::max_element(B.w.begin(), B.w.end()));
    r.margin_core_lap = 1e300;
    r.margin_core_size = 1e300;
    r.margin_annulus_pos = 1e300;
    r.margin_nonneg = 1e300;
    r.margin_direct = 1e300;
    for (std::size_t p = 0; p < N; ++p) {
        if (g.role(p) == BallGrid::Role::Outside) continue;
        auto X = g.position(p);
        double rad2 = BallGrid::norm2(X);
        r.margin_nonneg = std::min(r.margin_nonneg, B.w[p]);
        bool interior = (g.role(p) == BallGrid::Role::Interior);
        if (rad2 <= sqr(7.0 / 8.0)) {
            if (interior)
                r.margin_core_lap = std::min(r.margin_core_lap, g.laplacian(B.w, p) - 1.0);
            r.margin_core_size = std::min(r.margin_core_size, B.w[p] - size_req);
        } else {
            r.margin_annulus_pos = std::min(r.margin_annulus_pos, B.w2[p] + B.w3[p]);
        }
        if (interior && B.w[p] > theta)
            r.margin_direct = std::min(
                r.margin_direct, g.laplacian(B.w, p) - 2.0 * std::pow(B.w[p], B.gamma - 1.0));
    }
    r.margin_annulus_ratio = 1e300;
    for (double rad : linspace(7.0 / 8.0, 1.0 - 1e-9, 257))
        r.margin_annulus_ratio = std::min(
            r.margin_annulus_ratio, detail::w1_ratio(rad, B.lambda, B.beta, B.gamma, g.dim()) - 2.0);
    {
        auto ix = g.unpack(0);
        (void)ix;
        std::array<int, 3> c{(g.nodes_per_axis() - 1) / 2, (g.nodes_per_axis() - 1) / 2,
                             (g.nodes_per_axis() - 1) / 2};
        if (g.dim() == 2) c[2] = 0;
        r.w_center = B.w[g.pack(c)];
    }
    r.cleared = r.margin_core_lap >= 0 && r.margin_core_size >= 0 && r.margin_annulus_pos >= 0 &&
                r.margin_annulus_ratio >= 0 && r.margin_nonneg >= -1e-12 && r.w_center > 0;
    B.report = r;
    return r;
}

// Lower bound of the harmonic part by the truncated fundamental solution:
// on the annulus, w3 >= kappa (|x|^{2-n} - 1) (log(1/|x|) in the plane) with
// kappa matching the Harnack level of w3 on the inner sphere.
struct FundamentalComparison {
    double harnack_const = 0.0; // min_{B_{7/8}} w3 / boundary average
    double kappa = 0.0;
    double worst_margin = 0.0;
    bool holds = false;
};

inline FundamentalComparison fundamental_solution_check(const BallGrid& g,
                                                        const BarrierBundle2nd& B) {
    FundamentalComparison out;
    if (B.boundary_avg <= 0) return out;
    double inner_min = 1e300;
    for (std::size_t p = 0; p < g.count(); ++p) {
        if (g.role(p) == BallGrid::Role::Outside) continue;
        if (BallGrid::norm2(g.position(p)) <= sqr(7.0 / 8.0))
            inner_min = std::min(inner_min, B.w3[p]);
    }
    out.harnack_const = inner_min / B.boundary_avg;
    const int n = g.dim();
    double denom = (n == 2) ? std::log(8.0 / 7.0) : (std::pow(8.0 / 7.0, n - 2) - 1.0);
    out.kappa = out.harnack_const * B.boundary_avg / denom;
    out.worst_margin = 1e300;
    for (std::size_t p = 0; p < g.count(); ++p) {
        if (g.role(p) == BallGrid::Role::Outside) continue;
        double rad = std::sqrt(BallGrid::norm2(g.position(p)));
        if (rad < 7.0 / 8.0 || rad >= 1.0) continue;
        double fund = (n == 2) ? std::log(1.0 / rad) : (std::pow(rad, 2 - n) - 1.0);
        out.worst_margin = std::min(out.worst_margin, B.w3[p] - out.kappa * fund);
    }
    out.holds = out.worst_margin >= -1e-9 * std::max(1.0, B.boundary_avg);
    return out;
}

struct ComparisonReport {
    double min_difference = 0.0;   // min over nodes of u - w
    double violation_measure = 0.0; // measure of {w > u + theta}
    bool pass = false;
};

inline ComparisonReport verify_comparison_ball(const BallGrid& g, const std::vector<double>& u,
                                               const std::vector<double>& w, double theta) {
    ComparisonReport rep;
    rep.min_difference = 1e300;
    const double hm = std::pow(g.h(), g.dim());
    for (std::size_t p = 0; p < g.count(); ++p) {
        if (g.role(p) == BallGrid::Role::Outside) continue;
        double d = u[p] - w[p];
        rep.min_difference = std::min(rep.min_difference, d);
        if (w[p] > u[p] + theta) rep.violation_measure += hm;
    }
    rep.pass = rep.min_difference >= -theta;
    return rep;
}

} // namespace ffb

#endif
