#ifndef FFB_RIESZ_HPP
#define FFB_RIESZ_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "ffb/common.hpp"
#include "ffb/fit.hpp"
#include "ffb/params.hpp"
#include "ffb/quadrature.hpp"

namespace ffb {

// Singular-integral constant of (-Laplace)^sigma under the |xi|^{2 sigma}
// Fourier symbol convention.
inline double frac_laplacian_constant(int n, double sigma) {
    return std::pow(4.0, sigma) * std::tgamma(0.5 * n + sigma) * sigma /
           (std::pow(pi, 0.5 * n) * std::tgamma(1.0 - sigma));
}

// Riesz kernel constant: I_alpha f = riesz_constant * int f(z) |x-z|^{alpha-n} dz.
// Negative for alpha > n (the analytically continued kernel); the log case
// alpha == n is handled separately.
inline double riesz_constant(int n, double alpha) {
    return std::tgamma(0.5 * (n - alpha)) /
           (std::pow(2.0, alpha) * std::pow(pi, 0.5 * n) * std::tgamma(0.5 * alpha));
}

inline bool riesz_variant_flagged(int n, double sigma) { return 2.0 * sigma >= n; }

// Piecewise-linear radial samples; `exact` (when present) is the closed form
// used by quadrature, and the endpoint power behavior at `singular_radius`
// is kept symbolically so graded rules can target it.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> v;
    int n = 1;
    double singular_radius = std::numeric_limits<double>::quiet_NaN();
    double singular_exponent = 0.0;
    std::function<double(double)> exact;

    double support_radius() const { return r.empty() ? 0.0 : r.back(); }

    double eval(double rr) const {
        if (exact) return exact(rr);
        if (r.empty() || rr < r.front() || rr > r.back()) return 0.0;
        std::size_t hi = std::upper_bound(r.begin(), r.end(), rr) - r.begin();
        if (hi == 0) return v.front();
        if (hi >= r.size()) return v.back();
        std::size_t lo = hi - 1;
        double t = (rr - r[lo]) / (r[hi] - r[lo]);
        return (1.0 - t) * v[lo] + t * v[hi];
    }
};

// psi(x) = -(1 - 3|x|)^{beta - 2 sigma} on B_{1/3}, 0 outside; the model
// boundary datum whose Riesz potential seeds the fractional barrier. The
// exponent satisfies beta - 2 sigma = beta (gamma - 1) in (-1, 0).
inline RadialProfile psi_barrier(const EnergyParams& params) {
    const double p = params.beta() - 2.0 * params.sigma();
    if (!(p > -1.0)) throw param_error("psi_barrier: exponent must exceed -1");
    RadialProfile f;
    f.n = params.n();
    f.singular_radius = 1.0 / 3.0;
    f.singular_exponent = p;
    f.exact = [p](double rr) {
        if (rr >= 1.0 / 3.0) return 0.0;
        return -std::pow(1.0 - 3.0 * rr, p);
    };
    // graded samples clustering at the ring r = 1/3
    std::vector<double> rs{0.0};
    for (double t : logspace(1e-10, 1.0, 161))
        if (t < 1.0) rs.push_back((1.0 / 3.0) * (1.0 - t));
    rs.push_back(1.0 / 3.0);
    std::sort(rs.begin(), rs.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    for (double rr : rs) {
        f.r.push_back(rr);
        // the stored sample at the singular ring is clipped; quadrature uses
        // the exact form together with the symbolic exponent
        f.v.push_back(rr < 1.0 / 3.0 ? f.exact(rr) : 0.0);
    }
    return f;
}

namespace detail {

// Partition [0, hi] at the given special points and integrate with panels
// graded toward every special endpoint.
template <class G>
inline double integrate_graded(double hi, std::vector<double> special, int levels, G&& fn) {
    special.push_back(0.0);
    special.push_back(hi);
    std::sort(special.begin(), special.end());
    special.erase(std::unique(special.begin(), special.end(),
                              [](double a, double b) { return std::abs(a - b) < 1e-15; }),
                  special.end());
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < special.size(); ++k) {
        double lo = special[k], up = special[k + 1];
        if (up <= 0.0 || up <= lo) continue;
        if (lo >= hi) break;
        QuadRule q = graded_rule_both(lo, std::min(up, hi), levels);
        total += q.integrate(fn);
    }
    return total;
}

} // namespace detail

struct RieszOptions {
    int levels = 34;
};

// Riesz potential I_{2 sigma} f of a radial profile at radius r_eval.
// n = 1 treats the profile as an even function on the line; n = 3 uses the
// closed-form spherical average of the kernel. For 2 sigma = n the kernel is
// logarithmic and for 2 sigma > n (n = 1) the growth-normalized variant is
// used; riesz_variant_flagged reports those regimes.
inline double riesz_potential(const RadialProfile& f, double sigma, double r_eval,
                              const RieszOptions& opts = {}) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw param_error("riesz_potential: sigma outside (0,1)");
    const int n = f.n;
    const double alpha = 2.0 * sigma;
    const double R = f.support_radius();
    if (R <= 0.0) return 0.0;
    if (n != 1 && n != 3) throw param_error("riesz_potential: radial engine supports n=1 and n=3");
    if (n == 3 && alpha >= 2.0) throw param_error("riesz_potential: alpha >= 2 with n = 3 unsupported");

    std::vector<double> special{r_eval};
    if (std::isfinite(f.singular_radius)) special.push_back(f.singular_radius);

    if (n == 1) {
        const bool log_kernel = std::abs(alpha - 1.0) < 1e-12;
        const double c = log_kernel ? 1.0 / pi : riesz_constant(1, alpha);
        auto fn = [&](double rho) {
            double t1 = std::abs(r_eval - rho), t2 = r_eval + rho;
            double k1, k2;
            if (log_kernel) {
                k1 = (t1 > 0) ? -std::log(t1) : 0.0;
                k2 = (t2 > 0) ? -std::log(t2) : 0.0;
            } else {
                k1 = (t1 > 0) ? std::pow(t1, alpha - 1.0) : 0.0;
                k2 = (t2 > 0) ? std::pow(t2, alpha - 1.0) : 0.0;
            }
            return f.eval(rho) * (k1 + k2);
        };
        return c * detail::integrate_graded(R, special, opts.levels, fn);
    }

    // n == 3
    const double lambda = 3.0 - alpha;
    const double c = riesz_constant(3, alpha);
    auto fn = [&](double rho) {
        double S;
        if (r_eval < 1e-12) {
            S = 4.0 * pi * std::pow(rho, -lambda);
        } else if (std::abs(lambda - 2.0) < 1e-9) {
            S = 2.0 * pi / (r_eval * rho) * std::log((r_eval + rho) / std::abs(r_eval - rho));
        } else {
            S = 2.0 * pi *
                (std::pow(r_eval + rho, 2.0 - lambda) - std::pow(std::abs(r_eval - rho), 2.0 - lambda)) /
                (r_eval * rho * (2.0 - lambda));
        }
        return f.eval(rho) * rho * rho * S;
    };
    return c * detail::integrate_graded(R, special, opts.levels, fn);
}

// L1 norm of a radial profile over R^n. Graded quadrature handles the
// symbolic endpoint singularity down to a sliver whose contribution is
// integrated in closed form from the stored exponent (evaluating (1 - r/r_s)
// closer to the ring than ~1e-9 loses the distance to roundoff).
inline double l1_norm(const RadialProfile& f, int levels = 40) {
    const double R = f.support_radius();
    if (R <= 0.0) return 0.0;
    const double surf = (f.n == 1) ? 2.0 : 4.0 * pi; // |S^{n-1}|
    auto fn = [&](double rho) {
        return std::abs(f.eval(rho)) * ((f.n == 1) ? 1.0 : rho * rho);
    };
    std::vector<double> special;
    double upper = R;
    double tail = 0.0;
    const double rs = f.singular_radius;
    if (std::isfinite(rs) && f.singular_exponent < 0.0 && std::abs(rs - R) < 1e-12 * R) {
        double sliver = 1e-9 * rs;
        upper = rs - sliver;
        double p = f.singular_exponent;
        tail = std::abs(f.eval(upper)) * ((f.n == 1) ? 1.0 : rs * rs) * sliver / (p + 1.0);
    } else if (std::isfinite(rs)) {
        special.push_back(rs);
    }
    return surf * (detail::integrate_graded(upper, special, levels, fn) + tail);
}

struct FracLaplacianOptions {
    double inner = 0.25;   // Taylor-subtracted near window half-width
    double outer = 1e6;    // integration truncation radius
    int levels = 36;
    double truncation_tol = 1e-3; // relative tail bound that triggers an error
};

// Principal-value quadrature of (-Laplace)^sigma f at x for f on the line
// (n = 1), with second-order Taylor subtraction on a symmetric near window
// (where the linear term integrates to zero exactly).
inline double frac_laplacian(const std::function<double(double)>& f, double sigma, double x,
                             const FracLaplacianOptions& opts = {}) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw param_error("frac_laplacian: sigma outside (0,1)");
    const double C = frac_laplacian_constant(1, sigma);
    const double fx = f(x);
    const double d = opts.inner;

    // Near field: the odd part of f cancels on the symmetric window, leaving
    // the second symmetric difference D2(t) = f(x+t) + f(x-t) - 2 f(x). Its
    // quadratic part is integrated in closed form; what remains is O(t^4)
    // against the kernel and is evaluated outside a cancellation-safe hole.
    double f2;
    {
        double h2 = 1e-4 * std::max(1.0, std::abs(x)) + 1e-4 * d;
        f2 = (f(x + h2) + f(x - h2) - 2.0 * fx) / (h2 * h2);
    }
    double near = -f2 * std::pow(d, 2.0 - 2.0 * sigma) / (2.0 - 2.0 * sigma);
    QuadRule near_rule = graded_rule_left(1e-3 * d, d, opts.levels);
    for (std::size_t k = 0; k < near_rule.nodes.size(); ++k) {
        double t = near_rule.nodes[k], w = near_rule.weights[k];
        double kp = std::pow(t, -1.0 - 2.0 * sigma);
        double D2 = f(x + t) + f(x - t) - 2.0 * fx;
        near += w * kp * (-(D2 - f2 * t * t));
    }

    // far field out to `outer` on geometric panels
    double far = 0.0, far_abs = 0.0;
    {
        int panels = std::max(24, (int)std::ceil(12.0 * std::log10(opts.outer / d)));
        auto geom = logspace(d, opts.outer, panels + 1);
        QuadRule q;
        for (int s = 0; s < panels; ++s) {
            QuadRule seg = uniform_rule(geom[s], geom[s + 1], 1);
            q.nodes.insert(q.nodes.end(), seg.nodes.begin(), seg.nodes.end());
            q.weights.insert(q.weights.end(), seg.weights.begin(), seg.weights.end());
        }
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            double t = q.nodes[k], w = q.weights[k];
            double kp = std::pow(t, -1.0 - 2.0 * sigma);
            double term = w * kp * (2.0 * fx - f(x + t) - f(x - t));
            far += term;
            far_abs += std::abs(term);
        }
    }

    // beyond `outer` the integrand is 2 f(x) - f(x+t) - f(x-t); integrate it
    // in closed form with f frozen at the window-edge level, and bound the
    // remainder by the observed variation of f across the last octave
    double T = opts.outer;
    double fT = f(x + T), fmT = f(x - T);
    double tail = (2.0 * fx - fT - fmT) * std::pow(T, -2.0 * sigma) / (2.0 * sigma);
    double tail_err = (std::abs(fT - f(x + 0.5 * T)) + std::abs(fmT - f(x - 0.5 * T))) *
                      std::pow(T, -2.0 * sigma) / (2.0 * sigma);
    double value = C * (near + far + tail);
    double scale = std::max(std::abs(value), std::abs(C) * (std::abs(near) + far_abs));
    if (std::abs(C) * tail_err > opts.truncation_tol * std::max(scale, 1e-300) + 1e-14)
        throw coverage_error("frac_laplacian: window truncation bound above tolerance");
    return value;
}

// Fractional Hardy-Littlewood maximal statistic
//   sup_rho rho^{alpha-n} int_{B_rho(x0)} |f|
// over a logarithmic rho-mesh (64 radii per decade, 6 decades). The sup over
// the mesh lower-bounds the true sup and is monotone under refinement.
struct MaximalResult {
    double value = 0.0;
    double arg_rho = 0.0;
};

namespace detail {

// cumulative int_0^t |f| dr on a fine graded mesh
struct CumulativeAbs {
    std::vector<double> t;
    std::vector<double> F;
    explicit CumulativeAbs(const RadialProfile& f, int pts = 4000) {
        double R = f.support_radius();
        std::vector<double> knots = linspace(0.0, R, pts);
        if (std::isfinite(f.singular_radius)) {
            for (double u : logspace(1e-12, 0.2 * R, 200)) {
                double a = f.singular_radius - u, b = f.singular_radius + u;
                if (a > 0 && a < R) knots.push_back(a);
                if (b > 0 && b < R) knots.push_back(b);
            }
            std::sort(knots.begin(), knots.end());
        }
        t.assign(1, 0.0);
        F.assign(1, 0.0);
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            double lo = knots[k], hi = knots[k + 1];
            if (hi <= lo) continue;
            QuadRule q = graded_rule_both(lo, hi, 6);
            double seg = q.integrate([&](double rr) { return std::abs(f.eval(rr)); });
            t.push_back(hi);
            F.push_back(F.back() + seg);
        }
    }
    double operator()(double x) const {
        if (x <= 0) return 0.0;
        if (x >= t.back()) return F.back();
        std::size_t hi = std::upper_bound(t.begin(), t.end(), x) - t.begin();
        std::size_t lo = hi - 1;
        double s = (x - t[lo]) / (t[hi] - t[lo]);
        return (1.0 - s) * F[lo] + s * F[hi];
    }
};

} // namespace detail

inline MaximalResult frac_maximal_at(const RadialProfile& f, double alpha, double x0,
                                     double rho_lo = 1e-6, double rho_hi = 1.0) {
    if (!(alpha > 0.0 && alpha <= f.n)) throw param_error("frac_maximal: alpha must lie in (0, n]");
    if (f.n != 1) throw param_error("frac_maximal: implemented for n = 1 profiles");
    detail::CumulativeAbs F(f);
    auto ball_mass = [&](double rho) {
        double hi = x0 + rho, lo = x0 - rho;
        double m = F(hi) - ((lo >= 0) ? F(lo) : -F(-lo));
        return m;
    };
    MaximalResult out;
    int decades = (int)std::ceil(std::log10(rho_hi / rho_lo));
    for (double rho : logspace(rho_lo, rho_hi, std::max(2, 64 * decades))) {
        double val = std::pow(rho, alpha - f.n) * ball_mass(rho);
        if (val > out.value) {
            out.value = val;
            out.arg_rho = rho;
        }
    }
    return out;
}

inline RadialProfile frac_maximal(const RadialProfile& f, double alpha,
                                  double rho_lo = 1e-6, double rho_hi = 1.0) {
    RadialProfile m;
    m.n = f.n;
    double R = std::max(1.0, f.support_radius());
    for (double x0 : linspace(0.0, R, 65)) {
        m.r.push_back(x0);
        m.v.push_back(frac_maximal_at(f, alpha, x0, rho_lo, rho_hi).value);
    }
    return m;
}

struct HolderFit {
    double alpha_hat = 0.0;
    double c_hat = 0.0;
    double rsq = 0.0;
    bool degenerate = false;
    std::size_t used = 0;
};

// Least-squares fit of |g(r) - g(r0)| ~ C (1 - r/r0)^alpha from samples just
// below r0 (the paper's variable 1-3r when r0 = 1/3).
inline HolderFit holder_modulus_fit(const std::vector<double>& r, const std::vector<double>& g,
                                    double r0, double g_at_r0) {
    std::vector<double> ts, ds;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (r[i] >= r0 || r[i] <= 0) continue;
        double t = 1.0 - r[i] / r0;
        double d = std::abs(g[i] - g_at_r0);
        if (d > 0) {
            ts.push_back(t);
            ds.push_back(d);
        }
    }
    HolderFit out;
    if (ts.size() < 8) {
        if (ts.empty()) {
            out.degenerate = true; // zero increments everywhere
            return out;
        }
        throw coverage_error("holder_modulus_fit: fewer than 8 usable samples");
    }
    PowerFit pf = fit_power(ts, ds);
    out.alpha_hat = pf.exponent;
    out.c_hat = pf.prefactor;
    out.rsq = pf.rsq;
    out.used = pf.used;
    return out;
}

} // namespace ffb

#endif
