#ifndef FFB_EXTEND_HPP
#define FFB_EXTEND_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "ffb/grid.hpp"
#include "ffb/quadrature.hpp"

namespace ffb {

// Dirichlet-to-Neumann constant of the extension: with u the y^a-harmonic
// extension of f, lim_{y->0} y^a du/dy = -extension_constant(sigma) *
// (-Laplace)^sigma f under the |xi|^{2 sigma} symbol convention.
inline double extension_constant(double sigma) {
    return std::pow(2.0, 1.0 - 2.0 * sigma) * std::tgamma(1.0 - sigma) / std::tgamma(sigma);
}

// Piecewise-linear samples of a function of one variable plus an optional
// far-field model beyond the sampled window. When `exact` is present it is
// used for evaluation everywhere (sampled data would feed interpolation
// kinks into the y -> 0 layer of the extension).
struct LineProfile {
    std::vector<double> z;
    std::vector<double> v;
    std::function<double(double)> far;   // optional; default 0 outside
    std::function<double(double)> exact; // optional closed form

    double eval(double x) const {
        if (exact) return exact(x);
        if (z.empty()) return far ? far(x) : 0.0;
        if (x < z.front() || x > z.back()) return far ? far(x) : 0.0;
        std::size_t hi = std::upper_bound(z.begin(), z.end(), x) - z.begin();
        if (hi == 0) return v.front();
        if (hi >= z.size()) return v.back();
        std::size_t lo = hi - 1;
        double t = (x - z[lo]) / (z[hi] - z[lo]);
        return (1.0 - t) * v[lo] + t * v[hi];
    }
};

struct ExtendOptions {
    int graded_levels = 30;     // phi-rule grading toward +-pi/2
    double truncation_tol = 0.05;
};

struct ExtendReport {
    double max_truncation_mass = 0.0; // largest kernel mass that fell outside the window
    bool truncated = false;
};

// Fractional Poisson extension of a line profile evaluated on the grid:
//   u(x, y) = C int f(z) y^{2s} / (|x-z|^2 + y^2)^{(1+2s)/2} dz.
// The substitution z = x + y tan(phi) turns the kernel into cos^{2s-1}(phi),
// uniformly resolvable in y; dividing by the quadrature of the kernel itself
// normalizes so that poisson_extend(1) == 1 exactly.
inline Field poisson_extend(const LineProfile& f, double sigma, GridPtr grid,
                            const ExtendOptions& opts = {}, ExtendReport* report = nullptr) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw param_error("poisson_extend: sigma outside (0,1)");
    if (grid->n() != 1) throw param_error("poisson_extend: implemented for n = 1 grids");
    const Grid& g = *grid;
    const QuadRule rule = graded_rule_both(-0.5 * pi, 0.5 * pi, opts.graded_levels);
    const double p = 2.0 * sigma - 1.0;
    std::vector<double> kw(rule.nodes.size());
    double mass = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        kw[k] = rule.weights[k] * std::pow(std::cos(rule.nodes[k]), p);
        mass += kw[k];
    }
    ExtendReport rep;
    const bool have_far = static_cast<bool>(f.far);
    const double zlo = f.z.empty() ? 0.0 : f.z.front();
    const double zhi = f.z.empty() ? 0.0 : f.z.back();

    Field u(grid);
    for (std::size_t node = 0; node < g.node_count(); ++node) {
        if (!g.active(node)) continue;
        auto X = g.position(node);
        const double x = X[0], y = X[2];
        if (y == 0.0) {
            u[node] = f.eval(x);
            continue;
        }
        double acc = 0.0, lost = 0.0;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            double zz = x + y * std::tan(rule.nodes[k]);
            if (!have_far && (zz < zlo || zz > zhi)) lost += kw[k];
            acc += kw[k] * f.eval(zz);
        }
        u[node] = acc / mass;
        rep.max_truncation_mass = std::max(rep.max_truncation_mass, lost / mass);
    }
    rep.truncated = rep.max_truncation_mass > opts.truncation_tol;
    if (report) *report = rep;
    return u;
}

// Pointwise extension value at (x, y), for boundary data of auxiliary solves.
inline double poisson_extend_point(const LineProfile& f, double sigma, double x, double y,
                                   int graded_levels = 26) {
    if (y <= 0.0) return f.eval(x);
    const QuadRule rule = graded_rule_both(-0.5 * pi, 0.5 * pi, graded_levels);
    const double p = 2.0 * sigma - 1.0;
    double acc = 0.0, mass = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        double w = rule.weights[k] * std::pow(std::cos(rule.nodes[k]), p);
        mass += w;
        acc += w * f.eval(x + y * std::tan(rule.nodes[k]));
    }
    return acc / mass;
}

struct FluxSample {
    double x1 = 0.0;
    double x2 = 0.0;
    double value = 0.0;
    double error_est = 0.0;
    std::size_t node = 0;
};

// Discrete lim_{y->0} y^a du/dy per Gamma node. In the variable
// s = y^{2 sigma} / (2 sigma) the limit is the one-sided derivative du/ds at
// s = 0; the known next mode is y^2 = (2 sigma s)^{1/sigma}, so a two-level
// fit of u = u0 + g s + A s^{1/sigma} removes it exactly.
inline std::vector<FluxSample> dtn_flux(const Field& u, double tol = 0.0) {
    const Grid& g = u.grid();
    const double sigma = 0.5 * (1.0 - g.a());
    const auto& y = g.y_nodes();
    if (g.config().ny < 4) throw coverage_error("dtn_flux: need at least 4 y-levels");
    auto s_of = [&](int j) { return std::pow(y[j], 2.0 * sigma) / (2.0 * sigma); };
    const double s1 = s_of(1), s2 = s_of(2), s3 = s_of(3);
    const double q = 1.0 / sigma - 1.0; // exponent of the removed mode, minus one
    std::vector<FluxSample> out;
    for (std::size_t p : g.gamma_nodes()) {
        int i1, i2, j;
        g.unpack(p, i1, i2, j);
        auto level = [&](int jj) { return u[g.index(i1, i2, jj)]; };
        const double u0 = level(0);
        const double D1 = (level(1) - u0) / s1;
        const double D2 = (level(2) - u0) / s2;
        const double D3 = (level(3) - u0) / s3;
        auto extrap = [&](double Da, double sa, double Db, double sb) {
            return (Da * std::pow(sb, q) - Db * std::pow(sa, q)) /
                   (std::pow(sb, q) - std::pow(sa, q));
        };
        double g12 = extrap(D1, s1, D2, s2);
        double g13 = extrap(D1, s1, D3, s3);
        FluxSample fs;
        auto X = g.position(p);
        fs.x1 = X[0];
        fs.x2 = X[1];
        fs.value = g12;
        fs.error_est = std::abs(g12 - g13);
        fs.node = p;
        out.push_back(fs);
    }
    if (tol > 0.0) {
        double scale = 0.0;
        for (auto& fs : out) scale = std::max(scale, std::abs(fs.value));
        for (auto& fs : out)
            if (fs.error_est > tol * std::max(scale, 1e-300))
                throw coverage_error("dtn_flux: extrapolation error above tolerance; grading "
                                     "does not resolve the y^{2 sigma} layer");
    }
    return out;
}

} // namespace ffb

#endif
