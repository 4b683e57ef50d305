#ifndef FFB_ENERGY_HPP
#define FFB_ENERGY_HPP

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "ffb/descent.hpp"
#include "ffb/extend.hpp"
#include "ffb/grid.hpp"
#include "ffb/params.hpp"
#include "ffb/rescale.hpp"
#include "ffb/solve.hpp"

namespace ffb {

struct EnergyBreakdown {
    double dirichlet = 0.0;
    double penalty = 0.0;
    double total = 0.0;
};

// J(u) = 1/2 int y^a |grad u|^2 + int_Gamma (u^+)^gamma restricted to `region`
// (edges are counted by their midpoint). The Dirichlet part reuses the exact
// solver edge weights, so eval_energy and the discrete Euler-Lagrange system
// come from one quadratic form.
inline EnergyBreakdown eval_energy_region(const Field& u, const EnergyParams& params,
                                          const Box& region) {
    const Grid& g = u.grid();
    if (std::abs(g.a() - params.a()) > 1e-12)
        throw param_error("eval_energy: grid weight exponent does not match params.a");
    EnergyBreakdown e;
    detail::for_each_edge(g, [&](std::size_t p, std::size_t q, double c) {
        auto P = g.position(p), Q = g.position(q);
        if (!region.contains(0.5 * (P[0] + Q[0]), 0.5 * (P[1] + Q[1]), 0.5 * (P[2] + Q[2])))
            return;
        e.dirichlet += 0.5 * c * sqr(u[p] - u[q]);
    });
    g.for_each_y0_node([&](std::size_t p, double measure) {
        auto X = g.position(p);
        if (!region.contains(X[0], X[1], 0.0)) return;
        double v = std::max(u[p], 0.0);
        e.penalty += std::pow(v, params.gamma()) * measure;
    });
    e.total = e.dirichlet + e.penalty;
    return e;
}

inline EnergyBreakdown eval_energy(const Field& u, const EnergyParams& params) {
    return eval_energy_region(u, params, Box{});
}

struct ScalingCheck {
    double dirichlet_factor = 0.0;
    double penalty_factor = 0.0;
    double predicted_dirichlet = 0.0;
    double predicted_penalty = 0.0;
};

// Energy components of the rescaled field divided by the components of u on
// the matching lambda-subdomain, against the predicted powers of lambda.
inline ScalingCheck energy_scaling_check(const Field& u, double lambda,
                                         const EnergyParams& params) {
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw param_error("energy_scaling_check: lambda must lie in (0, 1]");
    const Grid& g = u.grid();
    Field w = rescale_field(u, lambda, params.beta());
    EnergyBreakdown num = eval_energy(w, params);
    Box sub;
    sub.x1lo = -lambda * g.config().halfwidth;
    sub.x1hi = lambda * g.config().halfwidth;
    if (g.n() == 2) {
        sub.x2lo = sub.x1lo;
        sub.x2hi = sub.x1hi;
    }
    sub.ylo = 0.0;
    sub.yhi = lambda * g.config().height;
    EnergyBreakdown den = eval_energy_region(u, params, sub);
    ScalingCheck out;
    out.dirichlet_factor = (den.dirichlet > 0) ? num.dirichlet / den.dirichlet : 1.0;
    out.penalty_factor = (den.penalty > 0) ? num.penalty / den.penalty : 1.0;
    out.predicted_dirichlet = std::pow(lambda, params.dirichlet_scaling_exponent());
    out.predicted_penalty = std::pow(lambda, params.penalty_scaling_exponent());
    return out;
}

struct MinimizeOpts {
    double eps_start = 1e-2;
    double eps_final = 1e-8;
    double eps_ratio = 0.1;
    int max_iter_per_stage = 20000;
    double grad_tol = 1e-7;       // relative projected-gradient tolerance
    double theta_floor = 1e-6;    // positivity threshold floor
    bool dual_start = true;       // also descend from the degenerate-solve start
    double cg_tol = 1e-10;
};

struct ElReport {
    double interior_residual = 0.0;
    double gamma_residual = 0.0;          // weighted L2 of flux - gamma u^{gamma-1}
    double gamma_residual_rel = 0.0;
    std::size_t active_set_size = 0;
    bool gamma_vacuous = false;           // no Gamma node above the threshold
};

struct MinimizerResult {
    Field u;
    EnergyBreakdown energy;
    ElReport el;
    std::vector<std::pair<double, double>> continuation_path; // (eps, total energy)
    std::vector<int> stage_iterations;
    double theta = 0.0;
    int iterations = 0;
    double final_pg_norm = 0.0;
};

// Positivity threshold separating "contact" from "positive" trace values:
// the contact set is only defined up to the regularization floor.
inline double positivity_threshold(double eps_final, double scale,
                                   double floor_val = 1e-6) {
    return std::max(10.0 * eps_final, floor_val) * std::max(scale, 1.0);
}

namespace detail {

struct PenalizedEnergy {
    const Grid* g;
    double gamma;
    double eps;
    std::vector<char> free_mask;      // 1 for descent unknowns
    std::vector<double> gamma_meas;   // Gamma measure per node (0 elsewhere)
    std::vector<double> diagA;        // stiffness diagonal, for scaling
    std::vector<double> meas;         // dual weighted volume per node

    void build_diag() {
        diagA.assign(g->node_count(), 0.0);
        for_each_edge(*g, [&](std::size_t p, std::size_t q, double c) {
            diagA[p] += c;
            diagA[q] += c;
        });
        meas.assign(g->node_count(), 1.0);
        for (std::size_t p = 0; p < g->node_count(); ++p) {
            if (!g->active(p)) continue;
            int i1, i2, j;
            g->unpack(p, i1, i2, j);
            double m = g->dual_x(i1) * g->dual_x2(i2) * g->dual_yweight(j);
            if (gamma_meas[p] > 0) m = std::max(m, gamma_meas[p]);
            meas[p] = std::max(m, 1e-300);
        }
    }

    double measure(std::size_t p) const { return meas[p]; }

    // Diagonal curvature scaling: stiffness diagonal plus the magnitude of
    // the (concave) penalty curvature, so steps near the contact set shrink
    // to O(u + eps) and cannot overshoot the constraint by orders.
    void precondition(const std::vector<double>& u, std::vector<double>& grad) const {
        for (std::size_t p = 0; p < grad.size(); ++p) {
            if (!free_mask[p]) continue;
            double d = diagA[p];
            if (gamma_meas[p] > 0)
                d += gamma * (1.0 - gamma) * std::pow(std::max(u[p], 0.0) + eps, gamma - 2.0) *
                     gamma_meas[p];
            grad[p] /= d;
        }
    }

    double value(const std::vector<double>& u) const {
        double dir = 0.0;
        for_each_edge(*g, [&](std::size_t p, std::size_t q, double c) {
            dir += 0.5 * c * sqr(u[p] - u[q]);
        });
        double pen = 0.0;
        g->for_each_y0_node([&](std::size_t p, double measure) {
            pen += (std::pow(std::max(u[p], 0.0) + eps, gamma) - std::pow(eps, gamma)) * measure;
        });
        return dir + pen;
    }

    void gradient(const std::vector<double>& u, std::vector<double>& out) const {
        out.assign(g->node_count(), 0.0);
        for_each_edge(*g, [&](std::size_t p, std::size_t q, double c) {
            double d = c * (u[p] - u[q]);
            out[p] += d;
            out[q] -= d;
        });
        for (std::size_t p = 0; p < gamma_meas.size(); ++p)
            if (gamma_meas[p] > 0)
                out[p] += gamma * std::pow(std::max(u[p], 0.0) + eps, gamma - 1.0) * gamma_meas[p];
        for (std::size_t p = 0; p < out.size(); ++p)
            if (!free_mask[p]) out[p] = 0.0;
    }
};

} // namespace detail

inline ElReport el_residual(const Field& u, const EnergyParams& params, double theta) {
    const Grid& g = u.grid();
    ElReport rep;
    std::vector<double> Au = stiffness_apply(u);
    double acc = 0.0, wacc = 0.0;
    const auto& y = g.y_nodes();
    for (std::size_t p = 0; p < g.node_count(); ++p) {
        if (g.role(p) != NodeRole::Interior) continue;
        int i1, i2, j;
        g.unpack(p, i1, i2, j);
        double vol = g.dual_x(i1) * g.dual_x2(i2) *
                     (0.5 * (y[j] - y[j - 1]) + (j + 1 < g.config().ny ? 0.5 * (y[j + 1] - y[j]) : 0.0));
        double wvol = g.dual_x(i1) * g.dual_x2(i2) * g.dual_yweight(j);
        acc += sqr(Au[p] / vol) * wvol;
        wacc += wvol;
    }
    rep.interior_residual = (wacc > 0) ? std::sqrt(acc / wacc) : 0.0;

    auto flux = dtn_flux(u);
    double racc = 0.0, rw = 0.0, sacc = 0.0;
    std::size_t active = 0, positive = 0;
    for (const auto& fs : flux) {
        double tr = u[fs.node];
        if (tr <= theta) {
            ++active;
            continue;
        }
        ++positive;
        double target = params.gamma() * std::pow(tr, params.gamma() - 1.0);
        double m = g.gamma_measure(fs.node);
        racc += sqr(fs.value - target) * m;
        sacc += sqr(target) * m;
        rw += m;
    }
    rep.active_set_size = active;
    rep.gamma_vacuous = (positive == 0);
    if (!rep.gamma_vacuous) {
        rep.gamma_residual = std::sqrt(racc / rw);
        rep.gamma_residual_rel = (sacc > 0) ? std::sqrt(racc / sacc) : 0.0;
    }
    return rep;
}

// Minimize J over fields with the given non-negative outer Dirichlet data and
// u >= 0, by epsilon-regularized projected gradient descent with geometric
// continuation. Runs from u = 0 and (optionally) from the flux-free solve of
// the data, returning the lower-energy basin.
inline MinimizerResult minimize(GridPtr grid,
                                std::function<double(double, double, double)> outer_bc,
                                const EnergyParams& params, const MinimizeOpts& opts = {}) {
    const Grid& g = *grid;
    if (std::abs(g.a() - params.a()) > 1e-12)
        throw param_error("minimize: grid weight exponent does not match params");

    detail::PenalizedEnergy E;
    E.g = &g;
    E.gamma = params.gamma();
    E.eps = opts.eps_start;
    E.free_mask.assign(g.node_count(), 0);

    E.gamma_meas.assign(g.node_count(), 0.0);
    double data_scale = 0.0;
    Field base(grid, 0.0);
    for (std::size_t p = 0; p < g.node_count(); ++p) {
        NodeRole r = g.role(p);
        if (r == NodeRole::Interior || r == NodeRole::Gamma) E.free_mask[p] = 1;
        if (r == NodeRole::Gamma) E.gamma_meas[p] = g.gamma_measure(p);
        if (r == NodeRole::Dirichlet) {
            auto X = g.position(p);
            double v = outer_bc(X[0], X[1], X[2]);
            if (v < 0) throw param_error("minimize: outer Dirichlet data must be non-negative");
            base[p] = v;
            data_scale = std::max(data_scale, v);
        }
    }

    // Lagged-flux warm start: freeze the current contact estimate, prescribe
    // the regularized penalty flux from the previous iterate, and solve the
    // linear problem by CG. Accepted only when it lowers the energy.
    auto warm_start = [&](Field& u) {
        double scale = std::max(data_scale, 1.0);
        double theta_stage = std::max(10.0 * E.eps, opts.theta_floor) * scale;
        for (int pass = 0; pass < 10; ++pass) {
            std::vector<char> zero(g.node_count(), 0);
            std::vector<double> flux(g.node_count(), 0.0);
            for (std::size_t p : g.gamma_nodes()) {
                if (u[p] <= theta_stage)
                    zero[p] = 1;
                else
                    flux[p] = params.gamma() * std::pow(u[p] + E.eps, params.gamma() - 1.0);
            }
            BoundaryData bc;
            bc.outer = outer_bc;
            bc.gamma_kind = GammaCondition::NeumannFlux;
            bc.gamma_flux_by_node = [&flux](std::size_t p) { return flux[p]; };
            Field cand;
            try {
                auto [sol, rep] = solve_degenerate(grid, bc, opts.cg_tol, 0, &zero);
                (void)rep;
                cand = std::move(sol);
            } catch (const solver_error&) {
                return; // keep the projected-gradient path
            }
            for (std::size_t p = 0; p < g.node_count(); ++p)
                if (cand[p] < 0) cand[p] = 0;
            double change = 0.0;
            for (std::size_t p = 0; p < g.node_count(); ++p)
                change = std::max(change, std::abs(cand[p] - u[p]));
            if (E.value(cand.values()) < E.value(u.values()))
                u = cand;
            else
                return;
            if (change <= 1e-10 * scale) return;
        }
    };

    auto run_from = [&](Field u) {
        MinimizerResult res;
        res.u = Field(grid);
        E.eps = opts.eps_start;
        int total_it = 0;
        double pgn = 0.0;
        while (true) {
            warm_start(u);
            auto [it, pg] = project_descend(E, u.values(), opts.max_iter_per_stage, opts.grad_tol);
            total_it += it;
            pgn = pg;
            res.stage_iterations.push_back(it);
            res.continuation_path.push_back({E.eps, E.value(u.values())});
            if (E.eps <= opts.eps_final * (1.0 + 1e-12)) break;
            E.eps = std::max(E.eps * opts.eps_ratio, opts.eps_final);
        }
        res.u = std::move(u);
        res.iterations = total_it;
        res.final_pg_norm = pgn;
        return res;
    };

    E.build_diag();
    // Basin 1: continuation descent from the flux-free degenerate solve of
    // the data. Basin 2: the zero-trace branch, whose minimizer is the
    // Gamma-pinned solve (the u^gamma slope is infinite at 0, so any
    // zero-trace state is basin-stationary); exact via one CG solve.
    Field start = base;
    if (data_scale > 0) {
        BoundaryData bc = BoundaryData::even_reflection(outer_bc);
        auto [u1, rep] = solve_degenerate(grid, bc, opts.cg_tol);
        (void)rep;
        for (std::size_t p = 0; p < g.node_count(); ++p)
            if (u1[p] < 0) u1[p] = 0;
        start = std::move(u1);
    }
    MinimizerResult best = run_from(std::move(start));
    if (opts.dual_start && data_scale > 0) {
        auto zero_gamma = BoundaryData::mixed(outer_bc, [](double, double) { return true; },
                                              [](double, double) { return 0.0; });
        auto [u0, rep0] = solve_degenerate(grid, zero_gamma, opts.cg_tol);
        (void)rep0;
        for (std::size_t p = 0; p < g.node_count(); ++p)
            if (u0[p] < 0) u0[p] = 0;
        double e_best = eval_energy(best.u, params).total;
        double e_zero = eval_energy(u0, params).total;
        if (e_zero < e_best) {
            MinimizerResult alt;
            alt.u = std::move(u0);
            alt.continuation_path = {{opts.eps_final, e_zero}};
            alt.stage_iterations = {0};
            best = std::move(alt);
        }
    }

    best.u.set_nonnegative(true);
    best.energy = eval_energy(best.u, params);
    best.theta = positivity_threshold(opts.eps_final, data_scale, opts.theta_floor);
    best.el = el_residual(best.u, params, best.theta);
    return best;
}

} // namespace ffb

#endif
