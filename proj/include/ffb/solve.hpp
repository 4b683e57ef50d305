#ifndef FFB_SOLVE_HPP
#define FFB_SOLVE_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "ffb/grid.hpp"

namespace ffb {

enum class GammaCondition { Dirichlet, NeumannFlux, EvenReflection, Mixed };

// Mixed boundary data for div(y^a grad u) = 0: Dirichlet values on the outer
// boundary plus a condition on Gamma. Gamma may carry Dirichlet values, a
// prescribed flux lim y^a du/dy, or a mix of both (Dirichlet inside
// `gamma_dirichlet_region`, flux elsewhere). Even reflection is realized as a
// homogeneous flux condition (equivalent for the symmetric stencil).
struct BoundaryData {
    std::function<double(double, double, double)> outer;           // (x1, x2, y)
    // optional per-node outer values (takes precedence over `outer`)
    std::function<double(std::size_t)> outer_by_node;
    GammaCondition gamma_kind = GammaCondition::EvenReflection;
    std::function<bool(double, double)> gamma_dirichlet_region;    // Mixed only
    std::function<double(double, double)> gamma_values;            // Dirichlet trace on Gamma
    std::function<double(double, double)> gamma_flux;              // flux on Gamma
    std::function<double(std::size_t)> gamma_flux_by_node;         // overrides gamma_flux

    bool dirichlet_at(double x1, double x2) const {
        switch (gamma_kind) {
            case GammaCondition::Dirichlet: return true;
            case GammaCondition::Mixed: return gamma_dirichlet_region(x1, x2);
            default: return false;
        }
    }

    static BoundaryData all_dirichlet(std::function<double(double, double, double)> f) {
        BoundaryData bc;
        bc.outer = f;
        bc.gamma_kind = GammaCondition::Dirichlet;
        bc.gamma_values = [f](double x1, double x2) { return f(x1, x2, 0.0); };
        return bc;
    }
    static BoundaryData with_flux(std::function<double(double, double, double)> outer,
                                  std::function<double(double, double)> flux) {
        BoundaryData bc;
        bc.outer = std::move(outer);
        bc.gamma_kind = GammaCondition::NeumannFlux;
        bc.gamma_flux = std::move(flux);
        return bc;
    }
    static BoundaryData even_reflection(std::function<double(double, double, double)> outer) {
        BoundaryData bc;
        bc.outer = std::move(outer);
        bc.gamma_kind = GammaCondition::EvenReflection;
        return bc;
    }
    static BoundaryData mixed(std::function<double(double, double, double)> outer,
                              std::function<bool(double, double)> dirichlet_region,
                              std::function<double(double, double)> dirichlet_values,
                              std::function<double(double, double)> flux = {}) {
        BoundaryData bc;
        bc.outer = std::move(outer);
        bc.gamma_kind = GammaCondition::Mixed;
        bc.gamma_dirichlet_region = std::move(dirichlet_region);
        bc.gamma_values = std::move(dirichlet_values);
        bc.gamma_flux = std::move(flux);
        return bc;
    }
};

struct SolveReport {
    int iterations = 0;
    double residual = 0.0;       // relative algebraic residual at exit
    double divergence_rms = 0.0; // weighted L2 of the discrete divergence
    double flux_residual = 0.0;  // Gamma-row imbalance (flux conditions only)
};

namespace detail {

// Compact symmetric 5/7-point representation over the unknown subset.
struct StencilSystem {
    std::vector<std::size_t> unknown;         // node index per dof
    std::vector<std::int64_t> dof_of;         // -1 for fixed/inactive nodes
    std::vector<double> diag;
    std::vector<std::vector<std::pair<std::int64_t, double>>> offdiag; // dof -> (neighbor dof, -c)
    std::vector<double> rhs;
    std::vector<double> fixed_values;         // full-length field with fixed data
};

inline void add_edge(StencilSystem& s, std::size_t p, std::size_t q, double c) {
    std::int64_t dp = s.dof_of[p], dq = s.dof_of[q];
    if (dp >= 0) {
        s.diag[dp] += c;
        if (dq >= 0)
            s.offdiag[dp].push_back({dq, -c});
        else
            s.rhs[dp] += c * s.fixed_values[q];
    }
    if (dq >= 0) {
        s.diag[dq] += c;
        if (dp >= 0)
            s.offdiag[dq].push_back({dp, -c});
        else
            s.rhs[dq] += c * s.fixed_values[p];
    }
}

// Walks every active edge once and reports its conductance.
template <class EdgeFn>
inline void for_each_edge(const Grid& g, EdgeFn&& fn) {
    const auto& cfg = g.config();
    const int nx = cfg.nx, ny = cfg.ny;
    const int nx2 = (g.n() == 2) ? nx : 1;
    const double h = g.dx();
    for (int i2 = 0; i2 < nx2; ++i2)
        for (int i1 = 0; i1 < nx; ++i1)
            for (int j = 0; j < ny; ++j) {
                std::size_t p = g.index(i1, i2, j);
                if (!g.active(p)) continue;
                if (j + 1 < ny) {
                    std::size_t q = g.index(i1, i2, j + 1);
                    if (g.active(q))
                        fn(p, q, g.vertical_conductance(j) * g.dual_x(i1) * g.dual_x2(i2));
                }
                if (i1 + 1 < nx) {
                    std::size_t q = g.index(i1 + 1, i2, j);
                    if (g.active(q))
                        fn(p, q, g.dual_yweight(j) / h * g.dual_x2(i2));
                }
                if (g.n() == 2 && i2 + 1 < nx) {
                    std::size_t q = g.index(i1, i2 + 1, j);
                    if (g.active(q))
                        fn(p, q, g.dual_yweight(j) / h * g.dual_x(i1));
                }
            }
}

inline StencilSystem assemble(const Grid& g, const BoundaryData& bc,
                              const std::vector<char>* forced_zero = nullptr) {
    StencilSystem s;
    const std::size_t N = g.node_count();
    s.dof_of.assign(N, -1);
    s.fixed_values.assign(N, 0.0);
    for (std::size_t p = 0; p < N; ++p) {
        NodeRole r = g.role(p);
        auto X = g.position(p);
        if (forced_zero && (*forced_zero)[p] && r != NodeRole::Inactive) {
            s.fixed_values[p] = 0.0;
            continue;
        }
        bool gamma_dir = (r == NodeRole::Gamma) && bc.dirichlet_at(X[0], X[1]);
        if (r == NodeRole::Interior || (r == NodeRole::Gamma && !gamma_dir)) {
            s.dof_of[p] = static_cast<std::int64_t>(s.unknown.size());
            s.unknown.push_back(p);
        } else if (r == NodeRole::Dirichlet) {
            if (bc.outer_by_node)
                s.fixed_values[p] = bc.outer_by_node(p);
            else if (bc.outer)
                s.fixed_values[p] = bc.outer(X[0], X[1], X[2]);
            else
                throw param_error("solve: missing outer Dirichlet data");
        } else if (gamma_dir) {
            if (!bc.gamma_values) throw param_error("solve: missing Gamma Dirichlet data");
            s.fixed_values[p] = bc.gamma_values(X[0], X[1]);
        }
    }
    s.diag.assign(s.unknown.size(), 0.0);
    s.offdiag.resize(s.unknown.size());
    s.rhs.assign(s.unknown.size(), 0.0);
    for_each_edge(g, [&](std::size_t p, std::size_t q, double c) { add_edge(s, p, q, c); });
    if (bc.gamma_flux || bc.gamma_flux_by_node) {
        for (std::size_t p : g.gamma_nodes()) {
            std::int64_t d = s.dof_of[p];
            if (d < 0) continue;
            auto X = g.position(p);
            // stationarity of Dir(u) + int_Gamma flux * u gives the natural
            // condition lim y^a du/dy = flux
            double gval = bc.gamma_flux_by_node ? bc.gamma_flux_by_node(p)
                                                : bc.gamma_flux(X[0], X[1]);
            s.rhs[d] -= gval * g.gamma_measure(p);
        }
    }
    return s;
}

} // namespace detail

// Preconditioned CG on the symmetric positive definite eliminated system.
// `forced_zero` pins selected nodes to 0 (used to build subsolutions with
// prescribed zero sets).
inline std::pair<Field, SolveReport> solve_degenerate(GridPtr grid, const BoundaryData& bc,
                                                      double tol = 1e-10, int max_iter = 0,
                                                      const std::vector<char>* forced_zero = nullptr) {
    if (!(tol > 0)) throw param_error("solve_degenerate: tol must be positive");
    const Grid& g = *grid;
    detail::StencilSystem s = detail::assemble(g, bc, forced_zero);
    const std::size_t m = s.unknown.size();
    if (max_iter <= 0) max_iter = 200 + 60 * static_cast<int>(std::sqrt(double(m)) + 1);

    std::vector<double> u(m, 0.0), r(s.rhs), z(m), p(m), Ap(m);
    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (std::size_t i = 0; i < m; ++i) {
            double acc = s.diag[i] * v[i];
            for (auto& [q, c] : s.offdiag[i]) acc += c * v[q];
            out[i] = acc;
        }
    };
    double bnorm = 0.0;
    for (double v : s.rhs) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    SolveReport rep;
    std::vector<double> history;
    if (bnorm > 0.0) {
        for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / s.diag[i];
        p = z;
        double rz = 0.0;
        for (std::size_t i = 0; i < m; ++i) rz += r[i] * z[i];
        int it = 0;
        double rel = 1.0;
        for (; it < max_iter; ++it) {
            double rnorm = 0.0;
            for (double v : r) rnorm += v * v;
            rel = std::sqrt(rnorm) / bnorm;
            if (it % 32 == 0) history.push_back(rel);
            if (rel <= tol) break;
            apply(p, Ap);
            double pAp = 0.0;
            for (std::size_t i = 0; i < m; ++i) pAp += p[i] * Ap[i];
            double alpha = rz / pAp;
            for (std::size_t i = 0; i < m; ++i) {
                u[i] += alpha * p[i];
                r[i] -= alpha * Ap[i];
            }
            for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / s.diag[i];
            double rznew = 0.0;
            for (std::size_t i = 0; i < m; ++i) rznew += r[i] * z[i];
            double beta = rznew / rz;
            rz = rznew;
            for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
        }
        rep.iterations = it;
        rep.residual = rel;
        if (rel > tol) {
            history.push_back(rel);
            throw solver_error("solve_degenerate: CG stalled at relative residual " +
                                   std::to_string(rel),
                               history);
        }
    }

    Field out(grid);
    for (std::size_t q = 0; q < g.node_count(); ++q) out[q] = s.fixed_values[q];
    for (std::size_t i = 0; i < m; ++i) out[s.unknown[i]] = u[i];

    // Physical divergence residual on interior rows, weighted RMS.
    apply(u, Ap);
    double acc = 0.0, wacc = 0.0, facc = 0.0, fwacc = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t node = s.unknown[i];
        int i1, i2, j;
        g.unpack(node, i1, i2, j);
        double vol = g.dual_x(i1) * g.dual_x2(i2) *
                     ((j == 0 ? 0.0 : 0.5 * (g.y_nodes()[j] - g.y_nodes()[j - 1])) +
                      (j + 1 < g.config().ny ? 0.5 * (g.y_nodes()[j + 1] - g.y_nodes()[j]) : 0.0));
        double wvol = g.dual_x(i1) * g.dual_x2(i2) * g.dual_yweight(j);
        double res = Ap[i] - s.rhs[i];
        if (g.role(node) == NodeRole::Gamma) {
            facc += sqr(res / g.gamma_measure(node)) * g.gamma_measure(node);
            fwacc += g.gamma_measure(node);
        } else {
            acc += sqr(res / vol) * wvol;
            wacc += wvol;
        }
    }
    rep.divergence_rms = wacc > 0 ? std::sqrt(acc / wacc) : 0.0;
    rep.flux_residual = fwacc > 0 ? std::sqrt(facc / fwacc) : 0.0;
    return {std::move(out), rep};
}

// (A u)_p for every non-Dirichlet active row of the stiffness form; used for
// Euler-Lagrange residuals. Gamma rows receive the full one-sided stencil.
inline std::vector<double> stiffness_apply(const Field& u) {
    const Grid& g = u.grid();
    std::vector<double> out(g.node_count(), 0.0);
    detail::for_each_edge(g, [&](std::size_t p, std::size_t q, double c) {
        double d = c * (u[p] - u[q]);
        out[p] += d;
        out[q] -= d;
    });
    return out;
}

} // namespace ffb

#endif
