#ifndef FFB_BALL_HPP
#define FFB_BALL_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "ffb/common.hpp"
#include "ffb/descent.hpp"

namespace ffb {

// Uniform Cartesian grid on [-R, R]^dim masked to the solid ball |x| <= R,
// with a stair-step Dirichlet rim. Carries the unweighted (second-order)
// problem on the full ball.
class BallGrid {
  public:
    enum class Role : unsigned char { Interior, Boundary, Outside };

    BallGrid(int dim, int nodes_per_axis, double radius = 1.0)
        : dim_(dim), m_(nodes_per_axis), R_(radius) {
        if (dim != 2 && dim != 3) throw config_error("BallGrid: dim must be 2 or 3");
        if (m_ < 8) throw config_error("BallGrid: need at least 8 nodes per axis");
        axis_ = linspace(-R_, R_, m_);
        h_ = axis_[1] - axis_[0];
        std::size_t total = count();
        roles_.assign(total, Role::Outside);
        for (std::size_t p = 0; p < total; ++p) {
            auto X = position(p);
            if (norm2(X) <= R_ * R_ * (1.0 + 1e-12)) roles_[p] = Role::Interior;
        }
        for (std::size_t p = 0; p < total; ++p) {
            if (roles_[p] != Role::Interior) continue;
            auto ix = unpack(p);
            for (int d = 0; d < dim_; ++d)
                for (int s : {-1, 1}) {
                    auto jx = ix;
                    jx[d] += s;
                    if (jx[d] < 0 || jx[d] >= m_ || roles_[pack(jx)] == Role::Outside) {
                        roles_[p] = Role::Boundary;
                        d = dim_;
                        break;
                    }
                }
        }
    }

    int dim() const { return dim_; }
    int nodes_per_axis() const { return m_; }
    double h() const { return h_; }
    double radius() const { return R_; }
    std::size_t count() const {
        std::size_t t = 1;
        for (int d = 0; d < dim_; ++d) t *= m_;
        return t;
    }
    std::array<int, 3> unpack(std::size_t p) const {
        std::array<int, 3> ix{0, 0, 0};
        for (int d = 0; d < dim_; ++d) {
            ix[d] = static_cast<int>(p % m_);
            p /= m_;
        }
        return ix;
    }
    std::size_t pack(const std::array<int, 3>& ix) const {
        std::size_t p = 0;
        for (int d = dim_ - 1; d >= 0; --d) p = p * m_ + ix[d];
        return p;
    }
    std::array<double, 3> position(std::size_t p) const {
        auto ix = unpack(p);
        std::array<double, 3> X{0.0, 0.0, 0.0};
        for (int d = 0; d < dim_; ++d) X[d] = axis_[ix[d]];
        return X;
    }
    static double norm2(const std::array<double, 3>& X) {
        return X[0] * X[0] + X[1] * X[1] + X[2] * X[2];
    }
    Role role(std::size_t p) const { return roles_[p]; }

    // 2*dim-point discrete Laplacian at an interior node.
    double laplacian(const std::vector<double>& u, std::size_t p) const {
        auto ix = unpack(p);
        double acc = 0.0;
        for (int d = 0; d < dim_; ++d) {
            auto a = ix, b = ix;
            a[d] -= 1;
            b[d] += 1;
            acc += u[pack(a)] + u[pack(b)] - 2.0 * u[p];
        }
        return acc / (h_ * h_);
    }

    template <class F>
    void for_each_edge(F&& fn) const {
        for (std::size_t p = 0; p < count(); ++p) {
            if (roles_[p] == Role::Outside) continue;
            auto ix = unpack(p);
            for (int d = 0; d < dim_; ++d) {
                auto jx = ix;
                jx[d] += 1;
                if (jx[d] >= m_) continue;
                std::size_t q = pack(jx);
                if (roles_[q] == Role::Outside) continue;
                fn(p, q);
            }
        }
    }

  private:
    int dim_;
    int m_;
    double R_;
    double h_;
    std::vector<double> axis_;
    std::vector<Role> roles_;
};

using BallGridPtr = std::shared_ptr<const BallGrid>;

// Dirichlet Laplace solve on the masked ball by Jacobi-preconditioned CG.
// Boundary nodes take data evaluated at their radial projection onto the
// sphere.
inline std::vector<double> ball_harmonic(const BallGrid& g,
                                         const std::function<double(std::array<double, 3>)>& data,
                                         double tol = 1e-10, int max_iter = 0) {
    const std::size_t N = g.count();
    std::vector<double> u(N, 0.0);
    std::vector<char> free_node(N, 0);
    for (std::size_t p = 0; p < N; ++p) {
        if (g.role(p) == BallGrid::Role::Boundary) {
            auto X = g.position(p);
            double r = std::sqrt(BallGrid::norm2(X));
            if (r > 0)
                for (auto& c : X) c *= g.radius() / r;
            u[p] = data(X);
        } else if (g.role(p) == BallGrid::Role::Interior) {
            free_node[p] = 1;
        }
    }
    // assemble unknowns
    std::vector<std::size_t> unk;
    std::vector<std::int64_t> dof(N, -1);
    for (std::size_t p = 0; p < N; ++p)
        if (free_node[p]) {
            dof[p] = static_cast<std::int64_t>(unk.size());
            unk.push_back(p);
        }
    const std::size_t m = unk.size();
    std::vector<double> diag(m, 0.0), rhs(m, 0.0);
    std::vector<std::vector<std::pair<std::int64_t, double>>> off(m);
    const double c = 1.0 / (g.h() * g.h());
    g.for_each_edge([&](std::size_t p, std::size_t q) {
        std::int64_t dp = dof[p], dq = dof[q];
        if (dp >= 0) {
            diag[dp] += c;
            if (dq >= 0)
                off[dp].push_back({dq, -c});
            else
                rhs[dp] += c * u[q];
        }
        if (dq >= 0) {
            diag[dq] += c;
            if (dp >= 0)
                off[dq].push_back({dp, -c});
            else
                rhs[dq] += c * u[p];
        }
    });
    if (max_iter <= 0) max_iter = 200 + 40 * static_cast<int>(std::sqrt(double(m)) + 1);
    std::vector<double> x(m, 0.0), r(rhs), z(m), pv(m), Ap(m);
    double bnorm = 0.0;
    for (double v : rhs) bnorm += v * v;
    bnorm = std::sqrt(bnorm);
    if (bnorm > 0) {
        for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / diag[i];
        pv = z;
        double rz = 0;
        for (std::size_t i = 0; i < m; ++i) rz += r[i] * z[i];
        std::vector<double> history;
        int it = 0;
        double rel = 1.0;
        for (; it < max_iter; ++it) {
            double rn = 0;
            for (double v : r) rn += v * v;
            rel = std::sqrt(rn) / bnorm;
            if (it % 32 == 0) history.push_back(rel);
            if (rel <= tol) break;
            for (std::size_t i = 0; i < m; ++i) {
                double acc = diag[i] * pv[i];
                for (auto& [q, cc] : off[i]) acc += cc * pv[q];
                Ap[i] = acc;
            }
            double pAp = 0;
            for (std::size_t i = 0; i < m; ++i) pAp += pv[i] * Ap[i];
            double alpha = rz / pAp;
            for (std::size_t i = 0; i < m; ++i) {
                x[i] += alpha * pv[i];
                r[i] -= alpha * Ap[i];
            }
            for (std::size_t i = 0; i < m; ++i) z[i] = r[i] / diag[i];
            double rznew = 0;
            for (std::size_t i = 0; i < m; ++i) rznew += r[i] * z[i];
            double beta = rznew / rz;
            rz = rznew;
            for (std::size_t i = 0; i < m; ++i) pv[i] = z[i] + beta * pv[i];
        }
        if (rel > tol) throw solver_error("ball_harmonic: CG stalled", history);
        for (std::size_t i = 0; i < m; ++i) u[unk[i]] = x[i];
    }
    return u;
}

struct BallEnergyBreakdown {
    double dirichlet = 0.0;
    double penalty = 0.0;
    double total = 0.0;
};

// J(u) = int_B |grad u|^2 / 2 + (u^+)^gamma (bulk penalty, no weight).
inline BallEnergyBreakdown ball_energy(const BallGrid& g, const std::vector<double>& u,
                                       double gamma) {
    BallEnergyBreakdown e;
    const double hm = std::pow(g.h(), g.dim());
    const double c = hm / (g.h() * g.h());
    g.for_each_edge([&](std::size_t p, std::size_t q) { e.dirichlet += 0.5 * c * sqr(u[p] - u[q]); });
    for (std::size_t p = 0; p < g.count(); ++p)
        if (g.role(p) != BallGrid::Role::Outside)
            e.penalty += std::pow(std::max(u[p], 0.0), gamma) * hm;
    e.total = e.dirichlet + e.penalty;
    return e;
}

namespace detail {

struct BallPenalizedEnergy {
    const BallGrid* g;
    double gamma;
    double eps;
    std::vector<char> free_mask;
    std::vector<double> diagA;

    void build_diag() {
        diagA.assign(g->count(), 0.0);
        const double hm = std::pow(g->h(), g->dim());
        const double c = hm / (g->h() * g->h());
        g->for_each_edge([&](std::size_t p, std::size_t q) {
            diagA[p] += c;
            diagA[q] += c;
        });
    }
    void precondition(const std::vector<double>& u, std::vector<double>& grad) const {
        const double hm = std::pow(g->h(), g->dim());
        for (std::size_t p = 0; p < grad.size(); ++p) {
            if (!free_mask[p]) continue;
            double d = diagA[p] +
                       gamma * (1.0 - gamma) * std::pow(std::max(u[p], 0.0) + eps, gamma - 2.0) * hm;
            grad[p] /= d;
        }
    }
    double measure(std::size_t) const { return std::pow(g->h(), g->dim()); }

    double value(const std::vector<double>& u) const {
        const double hm = std::pow(g->h(), g->dim());
        const double c = hm / (g->h() * g->h());
        double acc = 0.0;
        g->for_each_edge([&](std::size_t p, std::size_t q) { acc += 0.5 * c * sqr(u[p] - u[q]); });
        for (std::size_t p = 0; p < g->count(); ++p)
            if (g->role(p) != BallGrid::Role::Outside)
                acc += (std::pow(std::max(u[p], 0.0) + eps, gamma) - std::pow(eps, gamma)) * hm;
        return acc;
    }
    void gradient(const std::vector<double>& u, std::vector<double>& out) const {
        out.assign(g->count(), 0.0);
        const double hm = std::pow(g->h(), g->dim());
        const double c = hm / (g->h() * g->h());
        g->for_each_edge([&](std::size_t p, std::size_t q) {
            double d = c * (u[p] - u[q]);
            out[p] += d;
            out[q] -= d;
        });
        for (std::size_t p = 0; p < g->count(); ++p) {
            if (g->role(p) != BallGrid::Role::Outside)
                out[p] += gamma * std::pow(std::max(u[p], 0.0) + eps, gamma - 1.0) * hm;
            if (!free_mask[p]) out[p] = 0.0;
        }
    }
};

} // namespace detail

struct BallMinimizerResult {
    std::vector<double> u;
    BallEnergyBreakdown energy;
    int iterations = 0;
    double final_pg_norm = 0.0;
};

// Minimizer of the bulk-penalty energy on the ball with non-negative
// Dirichlet data, by the same projected-gradient continuation as the
// extension problem.
inline BallMinimizerResult ball_minimize(const BallGrid& g,
                                         const std::function<double(std::array<double, 3>)>& data,
                                         double gamma, double eps_start = 1e-2,
                                         double eps_final = 1e-8, int max_iter_per_stage = 20000,
                                         double grad_tol = 1e-7) {
    detail::BallPenalizedEnergy E;
    E.g = &g;
    E.gamma = gamma;
    E.eps = eps_start;
    E.free_mask.assign(g.count(), 0);

    std::vector<double> u(g.count(), 0.0);
    for (std::size_t p = 0; p < g.count(); ++p) {
        if (g.role(p) == BallGrid::Role::Interior) E.free_mask[p] = 1;
        if (g.role(p) == BallGrid::Role::Boundary) {
            auto X = g.position(p);
            double r = std::sqrt(BallGrid::norm2(X));
            if (r > 0)
                for (auto& cx : X) cx *= g.radius() / r;
            double v = data(X);
            if (v < 0) throw param_error("ball_minimize: boundary data must be non-negative");
            u[p] = v;
        }
    }
    // warm start from the harmonic lift
    E.build_diag();
    {
        std::vector<double> uh = ball_harmonic(g, data);
        for (std::size_t p = 0; p < g.count(); ++p)
            if (E.free_mask[p]) u[p] = std::max(uh[p], 0.0);
    }
    BallMinimizerResult res;
    int total = 0;
    double pgn = 0.0;
    while (true) {
        auto [it, pg] = project_descend(E, u, max_iter_per_stage, grad_tol);
        total += it;
        pgn = pg;
        if (E.eps <= eps_final * (1.0 + 1e-12)) break;
        E.eps = std::max(E.eps * 0.1, eps_final);
    }
    res.u = std::move(u);
    res.energy = ball_energy(g, res.u, gamma);
    res.iterations = total;
    res.final_pg_norm = pgn;
    return res;
}

} // namespace ffb

#endif
