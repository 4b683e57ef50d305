#ifndef FFB_GRID_HPP
#define FFB_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "ffb/common.hpp"

namespace ffb {

enum class DomainShape { HalfBox, HalfBall };

enum class NodeRole : unsigned char {
    Interior,  // equation node
    Gamma,     // y = 0, inside the domain; carries the boundary operator
    Dirichlet, // outer boundary (box sides/top or stair-step ball rim)
    Inactive   // outside a masked half-ball
};

struct GridConfig {
    int n = 1;                       // dimension of Gamma (1 or 2)
    int nx = 129;                    // nodes per x axis
    int ny = 65;                     // nodes on the y axis
    double halfwidth = 1.0;          // x in [-halfwidth, halfwidth]
    double height = 1.0;             // y in [0, height]
    double grading = 2.0;            // y_j = height * (j/J)^grading
    double a = 0.0;                  // weight exponent, -1 < a < 1
    DomainShape shape = DomainShape::HalfBox;
    double ball_radius = 1.0;        // used when shape == HalfBall

    static double default_grading(double sigma) {
        return std::min(4.0, 2.0 / std::min(1.0, 2.0 * sigma));
    }
};

// Average of y^a over [y1, y2]; exact closed form, finite for a > -1 even
// when y1 = 0. This is the stored weight of x-normal faces.
inline double face_weight_avg(double a, double y1, double y2) {
    if (y2 <= y1) throw param_error("face_weight_avg: empty extent");
    return (std::pow(y2, a + 1.0) - std::pow(y1, a + 1.0)) / ((a + 1.0) * (y2 - y1));
}

// Effective transmissibility of the vertical edge [y1, y2]: the reciprocal
// of the edge-average of y^{-a}. The resulting one-sided flux stencil is
// exact on the boundary-layer mode y^{1-a} = y^{2 sigma}, including the
// degenerate bottom edge y1 = 0.
inline double edge_weight_harmonic(double a, double y1, double y2) {
    if (y2 <= y1) throw param_error("edge_weight_harmonic: empty extent");
    return (y2 - y1) * (1.0 - a) / (std::pow(y2, 1.0 - a) - std::pow(y1, 1.0 - a));
}

// Tensor-product half-space mesh with a y-graded axis carrying the weight
// y^a. Immutable after construction.
class Grid {
  public:
    explicit Grid(const GridConfig& cfg) : cfg_(cfg) {
        if (cfg.n != 1 && cfg.n != 2) throw config_error("Grid: n must be 1 or 2");
        if (cfg.nx < 8 || cfg.ny < 8) throw config_error("Grid: need at least 8 nodes per axis");
        if (!(cfg.halfwidth > 0) || !(cfg.height > 0)) throw config_error("Grid: degenerate extents");
        if (!(cfg.grading >= 1.0)) throw config_error("Grid: grading exponent must be >= 1");
        if (!(cfg.a > -1.0 && cfg.a < 1.0)) throw config_error("Grid: weight exponent a must lie in (-1,1)");
        if (cfg.shape == DomainShape::HalfBall &&
            (cfg.ball_radius <= 0 || cfg.ball_radius > std::min(cfg.halfwidth, cfg.height)))
            throw config_error("Grid: ball radius must be positive and fit the box");

        x_ = linspace(-cfg.halfwidth, cfg.halfwidth, cfg.nx);
        y_.resize(cfg.ny);
        const double J = cfg.ny - 1;
        for (int j = 0; j < cfg.ny; ++j)
            y_[j] = cfg.height * std::pow(j / J, cfg.grading);
        y_[0] = 0.0;
        y_.back() = cfg.height;

        const double a = cfg.a;
        v_cond_.resize(cfg.ny - 1);
        cell_yw_.resize(cfg.ny - 1);
        for (int j = 0; j + 1 < cfg.ny; ++j) {
            v_cond_[j] = edge_weight_harmonic(a, y_[j], y_[j + 1]) / (y_[j + 1] - y_[j]);
            cell_yw_[j] = (std::pow(y_[j + 1], a + 1.0) - std::pow(y_[j], a + 1.0)) / (a + 1.0);
        }
        dual_yw_.resize(cfg.ny);
        auto W = [a](double y) { return std::pow(y, a + 1.0) / (a + 1.0); };
        for (int j = 0; j < cfg.ny; ++j) {
            double lo = (j == 0) ? 0.0 : 0.5 * (y_[j - 1] + y_[j]);
            double hi = (j + 1 == cfg.ny) ? y_.back() : 0.5 * (y_[j] + y_[j + 1]);
            dual_yw_[j] = W(hi) - W(lo);
        }

        nx2_ = (cfg.n == 2) ? cfg.nx : 1;
        roles_.assign(node_count(), NodeRole::Interior);
        classify_roles();
    }

    const GridConfig& config() const { return cfg_; }
    int n() const { return cfg_.n; }
    double a() const { return cfg_.a; }
    double dx() const { return x_[1] - x_[0]; }
    const std::vector<double>& x_nodes() const { return x_; }
    const std::vector<double>& y_nodes() const { return y_; }

    std::size_t node_count() const {
        return static_cast<std::size_t>(cfg_.nx) * nx2_ * cfg_.ny;
    }
    std::size_t index(int i1, int i2, int j) const {
        return (static_cast<std::size_t>(i2) * cfg_.nx + i1) * cfg_.ny + j;
    }
    void unpack(std::size_t idx, int& i1, int& i2, int& j) const {
        j = static_cast<int>(idx % cfg_.ny);
        std::size_t rest = idx / cfg_.ny;
        i1 = static_cast<int>(rest % cfg_.nx);
        i2 = static_cast<int>(rest / cfg_.nx);
    }
    std::array<double, 3> position(std::size_t idx) const {
        int i1, i2, j;
        unpack(idx, i1, i2, j);
        return {x_[i1], (cfg_.n == 2) ? x_[i2] : 0.0, y_[j]};
    }

    NodeRole role(std::size_t idx) const { return roles_[idx]; }
    bool active(std::size_t idx) const { return roles_[idx] != NodeRole::Inactive; }

    // Conductance density of the vertical edge j -> j+1 (flux per unit dual
    // x-measure: c * (u_{j+1} - u_j) approximates y^a du/dy on the edge).
    double vertical_conductance(int j) const { return v_cond_[j]; }
    // Integral of y^a over the primal cell [y_j, y_{j+1}].
    double cell_yweight(int j) const { return cell_yw_[j]; }
    // Integral of y^a over the dual strip around node level j.
    double dual_yweight(int j) const { return dual_yw_[j]; }

    double dual_x(int i) const {
        double h = dx();
        return (i == 0 || i == cfg_.nx - 1) ? 0.5 * h : h;
    }
    // Dual x-measure transverse to axis 1 at (i2); 1 when n == 1.
    double dual_x2(int i2) const { return (cfg_.n == 2) ? dual_x(i2) : 1.0; }

    // Measure element of a Gamma node (dual cell on the hyperplane).
    double gamma_measure(std::size_t idx) const {
        int i1, i2, j;
        unpack(idx, i1, i2, j);
        (void)j;
        return dual_x(i1) * dual_x2(i2);
    }

    // Every active node on the hyperplane y = 0 (Gamma unknowns plus the
    // Dirichlet-pinned endpoints); their dual cells tile Gamma exactly.
    template <class F>
    void for_each_y0_node(F&& fn) const {
        const int nx = cfg_.nx;
        for (int i2 = 0; i2 < nx2_; ++i2)
            for (int i1 = 0; i1 < nx; ++i1) {
                std::size_t p = index(i1, i2, 0);
                if (roles_[p] == NodeRole::Inactive) continue;
                fn(p, dual_x(i1) * dual_x2(i2));
            }
    }

    std::vector<std::size_t> gamma_nodes() const {
        std::vector<std::size_t> out;
        for (std::size_t p = 0; p < node_count(); ++p)
            if (roles_[p] == NodeRole::Gamma) out.push_back(p);
        return out;
    }
    std::vector<std::size_t> dirichlet_nodes() const {
        std::vector<std::size_t> out;
        for (std::size_t p = 0; p < node_count(); ++p)
            if (roles_[p] == NodeRole::Dirichlet) out.push_back(p);
        return out;
    }

  private:
    void classify_roles() {
        const int nx = cfg_.nx, ny = cfg_.ny;
        const bool ball = (cfg_.shape == DomainShape::HalfBall);
        const double R2 = cfg_.ball_radius * cfg_.ball_radius * (1.0 + 1e-12);
        auto inside = [&](int i1, int i2, int j) {
            if (i1 < 0 || i1 >= nx || j < 0 || j >= ny) return false;
            if (cfg_.n == 2 && (i2 < 0 || i2 >= nx)) return false;
            if (!ball) return true;
            double r2 = sqr(x_[i1]) + sqr(y_[j]) + (cfg_.n == 2 ? sqr(x_[i2]) : 0.0);
            return r2 <= R2;
        };
        for (int i2 = 0; i2 < nx2_; ++i2)
            for (int i1 = 0; i1 < nx; ++i1)
                for (int j = 0; j < ny; ++j) {
                    std::size_t p = index(i1, i2, j);
                    if (!inside(i1, i2, j)) {
                        roles_[p] = NodeRole::Inactive;
                        continue;
                    }
                    bool rim = !inside(i1 - 1, i2, j) || !inside(i1 + 1, i2, j) ||
                               j + 1 >= ny || !inside(i1, i2, j + 1);
                    if (cfg_.n == 2) rim = rim || !inside(i1, i2 - 1, j) || !inside(i1, i2 + 1, j);
                    if (j == 0) {
                        // On Gamma only lateral neighbors matter for the rim.
                        bool lat = !inside(i1 - 1, i2, j) || !inside(i1 + 1, i2, j);
                        if (cfg_.n == 2) lat = lat || !inside(i1, i2 - 1, j) || !inside(i1, i2 + 1, j);
                        roles_[p] = lat ? NodeRole::Dirichlet : NodeRole::Gamma;
                    } else {
                        roles_[p] = rim ? NodeRole::Dirichlet : NodeRole::Interior;
                    }
                }
    }

    GridConfig cfg_;
    int nx2_ = 1;
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> v_cond_;
    std::vector<double> cell_yw_;
    std::vector<double> dual_yw_;
    std::vector<NodeRole> roles_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr make_grid(const GridConfig& cfg) { return std::make_shared<Grid>(cfg); }

// Scalar values per node.
class Field {
  public:
    Field() = default;
    explicit Field(GridPtr g, double fill = 0.0)
        : grid_(std::move(g)), values_(grid_->node_count(), fill) {}

    template <class F>
    static Field from_function(GridPtr g, F&& f) {
        Field u(g);
        for (std::size_t p = 0; p < g->node_count(); ++p) {
            auto X = g->position(p);
            u.values_[p] = f(X[0], X[1], X[2]);
        }
        return u;
    }

    const Grid& grid() const { return *grid_; }
    GridPtr grid_ptr() const { return grid_; }
    std::vector<double>& values() { return values_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t p) const { return values_[p]; }
    double& operator[](std::size_t p) { return values_[p]; }

    void set_nonnegative(bool on) {
        nonneg_ = on;
        if (on)
            for (auto& v : values_)
                if (v < 0.0) v = 0.0;
    }
    bool nonnegative() const { return nonneg_; }

    void check() const {
        for (std::size_t p = 0; p < values_.size(); ++p) {
            if (!std::isfinite(values_[p])) throw error("Field: non-finite value at node " + std::to_string(p));
            if (nonneg_ && values_[p] < 0.0) throw error("Field: negativity under nonneg flag");
        }
    }

  private:
    GridPtr grid_;
    std::vector<double> values_;
    bool nonneg_ = false;
};

struct TraceSample {
    double x1 = 0.0;
    double x2 = 0.0;
    double value = 0.0;
    std::size_t node = 0;
};

// The y = 0 slice in lexicographic x-order (only Gamma nodes).
inline std::vector<TraceSample> trace(const Field& u) {
    std::vector<TraceSample> out;
    const Grid& g = u.grid();
    for (std::size_t p : g.gamma_nodes()) {
        auto X = g.position(p);
        out.push_back({X[0], X[1], u[p], p});
    }
    return out;
}

struct Box {
    double x1lo = -1e300, x1hi = 1e300;
    double x2lo = -1e300, x2hi = 1e300;
    double ylo = 0.0, yhi = 1e300;
    bool contains(double x1, double x2, double y) const {
        return x1 >= x1lo && x1 <= x1hi && x2 >= x2lo && x2 <= x2hi && y >= ylo && y <= yhi;
    }
};

// Cell-based weighted integral: sum over cells of (corner average) times the
// exact cell integral of y^a. Cells are counted when their center lies in
// `region` and all corners are active.
inline double weighted_integral(const Field& u, const Box& region, bool* empty = nullptr) {
    const Grid& g = u.grid();
    const auto& x = g.x_nodes();
    const auto& y = g.y_nodes();
    const int nx = g.config().nx, ny = g.config().ny;
    const int slabs = (g.n() == 2) ? nx - 1 : 1;
    double total = 0.0;
    bool any = false;
    for (int i2 = 0; i2 < slabs; ++i2) {
        for (int i1 = 0; i1 + 1 < nx; ++i1)
            for (int j = 0; j + 1 < ny; ++j) {
                double cx1 = 0.5 * (x[i1] + x[i1 + 1]);
                double cx2 = (g.n() == 2) ? 0.5 * (x[i2] + x[i2 + 1]) : 0.0;
                double cy = 0.5 * (y[j] + y[j + 1]);
                if (!region.contains(cx1, cx2, cy)) continue;
                double avg = 0.0;
                bool ok = true;
                int corners = 0;
                for (int d2 = 0; d2 < ((g.n() == 2) ? 2 : 1); ++d2)
                    for (int d1 = 0; d1 < 2; ++d1)
                        for (int dj = 0; dj < 2; ++dj) {
                            std::size_t p = g.index(i1 + d1, (g.n() == 2) ? i2 + d2 : 0, j + dj);
                            if (!g.active(p)) { ok = false; }
                            avg += u[p];
                            ++corners;
                        }
                if (!ok) continue;
                avg /= corners;
                double measure = g.cell_yweight(j) * (x[i1 + 1] - x[i1]);
                if (g.n() == 2) measure *= (x[i2 + 1] - x[i2]);
                total += avg * measure;
                any = true;
            }
    }
    if (empty) *empty = !any;
    return total;
}

inline double weighted_integral(const Field& u, bool* empty = nullptr) {
    return weighted_integral(u, Box{}, empty);
}

// Multilinear interpolation at (x1, x2, y). Throws coverage_error outside the
// covered (active) region.
inline double interpolate(const Field& u, double x1, double x2, double y) {
    const Grid& g = u.grid();
    const auto& x = g.x_nodes();
    const auto& yn = g.y_nodes();
    const double W = g.config().halfwidth;
    if (x1 < -W || x1 > W || y < 0.0 || y > g.config().height ||
        (g.n() == 2 && (x2 < -W || x2 > W)))
        throw coverage_error("interpolate: point outside grid box");
    auto bracket = [](const std::vector<double>& nodes, double v, int& i, double& t) {
        int lo = 0, hi = static_cast<int>(nodes.size()) - 1;
        while (hi - lo > 1) {
            int mid = (lo + hi) / 2;
            (nodes[mid] <= v ? lo : hi) = mid;
        }
        i = lo;
        t = (v - nodes[lo]) / (nodes[lo + 1] - nodes[lo]);
    };
    int i1, j, i2 = 0;
    double t1, tj, t2 = 0.0;
    bracket(x, x1, i1, t1);
    bracket(yn, y, j, tj);
    if (g.n() == 2) bracket(x, x2, i2, t2);
    double acc = 0.0;
    for (int d2 = 0; d2 < ((g.n() == 2) ? 2 : 1); ++d2)
        for (int d1 = 0; d1 < 2; ++d1)
            for (int dj = 0; dj < 2; ++dj) {
                std::size_t p = g.index(i1 + d1, (g.n() == 2) ? i2 + d2 : 0, j + dj);
                if (!g.active(p))
                    throw coverage_error("interpolate: cell corner outside masked domain");
                double w1 = d1 ? t1 : 1.0 - t1;
                double wj = dj ? tj : 1.0 - tj;
                double w2 = (g.n() == 2) ? (d2 ? t2 : 1.0 - t2) : 1.0;
                acc += w1 * w2 * wj * u[p];
            }
    return acc;
}

} // namespace ffb

#endif
