#ifndef FFB_DESCENT_HPP
#define FFB_DESCENT_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>
#include <vector>

namespace ffb {

// Projected gradient descent onto {u >= 0 on free nodes} with diagonal
// curvature scaling, Barzilai-Borwein step selection, and a nonmonotone
// (watchdog) line search; the best-seen iterate is what finally lands in
// `u`, so the returned energy never exceeds the starting one.
//
// Termination is on the scaled (preconditioned) step norm; solution quality
// is certified separately through the Euler-Lagrange residuals, which the
// drivers check. EnergyModel provides value(u), gradient(u, out),
// precondition(u, grad), measure(p) and free_mask.
// Returns (iterations, final measure-normalized pg norm).
template <class EnergyModel>
inline std::pair<int, double> project_descend(EnergyModel& E, std::vector<double>& u,
                                              int max_iter, double grad_tol) {
    const std::size_t N = u.size();
    std::vector<double> grad(N), grad_old(N), u_old(N);
    double fval = E.value(u);
    std::vector<double> best_u = u;
    double best_f = fval;
    std::deque<double> window{fval};
    const std::size_t window_len = 8;

    double scale = 1.0;
    for (double v : u) scale = std::max(scale, std::abs(v));

    auto step_norm = [&](const std::vector<double>& dir) {
        double n = 0.0;
        for (std::size_t p = 0; p < N; ++p) {
            if (!E.free_mask[p]) continue;
            double t = u[p] - dir[p];
            if (t < 0) t = 0;
            n = std::max(n, std::abs(u[p] - t));
        }
        return n;
    };

    E.gradient(u, grad);
    E.precondition(u, grad);
    double step = 1.0;
    int it = 0;
    for (; it < max_iter; ++it) {
        if (step_norm(grad) <= grad_tol * std::max(scale, 1e-12)) break;

        u_old = u;
        grad_old = grad;
        double fref = *std::max_element(window.begin(), window.end());
        double trial = step;
        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t p = 0; p < N; ++p) {
                if (!E.free_mask[p]) continue;
                double t = u_old[p] - trial * grad_old[p];
                u[p] = (t < 0) ? 0.0 : t;
            }
            double fnew = E.value(u);
            if (fnew <= fref + 1e-14 * (1.0 + std::abs(fref))) {
                fval = fnew;
                accepted = true;
                break;
            }
            trial *= 0.5;
        }
        if (!accepted) {
            u = u_old;
            break;
        }
        window.push_back(fval);
        if (window.size() > window_len) window.pop_front();
        if (fval < best_f) {
            best_f = fval;
            best_u = u;
        }
        E.gradient(u, grad);
        E.precondition(u, grad);
        double sy = 0.0, ss = 0.0;
        for (std::size_t p = 0; p < N; ++p) {
            double s = u[p] - u_old[p];
            double y = grad[p] - grad_old[p];
            ss += s * s;
            sy += s * y;
        }
        step = (sy > 1e-300) ? ss / sy : trial * 2.0;
        step = std::min(std::max(step, 1e-16), 1e16);
    }
    if (best_f < fval) u = best_u;

    // measure-normalized projected gradient (pointwise EL residual scale)
    E.gradient(u, grad);
    double pgn = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
        if (!E.free_mask[p]) continue;
        double t = u[p] - grad[p] / E.measure(p);
        if (t < 0) t = 0;
        pgn = std::max(pgn, std::abs(u[p] - t));
    }
    return {it, pgn};
}

} // namespace ffb

#endif
