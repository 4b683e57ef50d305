#ifndef FFB_RESCALE_HPP
#define FFB_RESCALE_HPP

#include <array>
#include <cmath>
#include <sstream>

#include "ffb/grid.hpp"
#include "ffb/params.hpp"

namespace ffb {

// v(X) = lambda^{-beta} u(center + lambda (X - center)) sampled on u's own
// grid by multilinear interpolation. `center` lies on Gamma. Values outside
// u's covered domain are an error, never an extrapolation; with
// `skip_uncovered` those nodes are left at zero instead (round-trip checks
// on the covered sub-domain use this).
inline Field rescale_field(const Field& u, double lambda, double beta,
                           std::array<double, 2> center = {0.0, 0.0},
                           bool skip_uncovered = false) {
    if (!(lambda > 0.0)) throw param_error("rescale_field: lambda must be positive");
    const Grid& g = u.grid();
    Field v(u.grid_ptr());
    const double scale = std::pow(lambda, -beta);
    for (std::size_t p = 0; p < g.node_count(); ++p) {
        if (!g.active(p)) continue;
        auto X = g.position(p);
        double sx1 = center[0] + lambda * (X[0] - center[0]);
        double sx2 = (g.n() == 2) ? center[1] + lambda * (X[1] - center[1]) : 0.0;
        double sy = lambda * X[2];
        double val;
        try {
            val = interpolate(u, sx1, sx2, sy);
        } catch (const coverage_error&) {
            if (skip_uncovered) continue;
            std::ostringstream os;
            os << "rescale_field: rescaled sample (" << sx1 << ", " << sx2 << ", " << sy
               << ") for node at (" << X[0] << ", " << X[1] << ", " << X[2]
               << ") leaves the covered domain (lambda = " << lambda << ")";
            throw coverage_error(os.str());
        }
        v[p] = scale * val;
    }
    return v;
}

} // namespace ffb

#endif
